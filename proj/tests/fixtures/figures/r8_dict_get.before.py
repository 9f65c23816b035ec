if key in dictionary:
    value = dictionary[key]
else:
    value = default
