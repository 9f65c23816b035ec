def max_of_two(a, b):
    if a > b:
        result = a
    else:
        result = b
    return (result)
