def max_of_two(a, b):
    result = a if a > b else b
    return (result)
