if condition:
    flag = True
else:
    flag = False
