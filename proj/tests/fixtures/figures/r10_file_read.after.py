with open('file.txt', 'r') as f:
    data = f.read()
