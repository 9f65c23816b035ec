f = open('file.txt', 'r')
data = f.read()
f.close()
