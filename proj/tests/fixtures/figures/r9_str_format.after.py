msg = "Hello {}!".format(name)
