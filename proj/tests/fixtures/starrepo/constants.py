PI = 3.14159
E = 2.71828


def square(x):
    """Return x squared."""
    return x * x
