from constants import *
from math import sqrt


def area(r):
    """Area of a circle of radius r."""
    return PI * square(r)


def shadowed(PI):
    """The parameter shadows the constant."""
    return PI * 2


def local_assign(r):
    square = lambda v: v * v
    return square(r) + E


def hypot(a, b):
    """Length of the hypotenuse."""
    return sqrt(square(a) + square(b))


def uses_global():
    global E
    E = E + 1
    return E


def comp(values):
    """Comprehension variables do not leak."""
    return [PI for PI in values]


def squares(values):
    return [square(v) for v in values]
