from .core import Engine

VERSION = "1.0"
