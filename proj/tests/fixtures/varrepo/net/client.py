from config import get_url as url_for, DEBUG
import config as cfg

RETRIES = 3


def fetch(path, retries=RETRIES):
    """Fetch path, retrying on failure."""
    target = url_for(path)
    for _ in range(retries):
        if DEBUG:
            print(target)
    return target


def timeout():
    return cfg.TIMEOUT


def walrus(items):
    if (n := len(items)) > RETRIES:
        return n
    return 0


def nested():
    RETRIES = 5

    def inner():
        return RETRIES

    return inner()


def handle():
    try:
        return fetch("/")
    except ValueError as RETRIES:
        return RETRIES
