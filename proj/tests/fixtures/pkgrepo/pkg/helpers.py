DEFAULT_RATE = 1.5
LIMITS = (0, 10)


def clamp(x, lo, hi):
    """Clamp x into the range [lo, hi]."""
    return max(lo, min(hi, x))


def apply(job, rate):
    """Apply rate to job."""
    return job * rate


def bounded(x):
    """Clamp x into LIMITS."""
    lo, hi = LIMITS
    return clamp(x, lo, hi)
