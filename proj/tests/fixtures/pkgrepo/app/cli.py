import pkg.helpers
import pkg.core as core
from pkg import VERSION


def banner():
    """Return the version banner."""
    return "v" + VERSION


def main(rate):
    """Run a small engine and clamp its first result."""
    engine = core.Engine(rate)
    return pkg.helpers.clamp(engine.run([1, 2])[0], 0, 5)
