"""String helpers."""
import re

MAX_LEN = 80
WORD_RE = re.compile(r"[A-Za-z]+")


def is_full_string(value):
    """Check that value is a non-empty string."""
    return isinstance(value, str) and value.strip() != ""


def shorten(text, limit=MAX_LEN):
    """Cut text to at most limit characters."""
    if not is_full_string(text):
        return ""
    return text[:limit]


class Formatter:
    """Formats identifiers."""

    sep = "_"

    def camel(self, name):
        """Convert a snake_case name to camelCase."""
        head, *rest = name.split(self.sep)
        return head + "".join(p.title() for p in rest)

    def snake(self, name):
        """Convert a camelCase name to snake_case."""
        out = []
        for ch in name:
            if ch.isupper():
                out.append(self.sep)
            out.append(ch.lower())
        return "".join(out)

    def format(self, name, style="camel"):
        """Format name in the given style."""
        if style == "camel":
            return self.camel(name)
        return self.snake(name)
