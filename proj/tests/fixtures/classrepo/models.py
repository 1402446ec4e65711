REGISTRY = {}


def register(cls):
    """Add cls to REGISTRY."""
    REGISTRY[cls.__name__] = cls
    return cls


@register
class Base:
    """Base model."""

    def save(self):
        """Persist the model after validation."""
        return self.validate() and True

    def validate(self):
        return True


@register
class User(Base):
    """A user."""

    def validate(self):
        """Validate the user name."""
        return bool(self.name) and super().validate()

    @property
    def name(self):
        return "user"

    @staticmethod
    def create(name):
        """Create a user."""
        return User()
