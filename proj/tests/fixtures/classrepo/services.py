from models import User, Base as BaseModel, register


def signup(name):
    """Sign up a new user."""
    user = User.create(name)
    user.save()
    return user


def is_model(obj):
    """True when obj is a model."""
    return isinstance(obj, BaseModel)


def make_plugin():
    @register
    class Plugin:
        pass

    return Plugin


class Service:
    def run(self):
        return signup("x")
