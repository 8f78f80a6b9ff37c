from .errors import InstanceError

__all__ = ["InstanceError"]
