class InstanceError(ValueError):
    """Malformed or inconsistent instance data."""
