"""Exception types raised across the package."""


class ContactSenseError(ValueError):
    pass


class InvalidInputError(ContactSenseError):
    pass


class DomainError(ContactSenseError):
    pass


class OutOfPatchError(ContactSenseError):
    """A probe landed outside the terrain patch."""

    def __init__(self, message, probe_index=None):
        super().__init__(message)
        self.probe_index = probe_index


class InsufficientDataError(ContactSenseError):
    pass


class DegenerateDataError(ContactSenseError):
    pass


class InvalidReactionError(ContactSenseError):
    pass


class ConfigError(ContactSenseError):
    pass
