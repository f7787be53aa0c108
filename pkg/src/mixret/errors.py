"""Exception hierarchy. The CLI maps these onto exit codes."""


class MixretError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InputError(MixretError, ValueError):
    """Malformed arguments or configuration."""

    exit_code = 2


class PreconditionError(MixretError):
    """A mathematical precondition of an operation does not hold."""

    exit_code = 2


class CapabilityError(MixretError):
    """The request is well formed but exceeds what the implementation can do."""

    exit_code = 3
