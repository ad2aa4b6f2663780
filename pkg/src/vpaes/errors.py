"""Exception hierarchy. The CLI maps these to distinct exit codes."""


class VpaesError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(VpaesError, ValueError):
    """An argument violates an operation's stated domain."""


class PreconditionError(DomainError):
    """A statistical test's input does not meet its quality floor."""


class KeyFormatError(VpaesError, ValueError):
    """Key string does not parse to exactly 16 bytes, or is degenerate."""


class ImageFormatError(VpaesError, ValueError):
    """Unsupported or malformed image file."""


class ImageParseError(ImageFormatError):
    """Image file ends or breaks mid-structure; carries the byte offset."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class ContainerError(VpaesError, ValueError):
    """Base class for ciphertext container problems."""


class ContainerMagicError(ContainerError):
    """File does not start with the container magic."""


class ContainerVersionError(ContainerError):
    """Unknown container format version."""


class ContainerHeaderError(ContainerError):
    """A header field holds an invalid value."""


class ContainerLengthError(ContainerError):
    """Header dimensions and payload length disagree, or file truncated."""
