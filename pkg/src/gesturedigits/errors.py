"""Exception types shared across the toolkit."""


class ContractViolation(ValueError):
    """A documented precondition of an operation was violated by the caller."""


class ParseError(ValueError):
    """Malformed annotation or manifest input; message carries line/element context."""


class IngestionError(ValueError):
    """Dataset directory tree unusable; message names the offending directory."""


class NoHandRegionError(Exception):
    """Segmentation found no foreground pixels to box."""


class DataError(Exception):
    """An item referenced by a manifest could not be read; message names the path."""


class CheckpointError(Exception):
    """Base class for checkpoint file problems."""


class NotACheckpointError(CheckpointError):
    """File does not start with the checkpoint magic."""


class CheckpointVersionError(CheckpointError):
    """Checkpoint format version is not supported."""


class TruncatedCheckpointError(CheckpointError):
    """File ended before the declared payload was read."""


class ArchitectureMismatchError(CheckpointError):
    """Checkpoint architecture descriptor does not match the target network."""
