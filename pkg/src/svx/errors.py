"""Exception hierarchy for the svx package."""


class SvxError(Exception):
    """Base class for all svx errors."""


class FormatError(SvxError):
    """Malformed or unsupported image header / payload."""


class DataError(SvxError):
    """Payload values violate an invariant (e.g. non-finite samples)."""


class IoError(SvxError):
    """Filesystem-level read/write failure."""


class ParamError(SvxError, ValueError):
    """Invalid parameter or argument value."""


class StateError(SvxError):
    """Operation not valid in the current object state."""


class InternalError(SvxError):
    """Invariant broken inside the pipeline; indicates a bug."""


class ConfigError(SvxError):
    """Malformed run configuration (roles, config file, flags)."""


class EmptySeedError(SvxError):
    """A seed mask has (or would end up with) no foreground voxels."""


class NoSeedOverlapError(SvxError):
    """No supervoxel overlaps the seed above the fit threshold."""


class EmptyMaskError(SvxError):
    """A metric that needs a nonempty mask received an empty one."""
