"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A waveform, channel or scenario configuration violates an invariant."""


class GridAlignmentError(ConfigError):
    """A channel tap delay does not land on the sample grid."""
