"""Exception types raised by the simulator."""


class InvalidParameterError(ValueError):
    """A physical parameter is outside its admissible range."""


class DegenerateEstimateError(ValueError):
    """A resistance estimate cannot be formed from the measured noise."""


class InsufficientDataError(RuntimeError):
    """Not enough usable data to complete an estimate or an attack."""


class ConfigError(ValueError):
    """Experiment configuration could not be parsed or validated."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
