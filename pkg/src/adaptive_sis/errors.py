"""Exception types raised across the package."""


class EdgeListError(ValueError):
    """Malformed or empty edge-list input."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConvergenceError(RuntimeError):
    """Power iteration did not settle within its iteration budget."""

    def __init__(self, message, estimate, iterations):
        super().__init__(f"{message} (last estimate {estimate!r} after {iterations} iterations)")
        self.estimate = estimate
        self.iterations = iterations


class NonFiniteError(FloatingPointError):
    """A derivative or state entry became NaN/Inf."""

    def __init__(self, message, node=None):
        self.node = node
        if node is not None:
            message = f"{message} at node {node}"
        super().__init__(message)


class PremiseError(ValueError):
    """Inputs violate the premise of an analytical criterion."""


class ConfigError(ValueError):
    """Invalid experiment configuration; ``key`` names the offending entry."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")
