"""Exception types shared across the toolkit."""


class DataError(ValueError):
    """Invalid input data or configuration (maps to CLI exit code 2)."""


class ProtocolError(DataError):
    """Malformed protocol/score file; carries file path and line number."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
            if line is not None:
                prefix += f"{line}:"
            prefix += " "
        super().__init__(prefix + message)


class TrainingError(RuntimeError):
    """Raised by the experiment runner when every pathway failed to train."""
