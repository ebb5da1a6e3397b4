class IllConditionedError(ValueError):
    """Raised when a Fourier solve would divide by a (near) zero spectrum."""


class CapabilityError(ValueError):
    """Raised when a super-resolver is asked for an unsupported scale or noise level."""


class ExternalPriorError(RuntimeError):
    """An external super-resolver process failed or returned a malformed result."""

    def __init__(self, message, returncode=None, stderr=""):
        super().__init__(message if not stderr else f"{message}\n--- stderr ---\n{stderr}")
        self.returncode = returncode
        self.stderr = stderr
