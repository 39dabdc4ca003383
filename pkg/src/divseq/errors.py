"""Exception hierarchy shared by all divseq modules."""


class DivseqError(Exception):
    """Base class for every error raised by this package."""


class ZeroInput(DivseqError, ValueError):
    pass


class NegativeWithoutSign(DivseqError, ValueError):
    pass


class BasisExceeded(DivseqError):
    """Raised when a cofactor has primes outside a fixed basis."""

    def __init__(self, cofactor):
        super().__init__(f"cofactor {cofactor} has primes outside the basis")
        self.cofactor = cofactor


class BasisMismatch(DivseqError):
    pass


class DomainViolation(DivseqError):
    def __init__(self, value, step_index=None):
        msg = f"value {value} leaves the domain"
        if step_index is not None:
            msg += f" at step {step_index}"
        super().__init__(msg)
        self.value = value
        self.step_index = step_index


class InvalidParams(DivseqError, ValueError):
    pass


class SizeGuardError(DivseqError):
    """An integer entry grew beyond the configured digit limit."""


class MissingComponentOfOne(DivseqError):
    pass


class InvalidCertificate(DivseqError):
    pass


class SchemaVersionMismatch(DivseqError):
    pass


class CorruptCertificate(InvalidCertificate):
    pass
