"""Exception taxonomy.

Every error that callers are expected to branch on subclasses Gl2LocalError.
The CLI maps Gl2LocalError (bad input, violated hypothesis, insufficient
precision) to exit code 2; check *failures* are data, not exceptions, and
exit 1 through the report layer.
"""


class Gl2LocalError(Exception):
    """Base class for domain errors raised by this package."""


class ModulusCapExceeded(Gl2LocalError):
    """A cyclotomic operation would need a root-of-unity order above the cap."""


class BadModulus(Gl2LocalError):
    """Modulus lift target is not a multiple of the current modulus."""


class NonRationalNorm(Gl2LocalError):
    """z * conj(z) did not reduce to a rational number."""


class UnsupportedPrime(Gl2LocalError):
    """p is not an odd prime (p = 2 and composites are rejected throughout)."""


class InsufficientPrecision(Gl2LocalError):
    """A p-adic operation needs more unit digits than the operand carries."""


class RegimeMismatch(Gl2LocalError):
    """Shift exponent is outside the requested regime of the character integral."""


class MissingOmegaEntry(Gl2LocalError):
    """Weyl-action table has no entry for a character produced by the action."""


class ZeroNormalizer(Gl2LocalError):
    """The ramified principal-series normalizing constant vanished."""


class TruncationUnstable(Gl2LocalError):
    """Certified-zero tail shells of a truncated integral were nonzero."""


class WindowUnstable(Gl2LocalError):
    """Enlarging the integration window changed a value claimed exact."""


class HypothesisViolated(Gl2LocalError):
    """Arguments violate a stated hypothesis (conductor/level inequalities)."""


class PrecisionTooLow(Gl2LocalError):
    """Matrix entries carry too few digits to classify the double coset."""


class NewformNotFound(Gl2LocalError):
    """No cached, fixture, or remote record exists for the requested label."""


class SchemaDrift(Gl2LocalError):
    """A newform payload is missing required fields or has malformed values."""


class RangeExceeded(Gl2LocalError):
    """A coefficient beyond the stored range of the newform record was needed."""


class TruncationInsufficient(Gl2LocalError):
    """A numeric series truncation cannot meet the requested error budget."""


class LevelMismatch(Gl2LocalError):
    """A cusp of level N was used inside a group whose level N does not divide."""
