"""Exception hierarchy shared by all contactkit modules."""


class ContactKitError(Exception):
    """Base class for every error raised by this package."""


# --- symbolic core ---------------------------------------------------------

class ExprSyntaxError(ContactKitError):
    """Malformed expression text; carries the offending position."""

    def __init__(self, message, position, expected=None):
        self.position = position
        self.expected = expected
        detail = f"{message} at position {position}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class UnknownVariable(ContactKitError):
    pass


class NegativeExponent(ContactKitError):
    pass


class DivisionByNonLiteral(ContactKitError):
    pass


class RegistryMismatch(ContactKitError):
    pass


# --- contact algebra -------------------------------------------------------

class ForeignVariable(ContactKitError):
    pass


class NotContact(ContactKitError):
    """Vector field does not preserve the contact structure."""


class SingularForm(ContactKitError):
    """One-form fails the contact condition (degenerate d-alpha)."""


# --- characteristic flows --------------------------------------------------

class NonFiniteState(ContactKitError):
    """Trajectory left the finite range (blow-up)."""


class EvaluatorFailure(ContactKitError):
    pass


class NoRoot(ContactKitError):
    """Newton iteration for the boundary momentum did not converge."""


class TangentialCharacteristic(ContactKitError):
    """Characteristic direction has no transverse component at the boundary."""


class NonZeroArea(ContactKitError):
    """Closed plane curve encloses nonzero signed area; no closed lift exists."""


# --- thermodynamics --------------------------------------------------------

class NonPositiveInput(ContactKitError):
    pass


class DomainError(ContactKitError):
    pass


class ConjugatePair(ContactKitError):
    """Requested base coordinates are conjugate to each other."""


class NonInvertibleChart(ContactKitError):
    """Legendre transform is not injective on the sampled patch."""


# --- quantization ----------------------------------------------------------

class LaurentObstruction(ContactKitError):
    """Negative powers of w have no differential-operator realization."""


class DependsOnU(ContactKitError):
    pass


class NotOnShell(ContactKitError):
    """Phase fails the classical dispersion relation."""


class NonHermitianDiscretization(ContactKitError):
    pass


# --- sphere quantization ---------------------------------------------------

class StructureMismatch(ContactKitError):
    pass


class NonCanonicalStructure(ContactKitError):
    """Symplectic tensor is not in 2x2 block normal form."""


class CutoffTooSmall(ContactKitError):
    pass
