"""Error hierarchy shared by the library, the CLI and the HTTP surface."""


class GpStateError(ValueError):
    """Base error; `exit_code` is what the CLI returns for it."""
    exit_code: int = 1


class UsageError(GpStateError):
    """Mismatched ambient algebras or malformed arguments."""


class NoEmbeddingError(GpStateError):
    """(n - 1) does not divide (m - 1): no unital embedding O_m -> O_n."""


class IndexOutOfRangeError(GpStateError):
    """A generator index lies outside its algebra."""


class DimensionError(GpStateError):
    """A vector length does not match the expected tensor size."""


class NonUnitaryError(GpStateError):
    """A supplied matrix is not unitary within tolerance."""


class InvalidParameterError(GpStateError):
    """A state parameter violates its invariants (norm, shape, family)."""


class NotDivisorError(GpStateError):
    """Target order is not a multiple of the source order."""


class NotBoundaryError(GpStateError):
    """A mixture decomposition was requested for an interior parameter."""


class BoundaryError(GpStateError):
    """The tilde map was requested for a boundary parameter."""


class MixtureHasNoInvariantError(GpStateError):
    """Boundary GP parameters of order >= 2 describe mixtures, not pure states."""


class NotUniqueStateError(GpStateError):
    """Evaluation was requested for a parameter whose GP state is not unique."""


class NotIsometryFamilyError(GpStateError):
    """Image monomials do not satisfy t_i* t_j = delta_ij I."""


class NearBoundaryError(GpStateError):
    """|z_m| is too close to 1 for the closed-form formulas."""
    exit_code = 2


class TailBoundTooLooseError(GpStateError):
    """The requested precision cannot be certified from the l2 tail bound."""
    exit_code = 2


class SingularSystemError(GpStateError):
    """The oracle linear system is singular; this signals a bug."""
    exit_code = 3


class OracleMismatchError(GpStateError):
    """Closed form and oracle disagree beyond the oracle tolerance."""
    exit_code = 3
