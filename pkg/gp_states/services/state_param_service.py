"""Classification, canonical invariants and equivalence of GP state parameters."""

import logging
import math
from functools import reduce
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError
from scipy.linalg import svdvals

from ..exceptions import (
    BoundaryError,
    DimensionError,
    InvalidParameterError,
    MixtureHasNoInvariantError,
    NearBoundaryError,
    NotBoundaryError,
    NotDivisorError,
    UsageError,
)
from ..models.settings import SystemSettings
from ..models.state_params import (
    CanonicalInvariant,
    Classification,
    CuntzParam,
    EquivalenceVerdict,
    FiniteGpParam,
    GpStateParam,
    InvariantKind,
    L2Family,
    L2GpParam,
    Verdict,
)
from .embedding_service import EmbeddingService

logger = logging.getLogger(__name__)

MIXTURE_NOTE = (
    "The boundary GP state lies in the convex hull of the listed Cuntz states; "
    "the weights are not fixed, and any convex weights realize a GP state at the boundary."
)


def _build(model, context=None, **fields):
    """Construct a parameter model, turning validation failures into InvalidParameterError."""
    try:
        return model.model_validate(fields, context=context)
    except ValidationError as e:
        raise InvalidParameterError(str(e)) from e


class StateParamService:
    """Parameter-level operations on geometric progression states."""

    def __init__(self, settings: SystemSettings):
        self.settings = settings
        self.tolerances = settings.tolerances
        self._norms = {"unit_norm": self.tolerances.unit_norm, "l2_norm": self.tolerances.l2_norm}
        self.embeddings = EmbeddingService(settings)

    # Classification

    def boundary_distance(self, param: FiniteGpParam) -> float:
        return 1.0 - abs(param.z_last)

    def classify(self, param: GpStateParam) -> Classification:
        """Uniqueness and purity of the GP state by `param`.

        Raises:
            NearBoundaryError: when 1 - |z_m| lies in [boundary_tol, closed_form_tol)
        """
        if not isinstance(param, FiniteGpParam) or param.k == 1:
            return Classification(verdict=Verdict.UNIQUE_PURE)
        distance = self.boundary_distance(param)
        if distance < self.tolerances.boundary:
            return Classification(
                verdict=Verdict.BOUNDARY_MIXTURE,
                components=self.decompose_mixture(param),
                note=MIXTURE_NOTE,
            )
        if distance < self.tolerances.closed_form:
            raise NearBoundaryError(
                f"1 - |z_m| = {distance:.3e} lies between the boundary tolerance "
                f"{self.tolerances.boundary:.1e} and the closed-form tolerance {self.tolerances.closed_form:.1e}"
            )
        return Classification(verdict=Verdict.UNIQUE_PURE)

    def is_boundary(self, param: FiniteGpParam) -> bool:
        return self.boundary_distance(param) < self.tolerances.boundary

    def decompose_mixture(self, param: FiniteGpParam) -> List[CuntzParam]:
        """The k Cuntz components (0, ..., 0, e^{2 pi i j/k} q) with q the principal k-th root of z_m."""
        if not self.is_boundary(param):
            raise NotBoundaryError(f"|z_m| = {abs(param.z_last)!r} is not on the boundary")
        phase = np.angle(param.z_last)
        components = []
        for j in range(param.k):
            c = complex(np.exp(1j * (phase + 2.0 * np.pi * j) / param.k))
            components.append(CuntzParam(n=param.n, y=(0j,) * (param.n - 1) + (c,)))
        return components

    # Tilde and hat maps

    def tilde_of_cuntz(self, param: CuntzParam) -> L2GpParam:
        """y~_{(n-1)r+i} = y_n^r y_i."""
        if 1.0 - abs(param.y_last) < self.tolerances.boundary:
            raise BoundaryError("The tilde map needs |y_n| < 1")
        return _build(
            L2GpParam,
            self._norms,
            n=param.n,
            family=L2Family.GEOMETRIC,
            seed=param.y,
            prefix=self._placeholder_prefix(),
        )

    def tilde_of_finite(self, param: FiniteGpParam) -> L2GpParam:
        """y~_{(m-1)r+i} = y_m^r y_i: the infinite-order parameter of the same state."""
        if self.is_boundary(param):
            raise BoundaryError("The tilde map needs |y_m| < 1")
        return _build(
            L2GpParam,
            self._norms,
            n=param.n,
            family=L2Family.GEOMETRIC,
            seed=param.z,
            prefix=self._placeholder_prefix(),
        )

    def _placeholder_prefix(self) -> Tuple[complex, ...]:
        # Closed forms regenerate the prefix; only its length is read.
        return (0j,) * self.settings.l2_prefix_length

    def lift_order(self, param: FiniteGpParam, order: int) -> FiniteGpParam:
        """z^ of order `order`: blocks z_m^r z_i for r < K and z_m^K last, K = order / k."""
        if order < 1 or order % param.k:
            raise NotDivisorError(f"Order {order} is not a multiple of {param.k}")
        ratio = order // param.k
        if ratio == 1:
            return param
        z = param.as_array()
        head, last = z[:-1], z[-1]
        powers = last ** np.arange(ratio)
        lifted = np.concatenate([np.outer(powers, head).ravel(), [last ** ratio]])
        lifted = lifted / np.linalg.norm(lifted)
        logger.debug("Lifted order %d -> %d (m=%d -> %d)", param.k, order, param.m, len(lifted))
        return _build(FiniteGpParam, self._norms, n=param.n, k=order, z=lifted)

    # Canonical invariants

    def canonicalize(self, param: GpStateParam) -> CanonicalInvariant:
        """The complete invariant of a pure GP state.

        Raises:
            MixtureHasNoInvariantError: for boundary parameters of order >= 2
        """
        if isinstance(param, L2GpParam):
            return CanonicalInvariant(kind=InvariantKind.INTERIOR, n=param.n, interior=param)
        if isinstance(param, FiniteGpParam) and param.k == 1:
            param = _build(CuntzParam, self._norms, n=param.n, y=param.z)
        if isinstance(param, CuntzParam):
            if 1.0 - abs(param.y_last) < self.tolerances.boundary:
                c = param.y_last / abs(param.y_last)
                return CanonicalInvariant(kind=InvariantKind.BOUNDARY, n=param.n, c=c)
            return CanonicalInvariant(kind=InvariantKind.INTERIOR, n=param.n, interior=self.tilde_of_cuntz(param))
        classification = self.classify(param)
        if classification.verdict is Verdict.BOUNDARY_MIXTURE:
            raise MixtureHasNoInvariantError(
                f"Boundary parameters of order {param.k} describe mixtures of {param.k} Cuntz states"
            )
        return CanonicalInvariant(kind=InvariantKind.INTERIOR, n=param.n, interior=self.tilde_of_finite(param))

    def invariants_agree(self, a: CanonicalInvariant, b: CanonicalInvariant, tol: Optional[float] = None) -> EquivalenceVerdict:
        tol = self.tolerances.comparison if tol is None else tol
        if a.n != b.n:
            raise UsageError(f"Invariants live over different algebras: O_{a.n} and O_{b.n}")
        if a.kind is not b.kind:
            return EquivalenceVerdict.DISTINCT
        if a.kind is InvariantKind.BOUNDARY:
            return EquivalenceVerdict.EXACT_EQUIVALENT if abs(a.c - b.c) <= tol else EquivalenceVerdict.DISTINCT
        return self.compare_l2(a.interior, b.interior, tol)

    def compare_l2(self, a: L2GpParam, b: L2GpParam, tol: float) -> EquivalenceVerdict:
        """Coordinatewise comparison of two l2 vectors with horizons taken from tail bounds.

        Two closed forms are compared on a growing horizon until
        sqrt(tail_a) + sqrt(tail_b) <= tol settles every later coordinate.
        When a side is only a prefix plus a tail bound, the comparison stops at
        the shortest known prefix; agreement there is EQUIVALENT_WITHIN_TOL and
        the unresolved tail slack is logged.
        """
        if a == b:
            return EquivalenceVerdict.EXACT_EQUIVALENT if a.is_closed_form else EquivalenceVerdict.EQUIVALENT_WITHIN_TOL
        if a.is_closed_form and a.family is b.family and a.seed == b.seed and a.zeta_x == b.zeta_x:
            return EquivalenceVerdict.EXACT_EQUIVALENT
        known = [length for length in (a.known_length(), b.known_length()) if length is not None]
        if known:
            horizon = min(known)
            if self._first_gap(a, b, horizon, tol) is not None:
                return EquivalenceVerdict.DISTINCT
            slack = math.sqrt(a.tail_norm_sq(horizon)) + math.sqrt(b.tail_norm_sq(horizon))
            logger.warning(
                "l2 vectors agree on %d known coordinates; tails may differ by up to %.3e", horizon, slack
            )
            return EquivalenceVerdict.EQUIVALENT_WITHIN_TOL

        horizon = 1
        while True:
            if self._first_gap(a, b, horizon, tol) is not None:
                return EquivalenceVerdict.DISTINCT
            slack = math.sqrt(a.tail_norm_sq(horizon)) + math.sqrt(b.tail_norm_sq(horizon))
            if slack <= tol:
                return EquivalenceVerdict.EXACT_EQUIVALENT
            if horizon >= self.settings.max_horizon:
                logger.warning(
                    "Closed forms agree up to coordinate %d; tails may differ by up to %.3e", horizon, slack
                )
                return EquivalenceVerdict.EQUIVALENT_WITHIN_TOL
            horizon = min(2 * horizon, self.settings.max_horizon)

    @staticmethod
    def _first_gap(a: L2GpParam, b: L2GpParam, horizon: int, tol: float) -> Optional[int]:
        """1-based index of the largest coordinate gap above tol among z_1..z_horizon."""
        diff = np.abs(a.coefficients(0, horizon) - b.coefficients(0, horizon))
        if not diff.size or float(diff.max()) <= tol:
            return None
        worst = int(np.argmax(diff)) + 1
        logger.debug("l2 vectors differ at coordinate %d by %.3e", worst, diff[worst - 1])
        return worst

    # Equivalence

    def _as_finite(self, param: GpStateParam) -> GpStateParam:
        if isinstance(param, CuntzParam):
            return _build(FiniteGpParam, self._norms, n=param.n, k=1, z=param.y)
        return param

    def _interior_finite(self, param: GpStateParam) -> bool:
        return isinstance(param, FiniteGpParam) and not self.is_boundary(param)

    def equivalent(self, p: GpStateParam, q: GpStateParam, tol: Optional[float] = None) -> EquivalenceVerdict:
        """Decide unitary equivalence of the GNS representations of two pure GP states."""
        tol = self.tolerances.comparison if tol is None else tol
        if p.n != q.n:
            raise UsageError(f"States live on different algebras: O_{p.n} and O_{q.n}")
        p, q = self._as_finite(p), self._as_finite(q)
        for param in (p, q):
            self.classify(param)
        if self._interior_finite(p) and self._interior_finite(q):
            order = p.k * q.k // math.gcd(p.k, q.k)
            logger.debug("Comparing finite parameters at common order %d", order)
            return self._compare_lifted(p, q, order, tol)
        return self.invariants_agree(self.canonicalize(p), self.canonicalize(q), tol)

    def equivalent_by_product_order(self, p: GpStateParam, q: GpStateParam, tol: Optional[float] = None) -> EquivalenceVerdict:
        """Finite x finite equivalence at order (n-1)ab, i.e. p = (m-1)(l-1) + 1."""
        tol = self.tolerances.comparison if tol is None else tol
        p, q = self._as_finite(p), self._as_finite(q)
        if not (self._interior_finite(p) and self._interior_finite(q)):
            raise UsageError("The product-order comparison needs two interior finite-order parameters")
        if p.n != q.n:
            raise UsageError(f"States live on different algebras: O_{p.n} and O_{q.n}")
        return self._compare_lifted(p, q, (p.n - 1) * p.k * q.k, tol)

    def _compare_lifted(self, p: FiniteGpParam, q: FiniteGpParam, order: int, tol: float) -> EquivalenceVerdict:
        lifted_p = self.lift_order(p, order).as_array()
        lifted_q = self.lift_order(q, order).as_array()
        if float(np.max(np.abs(lifted_p - lifted_q))) <= tol:
            return EquivalenceVerdict.EXACT_EQUIVALENT
        return EquivalenceVerdict.DISTINCT

    # Gauge action

    def gauge_transform_param(self, g, param: Union[FiniteGpParam, L2GpParam]) -> Union[FiniteGpParam, L2GpParam]:
        """g~ z: g acts on each (n-1)-block; the last finite coordinate is fixed."""
        n = param.n
        matrix = self.embeddings.check_unitary(g, n - 1)
        block = n - 1
        if isinstance(param, FiniteGpParam):
            z = param.as_array()
            head = (z[:-1].reshape(param.k, block) @ matrix.T).ravel()
            moved = np.concatenate([head, z[-1:]])
            return _build(FiniteGpParam, self._norms, n=n, k=param.k, z=moved / np.linalg.norm(moved))
        if isinstance(param, L2GpParam):
            return self._gauge_l2(matrix, param)
        raise UsageError(f"Gauge action is defined on GP parameters, got {type(param).__name__}")

    def _gauge_l2(self, matrix: np.ndarray, param: L2GpParam) -> L2GpParam:
        block = param.n - 1
        if param.family is L2Family.GEOMETRIC and (len(param.seed) - 1) % block == 0:
            seed = np.asarray(param.seed, dtype=complex)
            head = (seed[:-1].reshape(-1, block) @ matrix.T).ravel()
            moved = np.concatenate([head, seed[-1:]])
            return _build(
                L2GpParam,
                self._norms,
                n=param.n,
                family=L2Family.GEOMETRIC,
                seed=moved / np.linalg.norm(moved),
                prefix=(0j,) * len(param.prefix),
            )
        length = (len(param.prefix) // block) * block
        kept = param.coefficients(0, length)
        dropped = param.tail_norm_sq(length)
        moved = (kept.reshape(-1, block) @ matrix.T).ravel()
        logger.debug("Gauge action materialised %d coordinates, tail bound %.3e", length, dropped)
        return _build(L2GpParam, self._norms, n=param.n, family=L2Family.NONE, prefix=moved, tail_norm_sq_bound=dropped)

    # Sub-Cuntz predicates

    @staticmethod
    def _tensor_shape(vector, n: int) -> Tuple[np.ndarray, int]:
        v = np.asarray(vector, dtype=complex).ravel()
        m = 0
        size = 1
        while size < v.size:
            size *= n
            m += 1
        if size != v.size or m == 0:
            raise DimensionError(f"Length {v.size} is not a positive power of n = {n}")
        return v, m

    def is_tensor_power(self, v: np.ndarray, base: int, p: int, tol: float) -> bool:
        """Whether v = x^(tensor p) for some x in C^base."""
        stride = sum(base ** r for r in range(p))
        diagonal = v[np.arange(base) * stride]
        pivot = int(np.argmax(np.abs(diagonal)))
        if abs(diagonal[pivot]) <= tol:
            return False
        root = complex(np.abs(diagonal[pivot]) ** (1.0 / p) * np.exp(1j * np.angle(diagonal[pivot]) / p))
        tensor = v.reshape((base,) * p)
        x = tensor[(pivot,) * (p - 1)] / root ** (p - 1)
        power = reduce(np.kron, [x] * p)
        return float(np.max(np.abs(power - v))) <= tol

    def is_nonperiodic(self, vector, n: int, tol: Optional[float] = None) -> bool:
        """True iff v != x^(tensor p) for every divisor p > 1 of m, with v in (C^n)^(tensor m)."""
        tol = self.tolerances.comparison if tol is None else tol
        v, m = self._tensor_shape(vector, n)
        for p in range(2, m + 1):
            if m % p == 0 and self.is_tensor_power(v, n ** (m // p), p, tol):
                logger.debug("Vector is a %d-th tensor power", p)
                return False
        return True

    def are_conjugate(self, v_vector, w_vector, n: int, tol: Optional[float] = None) -> bool:
        """True iff v = w or v = x1 (x) x2 and w = x2 (x) x1 for some split."""
        tol = self.tolerances.comparison if tol is None else tol
        v, m = self._tensor_shape(v_vector, n)
        w, m_w = self._tensor_shape(w_vector, n)
        if m != m_w:
            raise DimensionError(f"Vectors have different tensor lengths {m} and {m_w}")
        if float(np.max(np.abs(v - w))) <= tol:
            return True
        for split in range(1, m):
            matrix = v.reshape(n ** split, n ** (m - split))
            singular = svdvals(matrix)
            if len(singular) > 1 and singular[1] > self.tolerances.rank * singular[0]:
                continue
            if float(np.max(np.abs(matrix.T.ravel() - w))) <= tol:
                return True
        return False

    # Flipped GP states

    def reverse_param(self, z: Union[FiniteGpParam, Sequence[complex]], n: Optional[int] = None):
        """Coordinate reversal of a vector of length 2n - 1."""
        if isinstance(z, FiniteGpParam):
            if z.k != 2:
                raise DimensionError(f"Reversal needs length 2n-1 = {2 * z.n - 1}, got {z.m}")
            return _build(FiniteGpParam, self._norms, n=z.n, k=2, z=z.z[::-1])
        values = tuple(complex(x) for x in z)
        if n is None or len(values) != 2 * n - 1:
            raise DimensionError(f"Reversal needs a vector of length 2n-1, got {len(values)} for n={n}")
        return values[::-1]

    def classify_flipped(self, param: FiniteGpParam) -> Classification:
        """eta_z is unique and pure iff |z_1| < 1."""
        return self.classify(self.reverse_param(param))

    # Named families

    def make_zeta_param(self, x: float) -> L2GpParam:
        """kappa_x: z_j = (zeta(x) j^x)^(-1/2) on O_2."""
        return _build(
            L2GpParam,
            self._norms,
            n=2,
            family=L2Family.ZETA,
            zeta_x=float(x),
            prefix=self._placeholder_prefix(),
        )

    def make_rho_param(self, c1: complex, c2: complex) -> FiniteGpParam:
        """rho_{c1,c2}: the order-2 GP parameter (c1, c2, 0) on O_2."""
        return _build(FiniteGpParam, self._norms, n=2, k=2, z=(complex(c1), complex(c2), 0j))
