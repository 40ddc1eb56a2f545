"""Closed-form evaluation of geometric progression states."""

import logging
import math
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.linalg import eigvalsh, svdvals
from scipy.special import zeta

from ..exceptions import (
    IndexOutOfRangeError,
    InvalidParameterError,
    NotUniqueStateError,
    TailBoundTooLooseError,
    UsageError,
)
from ..models.embedding import GpEmbedding
from ..models.moments import MomentTable
from ..models.settings import SystemSettings
from ..models.state_params import (
    CuntzParam,
    FiniteGpParam,
    GpStateParam,
    L2Family,
    L2GpParam,
    Verdict,
)
from ..models.words import Monomial, MultiIndex, NcPolynomial
from .embedding_service import EmbeddingService
from .state_param_service import StateParamService

logger = logging.getLogger(__name__)

INITIAL_HORIZON = 64


@lru_cache(maxsize=1024)
def _closed_form_table(param: FiniteGpParam) -> MomentTable:
    n, k = param.n, param.k
    z = param.as_array()
    if k == 1:
        return MomentTable(n=n, k=1, theta=[[1.0]], v=[1.0, np.conj(z[-1])])
    zm = z[-1]
    damping = 1.0 - abs(zm) ** 2
    partial = [_partial_sum(z, n, k, c) for c in range(k + 1)]
    v = [(np.conj(zm * partial[k - a]) + partial[a]) / damping for a in range(k + 1)]
    theta = np.zeros((k, k), dtype=complex)
    for a in range(k):
        for b in range(a, k):
            length = (n - 1) * (k - b)
            direct = np.vdot(z[(n - 1) * a:(n - 1) * a + length], z[(n - 1) * b:(n - 1) * b + length])
            boundary = (abs(zm) ** 2 * np.conj(partial[b - a]) + zm * partial[k - b + a]) / damping
            theta[a, b] = direct + boundary
            theta[b, a] = np.conj(theta[a, b])
    return MomentTable(n=n, k=k, theta=theta, v=v)


def _partial_sum(z: np.ndarray, n: int, k: int, c: int) -> complex:
    length = (n - 1) * (k - c)
    return complex(np.vdot(z[(n - 1) * c:(n - 1) * c + length], z[:length]))


class EvaluationService:
    """Evaluates GP states on monomials and polynomials of O_n."""

    def __init__(self, settings: SystemSettings):
        self.settings = settings
        self.tolerances = settings.tolerances
        self.embeddings = EmbeddingService(settings)
        self.params = StateParamService(settings)
        self._inner_sums = {}

    # Moment tables

    def z_partial_sum(self, param: FiniteGpParam, c: int) -> complex:
        """Z_c = sum_{r <= (n-1)(k-c)} conj(z_{(n-1)c+r}) z_r, with Z_k = 0."""
        if not 0 <= c <= param.k:
            raise IndexOutOfRangeError(f"Z_c needs 0 <= c <= k = {param.k}, got {c}")
        return _partial_sum(param.as_array(), param.n, param.k, c)

    def require_unique(self, param: GpStateParam) -> None:
        if self.params.classify(param).verdict is Verdict.BOUNDARY_MIXTURE:
            raise NotUniqueStateError(
                "Boundary parameters of order >= 2 do not determine a unique state; decompose the mixture instead"
            )

    def moment_table(self, param: FiniteGpParam) -> MomentTable:
        """Theta and the powers v_a = omega(s_n^a) in closed form."""
        self.require_unique(param)
        return _closed_form_table(param)

    # Evaluation

    def embedding_for(self, param: GpStateParam) -> GpEmbedding:
        if isinstance(param, FiniteGpParam):
            return GpEmbedding(n=param.n, order=param.k)
        if isinstance(param, L2GpParam):
            return GpEmbedding(n=param.n, order=None)
        return GpEmbedding(n=param.n, order=1)

    def evaluate_monomial(self, param: GpStateParam, monomial: Monomial) -> complex:
        """omega(s_J s_K*) = conj(z_hatJ) z_hatK omega(s_n^a (s_n^b)*)."""
        if monomial.n != param.n:
            raise UsageError(f"Monomial lives in O_{monomial.n}, state on O_{param.n}")
        if isinstance(param, CuntzParam):
            y = param.as_array()
            return complex(np.prod(np.conj(y[np.array(monomial.left.letters, dtype=int) - 1]))
                           * np.prod(y[np.array(monomial.right.letters, dtype=int) - 1]))
        embedding = self.embedding_for(param)
        left = self.embeddings.factorize_word(embedding, monomial.left)
        right = self.embeddings.factorize_word(embedding, monomial.right)
        if isinstance(param, FiniteGpParam):
            table = self.moment_table(param)
            z = param.as_array()
            coeff = np.prod(np.conj(z[np.array(left.hat_j, dtype=int) - 1])) * np.prod(z[np.array(right.hat_j, dtype=int) - 1])
            if coeff == 0:
                return 0j
            if param.k == 1:
                return complex(coeff)
            return complex(coeff * table.theta[left.tail][right.tail])
        coeff = np.conj(self._l2_word_coefficient(param, left.hat_j)) * self._l2_word_coefficient(param, right.hat_j)
        if coeff == 0:
            return 0j
        return complex(coeff * self.l2_inner_sum(param, left.tail, right.tail))

    def _l2_word_coefficient(self, param: L2GpParam, hat_j: Tuple[int, ...]) -> complex:
        known = param.known_length()
        if known is not None and any(j > known for j in hat_j):
            if param.tail_norm_sq_bound > self.tolerances.l2_evaluation ** 2:
                raise TailBoundTooLooseError(
                    f"Coordinates beyond {known} are only bounded by sqrt({param.tail_norm_sq_bound:.3e})"
                )
        coeff = 1 + 0j
        for j in hat_j:
            coeff *= param.coefficient(j)
        return coeff

    def l2_inner_sum(self, param: L2GpParam, a: int, b: int) -> complex:
        """sum_{j >= 1} conj(z_{(n-1)a+j}) z_{(n-1)b+j}, truncated with a certified error."""
        if a > b:
            return complex(np.conj(self.l2_inner_sum(param, b, a)))
        key = (param, a, b)
        if key not in self._inner_sums:
            self._inner_sums[key] = self._compute_inner_sum(param, a, b)
        return self._inner_sums[key]

    def _compute_inner_sum(self, param: L2GpParam, a: int, b: int) -> complex:
        offset_a, offset_b = (param.n - 1) * a, (param.n - 1) * b
        # |z_j| <= 1, so the word coefficient never enlarges the error
        target = self.tolerances.l2_evaluation
        if a == b and param.is_closed_form:
            return complex(param.tail_norm_sq(offset_a))
        horizon = INITIAL_HORIZON if param.is_closed_form else max(len(param.prefix) - offset_a, 0)
        while True:
            partial = complex(np.vdot(param.coefficients(offset_a, horizon), param.coefficients(offset_b, horizon)))
            if param.family is L2Family.ZETA:
                correction, error = self._zeta_tail(param.zeta_x, offset_a, offset_b, horizon)
                partial += correction
            else:
                error = math.sqrt(param.tail_norm_sq(offset_a + horizon) * param.tail_norm_sq(offset_b + horizon))
            if error < target:
                logger.debug("l2 inner sum (%d, %d) settled at horizon %d, error %.2e", a, b, horizon, error)
                return partial
            if not param.is_closed_form or horizon >= self.settings.max_horizon:
                raise TailBoundTooLooseError(
                    f"Inner sum ({a}, {b}) has tail error {error:.3e} above the target {target:.1e}"
                )
            horizon = min(2 * horizon, self.settings.max_horizon)

    @staticmethod
    def _zeta_tail(x: float, offset_a: int, offset_b: int, horizon: int) -> Tuple[float, float]:
        """sum_{j > N} f(j) / zeta(x) for f(t) = ((A+t)(B+t))^(-x/2); returns (estimate, error bound).

        Euler-Maclaurin: sum_{j>N} f(j) = int_N^inf f - f(N)/2 - f'(N)/12 + R with
        |R| <= |f'(N)|/12, since f is convex and decreasing.
        """
        def term(t: float) -> float:
            return ((offset_a + t) * (offset_b + t)) ** (-x / 2.0)

        integral, quad_error = quad(term, horizon, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
        value = term(horizon)
        slope = -0.5 * x * value * (1.0 / (offset_a + horizon) + 1.0 / (offset_b + horizon))
        norm = zeta(x)
        estimate = integral - value / 2.0 - slope / 12.0
        return estimate / norm, (abs(slope) / 12.0 + quad_error) / norm

    def evaluate_poly(self, param: GpStateParam, p: NcPolynomial) -> complex:
        """Linear extension of evaluate_monomial."""
        return complex(sum((coeff * self.evaluate_monomial(param, mono) for mono, coeff in p.items()), 0j))

    def evaluate_flipped(self, param: FiniteGpParam, monomial: Monomial) -> complex:
        """eta_z(M) = omega_{reverse z}(alpha(M)) for the flipped embedding f'."""
        reversed_param = self.params.reverse_param(param)
        return self.evaluate_monomial(reversed_param, self.embeddings.flip_monomial(param.n, monomial))

    def evaluate_convex_combination(
        self, components: Sequence[CuntzParam], weights: Sequence[float], monomial: Monomial
    ) -> complex:
        """sum_j w_j omega_{y_j}(M) for convex weights."""
        w = np.asarray(weights, dtype=float)
        if len(w) != len(components):
            raise InvalidParameterError(f"{len(components)} components but {len(w)} weights")
        if np.any(w < 0) or abs(float(w.sum()) - 1.0) > self.tolerances.unit_norm:
            raise InvalidParameterError("Weights must be non-negative and sum to 1")
        return complex(sum(weight * self.evaluate_monomial(y, monomial) for weight, y in zip(w, components)))

    # Gram matrices

    def correlation_dimension(self, param: GpStateParam) -> int:
        """Numerical rank of Theta; 1 exactly for Cuntz states."""
        if isinstance(param, CuntzParam):
            return 1
        if not isinstance(param, FiniteGpParam):
            raise UsageError("Correlation dimension is computed for finite-order parameters")
        singular = svdvals(self.moment_table(param).theta_matrix())
        return int(np.sum(singular > self.tolerances.rank * singular[0]))

    def moment_matrix(self, param: GpStateParam, words: Iterable) -> np.ndarray:
        """[omega(s_Ji s_Jj*)]_{i,j}."""
        indices: List[MultiIndex] = [w if isinstance(w, MultiIndex) else MultiIndex(tuple(w)) for w in words]
        size = len(indices)
        matrix = np.zeros((size, size), dtype=complex)
        for i in range(size):
            for j in range(i, size):
                matrix[i, j] = self.evaluate_monomial(param, Monomial(indices[i], indices[j], param.n))
                matrix[j, i] = np.conj(matrix[i, j])
        return matrix

    @staticmethod
    def min_eigenvalue(matrix: np.ndarray) -> float:
        hermitian = (matrix + matrix.conj().T) / 2.0
        return float(eigvalsh(hermitian)[0])

    def is_positive_semidefinite(self, matrix: np.ndarray) -> bool:
        return self.min_eigenvalue(matrix) >= -self.tolerances.psd

    # Covariance

    def covariance_check(self, param: GpStateParam, g, monomial: Monomial) -> float:
        """|omega_z(alpha_{g^-1}(M)) - omega_{g~ z}(M)| for g in U(n-1)."""
        full = self.embeddings.embed_unitary(g, param.n)
        inverse = full.conj().T
        moved = self.embeddings.gauge_automorphism(inverse, NcPolynomial.from_monomial(monomial))
        lhs = self.evaluate_poly(param, moved)
        rhs = self.evaluate_monomial(self.params.gauge_transform_param(g, param), monomial)
        return float(abs(lhs - rhs))
