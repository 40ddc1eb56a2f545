"""Independent moment oracle: the defining recursions solved directly.

Nothing here calls the closed-form moment formulas. Moments of s_n come
from the coupled relations v_a = Z_a + conj(z_m v_{k-a}) as a real linear
system, and Theta is unrolled step by step down to its boundary term.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgError, solve

from ..exceptions import (
    DimensionError,
    IndexOutOfRangeError,
    NotIsometryFamilyError,
    OracleMismatchError,
    SingularSystemError,
    UsageError,
)
from ..models.moments import AgreementResult, MomentTable
from ..models.settings import SystemSettings
from ..models.state_params import CuntzParam, FiniteGpParam, GpStateParam
from ..models.words import Monomial, enumerate_monomials, format_monomial, polynomials_equal
from .embedding_service import EmbeddingService
from .evaluation_service import EvaluationService

logger = logging.getLogger(__name__)

WITNESS_COUNT = 5


class OracleService:
    """Recomputes moments and compares states monomial by monomial."""

    def __init__(self, settings: SystemSettings):
        self.settings = settings
        self.tolerances = settings.tolerances
        self.embeddings = EmbeddingService(settings)
        self.evaluation = EvaluationService(settings)

    @staticmethod
    def naive_partial_sum(param: FiniteGpParam, c: int) -> complex:
        """Z_c by an explicit double loop over blocks."""
        n, k, z = param.n, param.k, param.z
        total = 0j
        for block in range(k - c):
            for i in range(1, n):
                r = (n - 1) * block + i
                total += z[(n - 1) * c + r - 1].conjugate() * z[r - 1]
        return total

    def moments_by_linear_system(self, param: FiniteGpParam) -> np.ndarray:
        """Solve v_a - conj(z_m) conj(v_{k-a}) = Z_a, a = 0..k, in 2(k+1) real unknowns."""
        self.evaluation.require_unique(param)
        k = param.k
        w = param.z_last.conjugate()
        size = k + 1
        system = np.eye(2 * size)
        rhs = np.zeros(2 * size)
        for a in range(size):
            partner = k - a
            # Unknowns are laid out as (Re v_0, Im v_0, Re v_1, ...)
            system[2 * a, 2 * partner] -= w.real
            system[2 * a, 2 * partner + 1] -= w.imag
            system[2 * a + 1, 2 * partner] -= w.imag
            system[2 * a + 1, 2 * partner + 1] += w.real
            z_a = self.naive_partial_sum(param, a) if a < k else 0j
            rhs[2 * a], rhs[2 * a + 1] = z_a.real, z_a.imag
        try:
            solution = solve(system, rhs)
        except LinAlgError as e:
            raise SingularSystemError(f"Moment system is singular for |z_m| = {abs(param.z_last)!r}") from e
        return solution[0::2] + 1j * solution[1::2]

    def theta_by_recursion(self, param: FiniteGpParam, a: int, b: int, v: Optional[np.ndarray] = None) -> complex:
        """Theta_{a,b} = sum_i conj(z_{(n-1)a+i}) z_{(n-1)b+i} + Theta_{a+1,b+1}, ending at z_m v_{k-b+a}."""
        n, k, z = param.n, param.k, param.z
        if not 0 <= a <= b <= k - 1:
            raise IndexOutOfRangeError(f"Theta recursion needs 0 <= a <= b <= k-1 = {k - 1}, got ({a}, {b})")
        if v is None:
            v = self.moments_by_linear_system(param)
        total = 0j
        row, col = a, b
        while col < k:
            for i in range(1, n):
                total += z[(n - 1) * row + i - 1].conjugate() * z[(n - 1) * col + i - 1]
            row, col = row + 1, col + 1
        return total + param.z_last * v[k - b + a]

    def oracle_moment_table(self, param: FiniteGpParam) -> MomentTable:
        if param.k == 1:
            return MomentTable(n=param.n, k=1, theta=[[1.0]], v=[1.0, param.z_last.conjugate()])
        v = self.moments_by_linear_system(param)
        k = param.k
        theta = np.zeros((k, k), dtype=complex)
        for a in range(k):
            for b in range(a, k):
                theta[a, b] = self.theta_by_recursion(param, a, b, v)
                theta[b, a] = np.conj(theta[a, b])
        return MomentTable(n=param.n, k=k, theta=theta, v=v)

    def oracle_evaluate(self, param: FiniteGpParam, monomial: Monomial, table: Optional[MomentTable] = None) -> complex:
        """omega(s_J s_K*) from the oracle table."""
        table = table or self.oracle_moment_table(param)
        embedding = self.evaluation.embedding_for(param)
        left = self.embeddings.factorize_word(embedding, monomial.left)
        right = self.embeddings.factorize_word(embedding, monomial.right)
        coeff = 1 + 0j
        for j in left.hat_j:
            coeff *= param.z[j - 1].conjugate()
        for j in right.hat_j:
            coeff *= param.z[j - 1]
        return coeff * table.theta[left.tail][right.tail]

    @staticmethod
    def table_discrepancy(first: MomentTable, second: MomentTable) -> float:
        """Entrywise maximum difference of Theta and v."""
        if (first.n, first.k) != (second.n, second.k):
            raise DimensionError("Moment tables have different shapes")
        theta = np.max(np.abs(first.theta_matrix() - second.theta_matrix()))
        powers = np.max(np.abs(first.v_vector() - second.v_vector()))
        return float(max(theta, powers))

    def verify_table(self, param: FiniteGpParam) -> float:
        """Closed form vs oracle discrepancy; raises above the oracle tolerance."""
        discrepancy = self.table_discrepancy(self.evaluation.moment_table(param), self.oracle_moment_table(param))
        if discrepancy > self.tolerances.oracle:
            raise OracleMismatchError(f"Closed form and oracle differ by {discrepancy:.3e}")
        return discrepancy

    def states_agree(
        self, p: GpStateParam, q: GpStateParam, max_len: Optional[int] = None, tol: Optional[float] = None
    ) -> AgreementResult:
        """Compare omega_p and omega_q on every s_J s_K* with |J| + |K| <= max_len."""
        max_len = self.settings.default_max_len if max_len is None else max_len
        tol = self.tolerances.comparison if tol is None else tol
        if p.n != q.n:
            raise UsageError(f"States live on different algebras: O_{p.n} and O_{q.n}")
        residuals: List[Tuple[float, Monomial]] = []
        checked = 0
        for monomial in enumerate_monomials(p.n, max_len):
            diff = abs(self.evaluation.evaluate_monomial(p, monomial) - self.evaluation.evaluate_monomial(q, monomial))
            residuals.append((diff, monomial))
            checked += 1
        residuals.sort(key=lambda item: -item[0])
        worst, worst_monomial = residuals[0]
        logger.debug("Compared %d monomials, worst residual %.3e on %s", checked, worst, worst_monomial)
        return AgreementResult(
            agree=worst <= tol,
            worst_residual=worst,
            worst_monomial=format_monomial(worst_monomial),
            checked=checked,
            max_len=max_len,
            tolerance=tol,
            witnesses=[(format_monomial(mono), diff) for diff, mono in residuals[:WITNESS_COUNT]],
        )

    def verify_embedding_identity(
        self,
        f_images: Sequence[Monomial],
        z: Sequence[complex],
        g_images: Sequence[Monomial],
        y: Sequence[complex],
        tol: Optional[float] = None,
    ) -> bool:
        """f(t(z)) == g(u(y)) as polynomials of O_n."""
        tol = self.tolerances.comparison if tol is None else tol
        for label, images in (("f", f_images), ("g", g_images)):
            if not images:
                raise NotIsometryFamilyError(f"Image family {label} is empty")
            if not self.embeddings.is_isometry_family(images):
                raise NotIsometryFamilyError(f"Images of {label} do not satisfy t_i* t_j = delta_ij I")
        n = f_images[0].n
        lhs = self.embeddings.generating_polynomial(f_images, z, n)
        rhs = self.embeddings.generating_polynomial(g_images, y, n)
        return polynomials_equal(lhs, rhs, tol)
