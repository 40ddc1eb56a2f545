"""Report orchestration shared by the CLI and the HTTP surface."""

import logging
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import ValidationError

from ..exceptions import UsageError
from ..models.embedding import GpEmbedding
from ..models.report import Report
from ..models.settings import SystemSettings
from ..models.state_params import (
    CanonicalInvariant,
    CuntzParam,
    FiniteGpParam,
    GpStateParam,
    InvariantKind,
    L2GpParam,
    Verdict,
)
from ..models.words import Monomial, enumerate_monomials, format_monomial, parse_monomial
from .embedding_service import EmbeddingService
from .evaluation_service import EvaluationService
from .oracle_service import OracleService
from .spec_loader import dump_spec
from .state_param_service import MIXTURE_NOTE, StateParamService

logger = logging.getLogger(__name__)

PRINTED_COORDINATES = 16


class ReportService:
    """
    Runs one command and collects its verdicts, tables and residuals.

    Commands:
    1. classify - uniqueness and purity, mixture components at the boundary
    2. eval - moments omega(s_J s_K*), optionally re-derived by the oracle
    3. equiv - equivalence verdict with canonical invariants and witnesses
    4. canon / lift / gauge / gram / factorize - thin wrappers per operation
    """

    def __init__(self, settings: SystemSettings):
        self.settings = settings
        self.tolerances = settings.tolerances
        self.embeddings = EmbeddingService(settings)
        self.params = StateParamService(settings)
        self.evaluation = EvaluationService(settings)
        self.oracle = OracleService(settings)

    def _new_report(self, command: str, arguments: Optional[Dict[str, Any]]) -> Report:
        return Report(
            command=command,
            arguments=dict(arguments or {}),
            provenance={
                "comparison": self.tolerances.comparison,
                "boundary": self.tolerances.boundary,
                "closed_form": self.tolerances.closed_form,
                "oracle": self.tolerances.oracle,
            },
        )

    def value_tolerance(self, param: GpStateParam) -> float:
        """Tolerance attached to evaluated moments of `param`."""
        if isinstance(param, L2GpParam):
            return self.tolerances.l2_evaluation
        return self.tolerances.unit_norm

    # classify

    def classify(self, param: GpStateParam, arguments: Optional[Dict[str, Any]] = None) -> Report:
        report = self._new_report("classify", arguments)
        report.add_state("input", dump_spec(param))
        classification = self.params.classify(param)
        report.add_verdict("classification", classification.verdict)
        if isinstance(param, FiniteGpParam):
            report.add_entry("parameter", "|z_m|", abs(param.z_last), self.tolerances.boundary)
        for j, component in enumerate(classification.components, start=1):
            report.add_entry("components", f"y_{j}[n]", component.y_last, self.tolerances.unit_norm)
            report.add_state(f"component_{j}", dump_spec(component))
        if classification.verdict is Verdict.BOUNDARY_MIXTURE:
            report.notes.append(MIXTURE_NOTE)
        logger.info("✅ classify: %s", classification.verdict.value)
        return report

    # eval

    def _word_list(self, param: GpStateParam, words: Optional[List[str]], max_len: int):
        if words:
            return [(text, parse_monomial(text, param.n)) for text in words]
        return [(format_monomial(mono), mono) for mono in enumerate_monomials(param.n, max_len)]

    def evaluate(
        self,
        param: GpStateParam,
        words: Optional[List[str]] = None,
        max_len: Optional[int] = None,
        verify: bool = False,
        arguments: Optional[Dict[str, Any]] = None,
    ) -> Report:
        max_len = self.settings.default_max_len if max_len is None else max_len
        report = self._new_report("eval", arguments)
        report.add_state("input", dump_spec(param))
        tolerance = self.value_tolerance(param)
        entries = self._word_list(param, words, max_len)
        for label, monomial in entries:
            value = 0j if monomial is None else self.evaluation.evaluate_monomial(param, monomial)
            report.add_entry("moments", label, value, tolerance)
        if verify:
            self._verify(report, param, entries)
        return report

    def _verify(self, report: Report, param: GpStateParam, entries) -> None:
        if not isinstance(param, FiniteGpParam):
            report.notes.append("The moment oracle covers finite-order parameters only; nothing to verify")
            return
        closed = self.evaluation.moment_table(param)
        derived = self.oracle.oracle_moment_table(param)
        table_gap = self.oracle.table_discrepancy(closed, derived)
        word_gap = 0.0
        for _, monomial in entries:
            if monomial is not None:
                gap = abs(self.evaluation.evaluate_monomial(param, monomial) - self.oracle.oracle_evaluate(param, monomial, derived))
                word_gap = max(word_gap, gap)
        discrepancy = max(table_gap, word_gap)
        report.add_residual("oracle discrepancy", discrepancy, self.tolerances.oracle)
        ok = discrepancy <= self.tolerances.oracle
        report.add_verdict("oracle", "agree" if ok else "mismatch")
        if not ok:
            logger.error("❌ Closed form and oracle differ by %.3e", discrepancy)

    # equiv

    def _add_invariant(self, report: Report, key: str, invariant: CanonicalInvariant) -> None:
        report.add_verdict(f"invariant_{key}", invariant.kind)
        if invariant.kind is InvariantKind.BOUNDARY:
            report.add_entry(f"invariant_{key}", "c", invariant.c, self.tolerances.comparison)
            return
        coordinates = invariant.interior.coefficients(0, PRINTED_COORDINATES)
        for j, value in enumerate(coordinates, start=1):
            report.add_entry(f"invariant_{key}", f"z_{j}", value, self.tolerances.comparison)
        report.add_state(f"invariant_{key}", dump_spec(invariant.interior))

    def equivalence(
        self,
        first: GpStateParam,
        second: GpStateParam,
        witness: bool = False,
        max_len: Optional[int] = None,
        arguments: Optional[Dict[str, Any]] = None,
    ) -> Report:
        report = self._new_report("equiv", arguments)
        report.add_state("a", dump_spec(first))
        report.add_state("b", dump_spec(second))
        verdict = self.params.equivalent(first, second)
        report.add_verdict("equivalence", verdict)
        if self._both_interior_finite(first, second):
            report.add_verdict("product_order_check", self.params.equivalent_by_product_order(first, second))
        self._add_invariant(report, "a", self.params.canonicalize(first))
        self._add_invariant(report, "b", self.params.canonicalize(second))
        if witness:
            agreement = self.oracle.states_agree(first, second, max_len)
            report.add_verdict("states_agree", str(agreement.agree).lower())
            report.add_residual(f"worst residual on {agreement.worst_monomial}", agreement.worst_residual, agreement.tolerance)
            for label, residual in agreement.witnesses:
                report.add_entry("witnesses", label, residual, agreement.tolerance)
        return report

    def _both_interior_finite(self, first: GpStateParam, second: GpStateParam) -> bool:
        def interior(param: GpStateParam) -> bool:
            if isinstance(param, CuntzParam):
                return 1.0 - abs(param.y_last) >= self.tolerances.boundary
            return isinstance(param, FiniteGpParam) and not self.params.is_boundary(param)
        return interior(first) and interior(second)

    # canon / lift / gauge / gram / factorize

    def canonical(self, param: GpStateParam, arguments: Optional[Dict[str, Any]] = None) -> Report:
        report = self._new_report("canon", arguments)
        report.add_state("input", dump_spec(param))
        self._add_invariant(report, "canonical", self.params.canonicalize(param))
        return report

    def lift(self, param: FiniteGpParam, order: int, arguments: Optional[Dict[str, Any]] = None) -> Report:
        if not isinstance(param, FiniteGpParam):
            raise UsageError("lift needs a gp_finite state")
        report = self._new_report("lift", arguments)
        report.add_state("input", dump_spec(param))
        lifted = self.params.lift_order(param, order)
        report.add_state("lifted", dump_spec(lifted))
        for j, value in enumerate(lifted.z, start=1):
            report.add_entry("lifted", f"z_{j}", value, self.tolerances.unit_norm)
        if not self.params.is_boundary(param):
            report.add_verdict("equivalence", self.params.equivalent(param, lifted))
        return report

    def gauge(
        self,
        param: GpStateParam,
        g,
        max_len: Optional[int] = None,
        arguments: Optional[Dict[str, Any]] = None,
    ) -> Report:
        max_len = self.settings.default_max_len if max_len is None else max_len
        report = self._new_report("gauge", arguments)
        report.add_state("input", dump_spec(param))
        moved = self.params.gauge_transform_param(g, param)
        report.add_state("transformed", dump_spec(moved))
        worst, worst_label = 0.0, "I"
        for monomial in enumerate_monomials(param.n, max_len):
            residual = self.evaluation.covariance_check(param, g, monomial)
            if residual > worst:
                worst, worst_label = residual, format_monomial(monomial)
        report.add_residual(f"covariance worst on {worst_label}", worst, self.tolerances.covariance)
        report.add_verdict("covariance", "holds" if worst <= self.tolerances.covariance else "violated")
        return report

    def gram(self, param: GpStateParam, arguments: Optional[Dict[str, Any]] = None) -> Report:
        if isinstance(param, L2GpParam):
            raise UsageError("gram needs a finite-order or Cuntz state")
        report = self._new_report("gram", arguments)
        report.add_state("input", dump_spec(param))
        if isinstance(param, CuntzParam):
            theta = np.ones((1, 1), dtype=complex)
        else:
            theta = self.evaluation.moment_table(param).theta_matrix()
        k = theta.shape[0]
        for a in range(k):
            for b in range(k):
                report.add_entry("theta", f"theta[{a},{b}]", theta[a, b], self.tolerances.unit_norm)
        spectrum = np.linalg.eigvalsh(theta)
        for index, value in enumerate(spectrum):
            report.add_entry("spectrum", f"lambda_{index + 1}", float(value), self.tolerances.psd)
        report.add_verdict("correlation_dimension", str(self.evaluation.correlation_dimension(param)))
        report.add_verdict("positive_semidefinite", str(self.evaluation.is_positive_semidefinite(theta)).lower())
        return report

    def factorize(self, n: int, order: Optional[int], word: str, arguments: Optional[Dict[str, Any]] = None) -> Report:
        report = self._new_report("factorize", arguments)
        try:
            embedding = GpEmbedding(n=n, order=order)
        except ValidationError as e:
            raise UsageError(f"Invalid embedding n={n}, order={order}") from e
        monomial = parse_monomial(word, n)
        if monomial is None or monomial.right.letters:
            raise UsageError(f"factorize expects a word of generators s_j without adjoints, got {word!r}")
        factorization = self.embeddings.factorize_word(embedding, monomial.left)
        report.add_verdict("hat_j", " ".join(f"t{j}" for j in factorization.hat_j) or "I")
        report.add_verdict("tail", str(factorization.tail))
        expanded = self.embeddings.expand_word(embedding, factorization.hat_j).letters + (n,) * factorization.tail
        report.add_verdict("expansion_matches", str(expanded == monomial.left.letters).lower())
        return report
