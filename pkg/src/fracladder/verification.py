"""Identity checks backing the fractional factorization, and their report."""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from .config import RunConfig
from .ladder import (
    compare_printed_e2,
    energy_curve,
    excited_state,
    ground_state,
    local_energy_exact,
    node_locations,
    printed_e2_verbatim,
    printed_energy,
)
from .operators import (
    apply_A,
    apply_H,
    apply_eps,
    factorization_defect,
    kernel_defect,
    symbol_composition_defect,
)
from .powerexp import ALPHA_SWEEP, Envelope, Parity, PowerSum, random_member, relative_difference
from .spectral import (
    SampledState,
    UniformGrid,
    apply_hamiltonian_position,
    normalized,
    position_state,
    residual_momentum,
    sample,
    to_momentum,
    to_position,
)

logger = logging.getLogger(__name__)

EIGEN_MAX_LEVEL = 8
RECOVERY_MAX_LEVEL = 4
RANDOM_TERMS = 5
GAUSSIAN_X_MAX = 5.0


class CheckKind(Enum):
    """Groups of identity checks."""
    KERNEL = "kernel"
    SYMBOLS = "symbol_composition"
    FACTORIZATION = "factorization"
    CLOSED_FORM_STATE = "closed_form_state"
    PRINTED_ENERGY = "printed_energy"
    E2_PRINTED = "e2_printed"
    EIGEN = "eigen_identity"
    RECOVERY = "alpha2_recovery"
    NODE = "node"
    NUMERIC = "numeric"


@dataclass
class CheckRecord:
    """Outcome of a single check."""
    name: str
    kind: CheckKind
    alpha: Optional[float]
    n: Optional[int]
    residual: float
    tolerance: float
    passed: bool
    detail: str = ""

    @classmethod
    def measure(
        cls,
        name: str,
        kind: CheckKind,
        alpha: Optional[float],
        n: Optional[int],
        residual: float,
        tolerance: float,
        detail: str = "",
    ) -> "CheckRecord":
        """Passes when 0 < tolerance and residual <= tolerance."""
        residual = float(residual)
        passed = bool(tolerance > 0 and np.isfinite(residual) and residual <= tolerance)
        return cls(name, kind, alpha, n, residual, float(tolerance), passed, detail)

    def to_dict(self) -> Dict:
        data = asdict(self)
        data['kind'] = self.kind.value
        return data


@dataclass
class VerificationReport:
    """All check records of one verify run."""
    records: List[CheckRecord]
    engine_version: str
    timestamp: str = field(default_factory=lambda: datetime.now().isoformat())
    e2_comparison: List[Dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failing(self) -> List[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def summary_by_kind(self) -> Dict[str, Dict[str, int]]:
        summary: Dict[str, Dict[str, int]] = {}
        for record in self.records:
            entry = summary.setdefault(record.kind.value, {'total': 0, 'passed': 0})
            entry['total'] += 1
            entry['passed'] += int(record.passed)
        return summary

    def to_dict(self) -> Dict:
        return {
            'engine_version': self.engine_version,
            'timestamp': self.timestamp,
            'passed': self.passed,
            'summary': self.summary_by_kind(),
            'records': [r.to_dict() for r in self.records],
            'e2_comparison': self.e2_comparison,
        }

    def save(self, path: Path) -> None:
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")


class VerificationSuite:
    """Runs every identity check for a RunConfig."""

    def __init__(self, config: RunConfig, engine_version: str = "0.0.0"):
        """Initialize the suite.

        Args:
            config: Validated run configuration
            engine_version: Version stamped into the report
        """
        self.config = config
        self.tol = config.tolerances
        self.engine_version = engine_version
        self.sweep = tuple(sorted(set(ALPHA_SWEEP) | set(config.alphas)))
        self.grid = UniformGrid(config.k_max, config.points)

    def groups(self) -> Dict[CheckKind, Callable[[], List[CheckRecord]]]:
        """Check groups in execution order."""
        return {
            CheckKind.KERNEL: self.check_kernel,
            CheckKind.SYMBOLS: self.check_symbols,
            CheckKind.FACTORIZATION: self.check_factorization,
            CheckKind.CLOSED_FORM_STATE: self.check_closed_form_states,
            CheckKind.PRINTED_ENERGY: self.check_printed_energies,
            CheckKind.E2_PRINTED: self.check_printed_e2,
            CheckKind.EIGEN: self.check_eigen_identity,
            CheckKind.RECOVERY: self.check_recovery,
            CheckKind.NODE: self.check_nodes,
            CheckKind.NUMERIC: self.check_numeric,
        }

    def run(self, progress: Optional[Callable[[str, str, str], None]] = None) -> VerificationReport:
        """Run all groups; progress(kind, status, detail) is called around each."""
        records: List[CheckRecord] = []
        for kind, check in self.groups().items():
            if progress:
                progress(kind.value, "running", "")
            group = check()
            failed = sum(1 for r in group if not r.passed)
            for record in group:
                if not record.passed:
                    logger.warning("check %s failed: residual %.3g > %.3g", record.name,
                                   record.residual, record.tolerance)
            if progress:
                progress(kind.value, "error" if failed else "done",
                         f"{len(group) - failed}/{len(group)} passed")
            records.extend(group)
        report = VerificationReport(records, self.engine_version)
        if self.config.verbatim_e2:
            report.e2_comparison = self.e2_divergence()
        return report

    def _per_alpha(self, job: Callable[[float], List[CheckRecord]]) -> List[CheckRecord]:
        """Run a per-alpha job concurrently; results keep sweep order."""
        with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
            batches = list(pool.map(job, self.sweep))
        return [record for batch in batches for record in batch]

    def check_kernel(self) -> List[CheckRecord]:
        def job(alpha: float) -> List[CheckRecord]:
            return [CheckRecord.measure(f"A phi_0 = 0 (alpha={alpha})", CheckKind.KERNEL, alpha, 0,
                                        kernel_defect(ground_state(alpha)), self.tol.kernel)]
        return self._per_alpha(job)

    def check_symbols(self) -> List[CheckRecord]:
        def job(alpha: float) -> List[CheckRecord]:
            records = [CheckRecord.measure(f"symbol composition (alpha={alpha})", CheckKind.SYMBOLS,
                                           alpha, None, symbol_composition_defect(alpha), self.tol.closed_form)]
            records.append(CheckRecord.measure(f"c*gamma = 1 (alpha={alpha})", CheckKind.SYMBOLS,
                                               alpha, None, Envelope(alpha).identity_defect(),
                                               self.tol.closed_form))
            return records
        return self._per_alpha(job)

    def check_factorization(self) -> List[CheckRecord]:
        def job(alpha: float) -> List[CheckRecord]:
            rng = np.random.default_rng([self.config.seed, int(round(alpha * 1000))])
            worst = 0.0
            for _ in range(self.config.random_members):
                worst = max(worst, factorization_defect(random_member(alpha, RANDOM_TERMS, rng)))
            for n in (0, 2):
                worst = max(worst, factorization_defect(excited_state(alpha, n)))
            return [CheckRecord.measure(f"H = BA + eps on {self.config.random_members} members (alpha={alpha})",
                                        CheckKind.FACTORIZATION, alpha, None, worst, self.tol.factorization)]
        return self._per_alpha(job)

    def check_closed_form_states(self) -> List[CheckRecord]:
        def job(alpha: float) -> List[CheckRecord]:
            half = alpha / 2.0
            expected = {
                1: PowerSum.monomial(-2j, half, Parity.ODD),
                2: PowerSum.monomial(alpha, half - 1.0) + PowerSum.monomial(-4.0, alpha),
            }
            return [
                CheckRecord.measure(f"phi_{n} closed form (alpha={alpha})", CheckKind.CLOSED_FORM_STATE, alpha, n,
                                    relative_difference(excited_state(alpha, n).body, body), self.tol.closed_form)
                for n, body in expected.items()
            ]
        return self._per_alpha(job)

    def check_printed_energies(self) -> List[CheckRecord]:
        def job(alpha: float) -> List[CheckRecord]:
            records = []
            for n in (0, 1, 2):
                exact = local_energy_exact(alpha, n)
                printed = printed_energy(alpha, n)
                defect = relative_difference(exact.numerator * printed.denominator,
                                             printed.numerator * exact.denominator)
                label = "canonical E_2" if n == 2 else f"printed E_{n}"
                records.append(CheckRecord.measure(f"{label} matches H phi/phi (alpha={alpha})",
                                                   CheckKind.PRINTED_ENERGY, alpha, n, defect, self.tol.energy))
            return records
        return self._per_alpha(job)

    def check_printed_e2(self) -> List[CheckRecord]:
        """Printed E_2 agrees with the canonical form at |k| = 1 and at alpha = 2."""
        def job(alpha: float) -> List[CheckRecord]:
            canonical = printed_energy(alpha, 2)
            at_one = max(abs(printed_e2_verbatim(alpha, k) - canonical.evaluate(k)) / abs(canonical.evaluate(k))
                         for k in (-1.0, 1.0))
            records = [CheckRecord.measure(f"printed E_2 at |k|=1 (alpha={alpha})", CheckKind.E2_PRINTED,
                                           alpha, 2, at_one, self.tol.energy)]
            if alpha == 2.0:
                k = self._energy_grid()
                comparison = compare_printed_e2(alpha, k)
                records.append(CheckRecord.measure("printed E_2 = 5 at alpha=2", CheckKind.E2_PRINTED, alpha, 2,
                                                   float(np.max(np.abs(comparison.verbatim - 5.0))) / 5.0,
                                                   self.tol.recovery))
            return records
        return self._per_alpha(job)

    def check_eigen_identity(self) -> List[CheckRecord]:
        def job(alpha: float) -> List[CheckRecord]:
            records = []
            for n in range(EIGEN_MAX_LEVEL + 1):
                state = excited_state(alpha, n)
                energy = local_energy_exact(alpha, n)
                defect = relative_difference(apply_H(state).body * energy.denominator,
                                             energy.numerator * state.body)
                records.append(CheckRecord.measure(f"H phi_{n} = E_{n} phi_{n} (alpha={alpha})",
                                                   CheckKind.EIGEN, alpha, n, defect, self.tol.eigen))
            return records
        return self._per_alpha(job)

    def check_recovery(self) -> List[CheckRecord]:
        """Conventional oscillator limits at alpha = 2."""
        records = []
        k = self._energy_grid()
        for n in range(RECOVERY_MAX_LEVEL + 1):
            curve = energy_curve(2.0, n, k)
            expected = 2 * n + 1
            records.append(CheckRecord.measure(f"E_{n} = {expected} at alpha=2", CheckKind.RECOVERY, 2.0, n,
                                               float(np.max(np.abs(curve.energy - expected))) / expected,
                                               self.tol.recovery))
        phi0 = ground_state(2.0)
        records.append(CheckRecord.measure("eps = 1 at alpha=2", CheckKind.RECOVERY, 2.0, 0,
                                           relative_difference(apply_eps(phi0).body, phi0.body),
                                           self.tol.recovery))
        for n in range(1, RECOVERY_MAX_LEVEL + 1):
            lowered = apply_A(excited_state(2.0, n)).body
            expected_body = excited_state(2.0, n - 1).body.scaled(2 * n)
            records.append(CheckRecord.measure(f"A phi_{n} = {2 * n} phi_{n - 1} at alpha=2", CheckKind.RECOVERY,
                                               2.0, n, relative_difference(lowered, expected_body),
                                               self.tol.recovery))
        return records

    def check_nodes(self) -> List[CheckRecord]:
        def job(alpha: float) -> List[CheckRecord]:
            expected = (alpha / 4.0) ** (2.0 / (alpha + 2.0))
            nodes = node_locations(alpha, 2)
            if len(nodes) != 1:
                return [CheckRecord(f"phi_2 node (alpha={alpha})", CheckKind.NODE, alpha, 2, float("inf"),
                                    self.tol.node, False, f"expected one node, found {len(nodes)}")]
            state = excited_state(alpha, 2)
            peak = float(np.max(np.abs(sample(state, self.grid).values)))
            value = abs(state.evaluate(nodes[0])) / peak
            return [
                CheckRecord.measure(f"phi_2 node position (alpha={alpha})", CheckKind.NODE, alpha, 2,
                                    abs(nodes[0] - expected), self.tol.node, f"node at {nodes[0]:.12f}"),
                CheckRecord.measure(f"phi_2 vanishes at node (alpha={alpha})", CheckKind.NODE, alpha, 2,
                                    value, self.tol.node),
            ]
        return self._per_alpha(job)

    def check_numeric(self) -> List[CheckRecord]:
        """Transform round trip, alpha = 2 Gaussian, and momentum residuals."""
        records = []
        phi0 = sample(ground_state(2.0), self.grid, 0)
        back = to_momentum(to_position(phi0))
        records.append(CheckRecord.measure("transform round trip", CheckKind.NUMERIC, 2.0, 0,
                                           np.max(np.abs(back.values - phi0.values)) / np.max(np.abs(phi0.values)),
                                           self.tol.roundtrip))
        psi0 = position_state(2.0, 0, self.grid)
        x = self.grid.x_points
        window = np.abs(x) <= GAUSSIAN_X_MAX
        reference = normalized(SampledState(self.grid, np.exp(-x ** 2 / 2.0), 2.0, 0, psi0.representation))
        error = np.max(np.abs(psi0.values[window] - reference.values[window]) / np.abs(reference.values[window]))
        records.append(CheckRecord.measure("psi_0 = exp(-x^2/2) at alpha=2", CheckKind.NUMERIC, 2.0, 0,
                                           error, self.tol.gaussian))
        hamiltonian = apply_hamiltonian_position(psi0)
        records.append(CheckRecord.measure("-d^2/dx^2 psi_0 + x^2 psi_0 = psi_0 at alpha=2", CheckKind.NUMERIC,
                                           2.0, 0,
                                           np.max(np.abs(hamiltonian.values[window] - psi0.values[window]))
                                           / np.max(np.abs(psi0.values)),
                                           self.tol.gaussian))

        jobs = [(alpha, n) for alpha in self.config.alphas for n in self.config.levels]

        def job(pair):
            alpha, n = pair
            residual = residual_momentum(alpha, n, self.grid, origin_window=self.config.residual_origin_window,
                                         max_level=self.config.max_level)
            return CheckRecord.measure(f"momentum residual phi_{n} (alpha={alpha})", CheckKind.NUMERIC,
                                       alpha, n, residual, self.tol.residual,
                                       f"|k| >= {self.config.residual_origin_window}, node windows 5 dk")

        with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
            records.extend(pool.map(job, jobs))
        return records

    def e2_divergence(self) -> List[Dict]:
        """Where the printed E_2 departs from the canonical form, per alpha."""
        k = self._energy_grid()
        return [compare_printed_e2(alpha, k[k > 0]).to_dict() for alpha in self.sweep]

    def _energy_grid(self) -> np.ndarray:
        k = self.grid.k_points
        return k[np.abs(k) <= self.config.energy_k_max]
