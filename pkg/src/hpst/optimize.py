"""Exhaustive grid search over one to three field parameters.

A parameter either sets a group of Larmor frequencies to a common value
(e.g. ``omega_1 = omega_N``) or sets the strength ``b`` of a current pair
at a fixed distance.  Every grid point is evaluated by building the sector
matrix, diagonalizing it and scanning for peaks within the time window.
Selection uses a total order with full tie-breaks, so the outcome does not
depend on evaluation order or on parallelism.
"""

from __future__ import annotations

import enum
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .currents import CurrentSystem, field_from_currents
from .dynamics import (
    DEFAULT_PC_TOLERANCE,
    DEFAULT_TAU_STEP,
    DEFAULT_THRESHOLD,
    HpstReport,
    scan_peaks,
)
from .errors import DomainError
from .hamiltonian import build_sector_matrix
from .model import ChainSpec, FieldProfile
from .spectral import decompose

JOBS_ENV = "HPST_JOBS"
PARETO_LIMIT = 10**7
GRID_DECIMALS = 12


def default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise DomainError(f"{JOBS_ENV} must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class Parameter:
    """One scanned value bound to ``nodes`` (tied omegas) or to a current pair at ``current_xi``."""

    lo: float
    hi: float
    step: float = 0.001
    nodes: tuple[int, ...] = ()
    current_xi: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(int(n) for n in self.nodes))
        if not self.step > 0:
            raise DomainError(f"parameter step must be positive, got {self.step}")
        if self.lo > self.hi:
            raise DomainError(f"parameter range is empty: [{self.lo}, {self.hi}]")
        if bool(self.nodes) == (self.current_xi is not None):
            raise DomainError("a parameter binds either omega nodes or a current distance")

    @property
    def name(self) -> str:
        if self.current_xi is not None:
            return f"b@xi={self.current_xi:g}"
        return "omega_" + "=".join(str(n) for n in self.nodes)

    def grid(self, lo: float | None = None, hi: float | None = None, step: float | None = None):
        lo = self.lo if lo is None else lo
        hi = self.hi if hi is None else hi
        step = self.step if step is None else step
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [round(lo + k * step, GRID_DECIMALS) for k in range(count)]


class ObjectiveKind(str, enum.Enum):
    PROBABILITY_FIRST = "probability_first"
    CONCURRENCE_FIRST = "concurrence_first"
    WEIGHTED = "weighted"


@dataclass(frozen=True)
class Objective:
    """Selection rule.

    ``*_FIRST``: among points whose peak reaches the threshold, earliest peak
    wins, then higher peak.  ``WEIGHTED``: maximize
    ``w_amp * peak - w_time * tau / window`` for ``quantity``
    (``"probability"`` or ``"concurrence"``).
    """

    kind: ObjectiveKind = ObjectiveKind.PROBABILITY_FIRST
    w_amp: float = 1.0
    w_time: float = 0.0
    quantity: str = "probability"

    def __post_init__(self):
        object.__setattr__(self, "kind", ObjectiveKind(self.kind))
        if self.kind is ObjectiveKind.PROBABILITY_FIRST:
            object.__setattr__(self, "quantity", "probability")
        elif self.kind is ObjectiveKind.CONCURRENCE_FIRST:
            object.__setattr__(self, "quantity", "concurrence")
        if self.quantity not in ("probability", "concurrence"):
            raise DomainError(f"unknown objective quantity {self.quantity!r}")


@dataclass(frozen=True)
class SearchSpace:
    parameters: tuple[Parameter, ...]
    window: float
    source: int
    target: int
    objective: Objective = Objective()
    concurrence_window: float | None = None
    threshold: float = DEFAULT_THRESHOLD
    pc_tolerance: float = DEFAULT_PC_TOLERANCE
    tau_step: float = DEFAULT_TAU_STEP
    base_field: FieldProfile | None = None
    refine: bool = False
    max_evaluations: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "parameters", tuple(self.parameters))
        if not 1 <= len(self.parameters) <= 3:
            raise DomainError(f"1 to 3 parameters are supported, got {len(self.parameters)}")
        seen_nodes: set[int] = set()
        seen_xi: set[float] = set()
        for p in self.parameters:
            if seen_nodes & set(p.nodes):
                raise DomainError(f"parameter {p.name} overlaps another binding")
            seen_nodes |= set(p.nodes)
            if p.current_xi is not None:
                if p.current_xi in seen_xi:
                    raise DomainError(f"two parameters bind the current at xi={p.current_xi}")
                seen_xi.add(p.current_xi)
        if not self.window > 0:
            raise DomainError(f"window must be positive, got {self.window}")

    def grid_size(self) -> int:
        return math.prod(len(p.grid()) for p in self.parameters)

    def field_for(self, chain: ChainSpec, values: Sequence[float]) -> FieldProfile:
        n = chain.n_nodes
        omegas = list(self.base_field.omegas) if self.base_field else [0.0] * n
        if len(omegas) != n:
            raise DomainError(f"base field has {len(omegas)} values, chain has {n} nodes")
        currents = []
        for p, v in zip(self.parameters, values):
            for node in p.nodes:
                if not 1 <= node <= n:
                    raise DomainError(f"parameter {p.name} binds node {node} outside [1, {n}]")
                omegas[node - 1] = v
            if p.current_xi is not None:
                currents.append((v, p.current_xi))
        if currents:
            extra = field_from_currents(CurrentSystem(tuple(currents), n)).omegas
            omegas = [w + e for w, e in zip(omegas, extra)]
        return FieldProfile(tuple(omegas))


def evaluate_point(chain: ChainSpec, space: SearchSpace, values: Sequence[float]) -> HpstReport:
    spec = decompose(build_sector_matrix(chain, space.field_for(chain, values)))
    return scan_peaks(
        spec,
        space.source,
        space.target,
        space.window,
        space.concurrence_window,
        tau_step=space.tau_step,
        threshold=space.threshold,
        pc_tolerance=space.pc_tolerance,
    )


def _evaluate_batch(chain, space, batch):
    return [evaluate_point(chain, space, values) for values in batch]


def _peak_of(report: HpstReport, quantity: str):
    return report.probability if quantity == "probability" else report.concurrence


def selection_key(objective: Objective, values: tuple[float, ...], report: HpstReport) -> tuple:
    """Smaller is better.  Ties fall through to the parameter vector itself."""
    peak = _peak_of(report, objective.quantity)
    if objective.kind is ObjectiveKind.WEIGHTED:
        score = objective.w_amp * peak.value - objective.w_time * peak.tau / peak.window
        return (0, -score, peak.tau, values)
    if peak.present:
        return (0, peak.tau, -peak.value, values)
    return (1, -peak.value, peak.tau, values)


def pareto_front(points, quantity: str):
    """Points not dominated in (peak value up, peak time down), ordered by time."""
    ordered = sorted(
        points,
        key=lambda pr: (_peak_of(pr[1], quantity).tau, -_peak_of(pr[1], quantity).value, pr[0]),
    )
    front = []
    best = -math.inf
    for values, report in ordered:
        value = _peak_of(report, quantity).value
        if value > best:
            front.append((values, report))
            best = value
    return front


@dataclass(frozen=True)
class SearchResult:
    best_parameters: tuple[float, ...]
    report: HpstReport
    evaluations: int
    found: bool
    best_p_peak: float
    pareto_front: list | None = field(default=None, compare=False)

    def to_dict(self, names: Sequence[str] = ()) -> dict:
        out = {
            "best_parameters": list(self.best_parameters),
            "parameter_names": list(names),
            "found": self.found,
            "evaluations": self.evaluations,
            "best_p_peak": self.best_p_peak,
            "report": self.report.to_dict(),
        }
        if self.pareto_front is not None:
            out["pareto_front"] = [
                {"parameters": list(v), "report": r.to_dict()} for v, r in self.pareto_front
            ]
        return out


def _run(chain, space, points, jobs):
    if jobs <= 1 or len(points) < 2 * jobs:
        return _evaluate_batch(chain, space, points)
    size = math.ceil(len(points) / (4 * jobs))
    batches = [points[i : i + size] for i in range(0, len(points), size)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = pool.map(_evaluate_batch, [chain] * len(batches), [space] * len(batches), batches)
        return [r for batch in results for r in batch]


def grid_search(chain: ChainSpec, space: SearchSpace, jobs: int | None = None) -> SearchResult:
    jobs = default_jobs() if jobs is None else jobs
    total = space.grid_size()
    if space.max_evaluations is not None and total > space.max_evaluations:
        raise DomainError(
            f"grid has {total} points, above the evaluation budget {space.max_evaluations}"
        )
    # fail fast on bad bindings before spawning work
    space.field_for(chain, [p.lo for p in space.parameters])

    points = list(itertools.product(*(p.grid() for p in space.parameters)))
    evaluated = list(zip(points, _run(chain, space, points, jobs)))

    if space.refine:
        incumbent = min(evaluated, key=lambda pr: selection_key(space.objective, *pr))[0]
        axes = []
        for p, v in zip(space.parameters, incumbent):
            fine = p.step / 10.0
            lo = max(p.lo, round(v - 10 * p.step, GRID_DECIMALS))
            hi = min(p.hi, round(v + 10 * p.step, GRID_DECIMALS))
            axes.append(p.grid(lo, hi, fine))
        known = set(points)
        extra = [pt for pt in itertools.product(*axes) if pt not in known]
        evaluated += list(zip(extra, _run(chain, space, extra, jobs)))

    best_values, best_report = min(evaluated, key=lambda pr: selection_key(space.objective, *pr))
    peak = _peak_of(best_report, space.objective.quantity)
    found = space.objective.kind is ObjectiveKind.WEIGHTED or peak.present
    front = None
    if len(evaluated) <= PARETO_LIMIT:
        front = pareto_front(evaluated, space.objective.quantity)
    return SearchResult(
        best_parameters=tuple(best_values),
        report=best_report,
        evaluations=len(evaluated),
        found=found,
        best_p_peak=max(r.probability.value for _, r in evaluated),
        pareto_front=front,
    )
