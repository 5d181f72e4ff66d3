"""Transfer amplitudes, probabilities, concurrences and HPST peak detection.

The amplitude from node ``n`` to node ``m`` is

    f_nm(tau) = sum_j u_nj u_mj exp(-i lambda_j tau / 2)

with ``(lambda_j, u_j)`` the eigenpairs of the sector matrix ``D``.  The
constant ``-Gamma/2`` shift of the Hamiltonian only contributes a global
phase and is omitted.  Node indices are 1-based throughout.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DomainError
from .spectral import SpectralDecomposition

DEFAULT_TAU_STEP = 0.001
DEFAULT_THRESHOLD = 0.9
DEFAULT_PC_TOLERANCE = 0.05
PEAK_TIE_TOL = 1e-12
DEFAULT_CHUNK = 100_000
PHASE_BLOCK = 512


def _check_node(spec: SpectralDecomposition, node: int, name: str = "node") -> int:
    if not 1 <= node <= spec.size:
        raise DomainError(f"{name} must lie in [1, {spec.size}], got {node}")
    return node - 1


@dataclass(frozen=True)
class Amplitude:
    magnitude: float
    phase: float

    @classmethod
    def from_complex(cls, z: complex) -> Amplitude:
        phase = math.atan2(z.imag, z.real)
        if phase <= -math.pi:
            phase = math.pi
        return cls(abs(z), phase)


def _amplitude_block(spec, source: int, nodes: Sequence[int], taus: np.ndarray) -> np.ndarray:
    """Complex amplitudes ``f_{source, m}`` for 0-based ``nodes``, shape (len(taus), len(nodes))."""
    u = spec.eigenvectors
    coef = (u[source, :] * u[nodes, :]).T
    phases = np.exp(-0.5j * np.outer(taus, spec.eigenvalues))
    return phases @ coef


def _grid_phases(eigenvalues: np.ndarray, start: float, step: float, lo: int, hi: int) -> np.ndarray:
    """``exp(-i lambda tau_k / 2)`` for grid points ``lo <= k < hi``, shape (hi - lo, N).

    Grid index ``k = lo + q*B + r`` factors the phase into a coarse row and a
    fine row, so only ``(hi - lo)/B + B`` complex exponentials are evaluated.
    """
    count = hi - lo
    block = min(PHASE_BLOCK, count)
    rows = -(-count // block)
    coarse_t = start + (lo + block * np.arange(rows, dtype=float)) * step
    coarse = np.exp(-0.5j * np.outer(coarse_t, eigenvalues))
    fine = np.exp(-0.5j * np.outer(np.arange(block, dtype=float) * step, eigenvalues))
    phases = coarse[:, None, :] * fine[None, :, :]
    return phases.reshape(rows * block, -1)[:count]


def amplitude(spec: SpectralDecomposition, n: int, m: int, tau: float) -> Amplitude:
    i = _check_node(spec, n, "n")
    j = _check_node(spec, m, "m")
    # order the pair so f_nm and f_mn are bitwise identical
    i, j = min(i, j), max(i, j)
    z = _amplitude_block(spec, i, [j], np.array([float(tau)]))[0, 0]
    return Amplitude.from_complex(complex(z))


def probability(spec: SpectralDecomposition, n: int, m: int, tau: float) -> float:
    return amplitude(spec, n, m, tau).magnitude ** 2


def fidelity(amp: Amplitude, zero_phase: bool = True) -> float:
    """Averaged transfer fidelity ``|f| cos(arg f)/3 + |f|^2/6 + 1/2``.

    With ``zero_phase`` the phase is assumed compensated (set to zero).
    """
    cos_phase = 1.0 if zero_phase else math.cos(amp.phase)
    return amp.magnitude * cos_phase / 3.0 + amp.magnitude**2 / 6.0 + 0.5


def concurrence(spec: SpectralDecomposition, k0: int, n: int, m: int, tau: float) -> float:
    """Concurrence between nodes ``n`` and ``m`` after exciting ``k0``."""
    if n == m:
        raise DomainError(f"concurrence needs two distinct nodes, got n = m = {n}")
    _check_node(spec, k0, "k0")
    return 2.0 * math.sqrt(probability(spec, k0, n, tau) * probability(spec, k0, m, tau))


# -- curves -----------------------------------------------------------------


def _pair_key(pair: Sequence[int]) -> tuple[int, int]:
    a, b = int(pair[0]), int(pair[1])
    return (a, b)


@dataclass(frozen=True, eq=False)
class TransferCurve:
    """Probabilities ``P_{k0,m}`` and concurrences ``C_{a,b}`` on a uniform grid.

    ``tau_k = tau_start + k * tau_step`` for ``k < count``.
    """

    tau_start: float
    tau_step: float
    count: int
    source: int
    probabilities: dict[int, np.ndarray] = field(default_factory=dict)
    concurrences: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)
    offset: int = 0

    @property
    def taus(self) -> np.ndarray:
        return grid_taus(self.tau_start, self.tau_step, self.offset, self.offset + self.count)

    @property
    def tau_end(self) -> float:
        return self.tau_start + (self.offset + self.count - 1) * self.tau_step

    def concurrence_for(self, a: int, b: int) -> np.ndarray | None:
        got = self.concurrences.get((a, b))
        return got if got is not None else self.concurrences.get((b, a))


def grid_taus(start: float, step: float, lo: int, hi: int) -> np.ndarray:
    return start + np.arange(lo, hi, dtype=float) * step


def _validate_grid(start: float, step: float, count: int) -> None:
    if not step > 0:
        raise DomainError(f"tau step must be positive, got {step}")
    if count < 1:
        raise DomainError(f"grid must contain at least one point, got count={count}")
    if start < 0:
        raise DomainError(f"tau start must be non-negative, got {start}")


def iter_curve_chunks(
    spec: SpectralDecomposition,
    k0: int,
    targets: Iterable[int],
    pairs: Iterable[Sequence[int]] = (),
    grid: tuple[float, float, int] = (0.0, DEFAULT_TAU_STEP, 1),
    chunk_size: int = DEFAULT_CHUNK,
) -> Iterator[TransferCurve]:
    """Evaluate the curve chunk by chunk; each chunk carries its grid ``offset``."""
    start, step, count = float(grid[0]), float(grid[1]), int(grid[2])
    _validate_grid(start, step, count)
    src = _check_node(spec, k0, "k0")
    targets = [int(t) for t in targets]
    pairs = [_pair_key(p) for p in pairs]
    for t in targets:
        _check_node(spec, t, "target")
    for a, b in pairs:
        _check_node(spec, a, "pair node")
        _check_node(spec, b, "pair node")
        if a == b:
            raise DomainError(f"concurrence pair needs distinct nodes, got ({a}, {b})")

    nodes = sorted(set(targets) | {n for p in pairs for n in p})
    column = {node: i for i, node in enumerate(nodes)}
    idx = [node - 1 for node in nodes]
    for lo in range(0, count, chunk_size):
        hi = min(count, lo + chunk_size)
        taus = grid_taus(start, step, lo, hi)
        if idx:
            coef = (spec.eigenvectors[src, :] * spec.eigenvectors[idx, :]).T
            phases = _grid_phases(spec.eigenvalues, start, step, lo, hi)
            z = phases @ coef
            probs = z.real**2 + z.imag**2
        else:
            probs = np.empty((hi - lo, 0))
        yield TransferCurve(
            tau_start=start,
            tau_step=step,
            count=hi - lo,
            source=k0,
            probabilities={t: probs[:, column[t]] for t in targets},
            concurrences={
                (a, b): 2.0 * np.sqrt(probs[:, column[a]] * probs[:, column[b]])
                for a, b in pairs
            },
            offset=lo,
        )


def scan_curve(
    spec: SpectralDecomposition,
    k0: int,
    targets: Iterable[int],
    pairs: Iterable[Sequence[int]] = (),
    grid: tuple[float, float, int] = (0.0, DEFAULT_TAU_STEP, 1),
) -> TransferCurve:
    chunks = list(iter_curve_chunks(spec, k0, targets, pairs, grid))
    first = chunks[0]
    return TransferCurve(
        tau_start=first.tau_start,
        tau_step=first.tau_step,
        count=int(grid[2]),
        source=k0,
        probabilities={
            t: np.concatenate([c.probabilities[t] for c in chunks]) for t in first.probabilities
        },
        concurrences={
            p: np.concatenate([c.concurrences[p] for c in chunks]) for p in first.concurrences
        },
    )


# -- peaks and classification ------------------------------------------------


class HpstClass(str, enum.Enum):
    HPST_P = "HPST_P"
    HPST_C = "HPST_C"
    HPST_PC = "HPST_PC"
    NONE = "None"


@dataclass(frozen=True)
class Peak:
    """Maximum of a curve over ``[0, window]``.

    ``value`` and ``tau`` are always the sampled maximum; the peak counts as
    present only when ``value >= threshold``.  An absent peak is reported as
    exceeding the window.
    """

    value: float
    tau: float
    window: float
    threshold: float

    @property
    def present(self) -> bool:
        return self.value >= self.threshold

    def human(self) -> str:
        if self.present:
            return f"{self.value:.3f}  {self.tau:.3f}"
        return f"---  >{self.window:g}"

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "tau": self.tau,
            "window": self.window,
            "threshold": self.threshold,
            "present": self.present,
        }


def classify(p: Peak, c: Peak | None, pc_tolerance: float = DEFAULT_PC_TOLERANCE) -> HpstClass:
    c_high = c is not None and c.present
    if p.present and c_high:
        if abs(p.tau - 2.0 * c.tau) <= pc_tolerance * p.tau:
            return HpstClass.HPST_PC
        return HpstClass.NONE
    if p.present:
        return HpstClass.HPST_P
    if c_high:
        return HpstClass.HPST_C
    return HpstClass.NONE


@dataclass(frozen=True)
class HpstReport:
    source: int
    target: int
    probability: Peak
    concurrence: Peak | None
    classification: HpstClass | None
    pc_tolerance: float = DEFAULT_PC_TOLERANCE

    @property
    def p_peak(self) -> float:
        return self.probability.value

    @property
    def tau_p(self) -> float:
        return self.probability.tau

    @property
    def c_peak(self) -> float | None:
        return None if self.concurrence is None else self.concurrence.value

    @property
    def tau_c(self) -> float | None:
        return None if self.concurrence is None else self.concurrence.tau

    @property
    def window(self) -> float:
        return self.probability.window

    def human_row(self) -> str:
        c = self.concurrence.human() if self.concurrence is not None else "n/a  n/a"
        return f"{self.probability.human()}  {c}"

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "probability": self.probability.to_dict(),
            "concurrence": None if self.concurrence is None else self.concurrence.to_dict(),
            "classification": None if self.classification is None else self.classification.value,
            "pc_tolerance": self.pc_tolerance,
        }


class _PeakTracker:
    """Streaming maximum over ``[0, window]`` with earliest-index tie-breaking.

    Keeps, per chunk, the points within ``PEAK_TIE_TOL`` of that chunk's
    maximum; the final answer is then identical to a one-shot scan.
    """

    def __init__(self, start: float, step: float, window: float):
        # grid points with tau <= window (tolerant to float rounding)
        self.limit = int(math.floor((window - start) / step + 1e-9)) + 1
        self.best = -math.inf
        self.candidates: list[tuple[float, np.ndarray, np.ndarray]] = []

    def update(self, values: np.ndarray, taus: np.ndarray, offset: int) -> None:
        n = min(len(values), self.limit - offset)
        if n <= 0:
            return
        values, taus = values[:n], taus[:n]
        top = float(values.max())
        if top < self.best - PEAK_TIE_TOL:
            return
        near = values >= top - PEAK_TIE_TOL
        self.candidates.append((top, values[near], taus[near]))
        self.best = max(self.best, top)
        self.candidates = [c for c in self.candidates if c[0] >= self.best - PEAK_TIE_TOL]

    def result(self) -> tuple[float, float]:
        for _, values, taus in self.candidates:
            hit = np.flatnonzero(values >= self.best - PEAK_TIE_TOL)
            if hit.size:
                return self.best, float(taus[hit[0]])
        raise DomainError("no grid points inside the window")


def _make_report(source, target, p_track, c_track, p_window, c_window, threshold, pc_tolerance, classify_it):
    p_value, p_tau = p_track.result()
    p = Peak(p_value, p_tau, p_window, threshold)
    c = None
    if c_track is not None:
        c_value, c_tau = c_track.result()
        c = Peak(c_value, c_tau, c_window, threshold)
    cls = classify(p, c, pc_tolerance) if classify_it else None
    return HpstReport(source, target, p, c, cls, pc_tolerance)


def detect_peaks(
    curve: TransferCurve,
    source: int,
    target: int,
    window: float,
    concurrence_window: float | None = None,
    threshold: float = DEFAULT_THRESHOLD,
    pc_tolerance: float = DEFAULT_PC_TOLERANCE,
    classify_result: bool = True,
) -> HpstReport:
    """Peaks of ``P_{source,target}`` over ``[0, window]`` and of ``C_{source,target}``.

    The concurrence is searched over ``[0, concurrence_window]``, which
    defaults to ``window``.
    """
    c_window = window if concurrence_window is None else concurrence_window
    if source != curve.source:
        raise DomainError(f"curve was computed from node {curve.source}, not {source}")
    for w in (window, c_window):
        if w < curve.tau_start or w > curve.tau_end + 1e-9 * curve.tau_step:
            raise DomainError(
                f"window {w} outside the sampled range [{curve.tau_start}, {curve.tau_end}]"
            )
    if target not in curve.probabilities:
        raise DomainError(f"curve has no probability samples for target {target}")
    c_values = curve.concurrence_for(source, target)
    if c_values is None and classify_result:
        raise DomainError(
            f"classification needs concurrence samples for pair ({source}, {target})"
        )

    taus = curve.taus
    p_track = _PeakTracker(curve.tau_start, curve.tau_step, window)
    p_track.update(curve.probabilities[target], taus, curve.offset)
    c_track = None
    if c_values is not None:
        c_track = _PeakTracker(curve.tau_start, curve.tau_step, c_window)
        c_track.update(c_values, taus, curve.offset)
    return _make_report(
        source, target, p_track, c_track, window, c_window, threshold, pc_tolerance, classify_result
    )


def scan_peaks(
    spec: SpectralDecomposition,
    source: int,
    target: int,
    window: float,
    concurrence_window: float | None = None,
    tau_step: float = DEFAULT_TAU_STEP,
    threshold: float = DEFAULT_THRESHOLD,
    pc_tolerance: float = DEFAULT_PC_TOLERANCE,
    chunk_size: int = DEFAULT_CHUNK,
) -> HpstReport:
    """Streaming equivalent of ``detect_peaks(scan_curve(...))`` starting at tau = 0.

    Memory stays bounded by ``chunk_size`` however long the window is.
    """
    if source == target:
        raise DomainError("source and target must differ")
    c_window = window if concurrence_window is None else concurrence_window
    if window < 0 or c_window < 0:
        raise DomainError("windows must be non-negative")
    count = int(math.floor(max(window, c_window) / tau_step + 1e-9)) + 1
    p_track = _PeakTracker(0.0, tau_step, window)
    c_track = _PeakTracker(0.0, tau_step, c_window)
    for chunk in iter_curve_chunks(
        spec, source, [target], [(source, target)], (0.0, tau_step, count), chunk_size
    ):
        taus = chunk.taus
        p_track.update(chunk.probabilities[target], taus, chunk.offset)
        c_track.update(chunk.concurrences[(source, target)], taus, chunk.offset)
    return _make_report(
        source, target, p_track, c_track, window, c_window, threshold, pc_tolerance, True
    )


# -- perfect-transfer condition ----------------------------------------------


@dataclass(frozen=True)
class PstConditionReport:
    """Residuals of ``phase_k = (2 n_k + k) pi + phi0`` per eigenvalue.

    ``phases[k-1] = lambda_k * tau0 / 2`` is the phase accumulated by the
    k-th eigenmode (eigenvalues ascending), matching the amplitude formula.
    """

    tau0: float
    phi0: float
    phases: tuple[float, ...]
    integers: tuple[int, ...]
    residuals: tuple[float, ...]

    @property
    def max_abs_residual(self) -> float:
        return max(abs(r) for r in self.residuals)

    def to_dict(self) -> dict:
        return {
            "tau0": self.tau0,
            "phi0": self.phi0,
            "phases": list(self.phases),
            "integers": list(self.integers),
            "residuals": list(self.residuals),
            "max_abs_residual": self.max_abs_residual,
        }


def _fold(x: float) -> tuple[int, float]:
    n = round(x / (2.0 * math.pi))
    r = x - 2.0 * math.pi * n
    if r <= -math.pi:
        r += 2.0 * math.pi
        n -= 1
    elif r > math.pi:
        r -= 2.0 * math.pi
        n += 1
    return int(n), r


def check_pst_condition(
    spec: SpectralDecomposition, tau0: float, phi0: float | None = None
) -> PstConditionReport:
    """Fit the integers ``n_k`` and report residuals folded into (-pi, pi].

    When ``phi0`` is None it is chosen as the circular mean of
    ``phase_k - k*pi``, the least-squares optimum for small residuals.
    """
    if not tau0 > 0:
        raise DomainError(f"tau0 must be positive, got {tau0}")
    phases = [float(lam) * tau0 / 2.0 for lam in spec.eigenvalues]
    shifted = [ph - k * math.pi for k, ph in enumerate(phases, start=1)]
    if phi0 is None:
        phi0 = math.atan2(
            sum(math.sin(s) for s in shifted), sum(math.cos(s) for s in shifted)
        )
    integers, residuals = zip(*(_fold(s - phi0) for s in shifted))
    return PstConditionReport(
        tau0=float(tau0),
        phi0=float(phi0),
        phases=tuple(phases),
        integers=tuple(integers),
        residuals=tuple(residuals),
    )
