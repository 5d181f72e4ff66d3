"""Field profiles generated by mirror-placed pairs of direct currents.

Each pair ``(b, xi)`` consists of a wire at dimensionless distance ``xi``
before node 1 and an oppositely directed wire at the same distance past
node N.  At node m the pair contributes

    b * (1/(xi + m - 1) + 1/(xi + N - m)),

which is mirror-symmetric in m by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, NumericalError
from .model import FieldProfile

MAX_CONDITION = 1e12
RESIDUAL_TOL = 1e-8


def _kernel(xi: float, node: int, n_nodes: int) -> float:
    near = xi + node - 1
    far = xi + n_nodes - node
    if near == 0 or far == 0:
        raise DomainError(f"current at xi={xi} is singular at node {node}")
    return 1.0 / near + 1.0 / far


@dataclass(frozen=True)
class CurrentSystem:
    """Pairs ``(b_k, xi_k)`` of dimensionless strength and distance."""

    pairs: tuple[tuple[float, float], ...]
    n_nodes: int

    def __post_init__(self):
        if self.n_nodes < 2:
            raise DomainError(f"n_nodes must be >= 2, got {self.n_nodes}")
        pairs = tuple((float(b), float(xi)) for b, xi in self.pairs)
        for k, (_, xi) in enumerate(pairs):
            for m in range(1, self.n_nodes + 1):
                if xi + m - 1 == 0 or xi + self.n_nodes - m == 0:
                    raise DomainError(
                        f"current pair {k} (xi={xi}) has a singular denominator at node {m}"
                    )
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def single(cls, b: float, xi: float, n_nodes: int) -> CurrentSystem:
        return cls(((b, xi),), n_nodes)


def field_from_currents(system: CurrentSystem) -> FieldProfile:
    n = system.n_nodes
    omegas = []
    for m in range(1, n + 1):
        omegas.append(sum(b * _kernel(xi, m, n) for b, xi in system.pairs))
    # the kernel is symmetric analytically; copy the first half so it is exactly so
    for m in range(n // 2):
        omegas[n - 1 - m] = omegas[m]
    return FieldProfile(tuple(omegas))


def solve_currents_for_field(target: FieldProfile, xis: Sequence[float]) -> np.ndarray:
    """Strengths ``b_k`` reproducing a mirror-symmetric target field.

    Needs one distance per independent node, ``ceil(N/2)`` of them.  The
    solution is accepted only if feeding it back through
    ``field_from_currents`` reproduces the target within ``RESIDUAL_TOL``;
    distant, closely spaced wires make the system too ill-conditioned for
    that in double precision and raise ``NumericalError`` instead.
    """
    n = len(target)
    half = (n + 1) // 2
    if not target.is_mirror_symmetric():
        raise DomainError("target field must be mirror-symmetric")
    if len(xis) != half:
        raise DomainError(f"need {half} current distances for a {n}-node chain, got {len(xis)}")
    if len(set(xis)) != len(xis):
        raise DomainError("current distances must be distinct")
    # validates singular geometries
    CurrentSystem(tuple((0.0, xi) for xi in xis), n)

    matrix = np.array([[_kernel(xi, m, n) for xi in xis] for m in range(1, half + 1)])
    cond = np.linalg.cond(matrix)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise NumericalError(f"current geometry is ill-conditioned (condition number {cond:.3e})")
    b = np.linalg.solve(matrix, np.asarray(target.omegas[:half]))
    produced = field_from_currents(CurrentSystem(tuple(zip(b.tolist(), xis)), n))
    residual = max(abs(p - t) for p, t in zip(produced.omegas, target.omegas))
    if residual > RESIDUAL_TOL:
        raise NumericalError(
            f"current strengths reproduce the field only to {residual:.3e} "
            f"(condition number {cond:.3e}); move the wires closer or spread them out"
        )
    return b
