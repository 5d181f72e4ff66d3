"""Single-excitation matrix of the XXZ dipolar Hamiltonian.

In the basis ``|n>`` (only spin ``n`` flipped) the dimensionless
Hamiltonian is ``H = (D - Gamma*I) / 2``.  ``D`` is a symmetric Toeplitz
coupling matrix with field-dependent diagonal

    A_n = 2 * (sum_{i != n} d_|n-i| + omega_n + omega)

and ``Gamma = sum_{i<j} d_{j-i}`` is a constant shift.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import ChainSpec, FieldProfile


@dataclass(frozen=True, eq=False)
class SectorMatrix:
    entries: np.ndarray
    gamma_shift: float

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def hamiltonian(self) -> np.ndarray:
        """The matrix ``(D - Gamma*I) / 2`` itself."""
        return 0.5 * (self.entries - self.gamma_shift * np.eye(self.size))


def build_sector_matrix(chain: ChainSpec, field: FieldProfile) -> SectorMatrix:
    n = chain.n_nodes
    if len(field) != n:
        raise DomainError(
            f"field has {len(field)} values but the chain has {n} nodes"
        )
    # d[k] is the coupling at separation k; d[0] is unused
    d = np.zeros(n)
    d[1:] = chain.couplings()
    idx = np.arange(n)
    entries = d[np.abs(idx[:, None] - idx[None, :])]

    # node i has i bonds to the left and n-1-i to the right; adding the two
    # prefix sums in sorted order keeps mirrored nodes bitwise equal
    prefix = np.cumsum(d)
    bond_sums = np.array([sum(sorted((prefix[i], prefix[n - 1 - i]))) for i in range(n)])
    omegas = np.asarray(field.omegas, dtype=float)
    entries[idx, idx] = 2.0 * (bond_sums + omegas + chain.homogeneous_offset)

    gamma = float(sum((n - k) * d[k] for k in range(1, n)))
    entries.setflags(write=False)
    return SectorMatrix(entries=entries, gamma_shift=gamma)
