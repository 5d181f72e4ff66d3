"""Domain types: chain geometry, field profile and physical units.

All quantities are dimensionless unless stated otherwise: time is measured
in units of ``1/D1`` and frequencies in units of ``D1``, where
``D1 = gamma**2 * hbar / a**3`` is the nearest-neighbour dipolar constant
(CGS-Gaussian units).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError

SPEED_OF_LIGHT_CGS = 2.99792458e10  # cm/s


class CouplingModel(str, enum.Enum):
    FULL_DIPOLAR = "full_dipolar"
    NEAREST_NEIGHBOR = "nearest_neighbor"


@dataclass(frozen=True)
class ChainSpec:
    """A homogeneous chain of ``n_nodes`` spins.

    ``homogeneous_offset`` is the uniform part of the Larmor frequency; it
    only changes phases, never transfer probabilities.
    """

    n_nodes: int
    coupling_model: CouplingModel = CouplingModel.FULL_DIPOLAR
    homogeneous_offset: float = 0.0

    def __post_init__(self):
        if isinstance(self.n_nodes, bool) or int(self.n_nodes) != self.n_nodes:
            raise DomainError(f"n_nodes must be an integer, got {self.n_nodes!r}")
        if self.n_nodes < 2:
            raise DomainError(f"n_nodes must be >= 2, got {self.n_nodes}")
        object.__setattr__(self, "n_nodes", int(self.n_nodes))
        object.__setattr__(self, "coupling_model", CouplingModel(self.coupling_model))
        object.__setattr__(self, "homogeneous_offset", float(self.homogeneous_offset))

    def couplings(self) -> list[float]:
        """``[d_1, ..., d_{N-1}]``."""
        return [coupling(self, n) for n in range(1, self.n_nodes)]


def coupling(chain: ChainSpec, separation: int) -> float:
    """Dimensionless coupling ``d_n`` between nodes ``separation`` apart."""
    if not 1 <= separation <= chain.n_nodes - 1:
        raise DomainError(
            f"separation must lie in [1, {chain.n_nodes - 1}], got {separation}"
        )
    if chain.coupling_model is CouplingModel.NEAREST_NEIGHBOR:
        return 1.0 if separation == 1 else 0.0
    return 1.0 / separation**3


@dataclass(frozen=True)
class FieldProfile:
    """Per-node dimensionless Larmor frequencies ``omega_1..omega_N``."""

    omegas: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(w) for w in self.omegas)
        if not values:
            raise DomainError("field profile must have at least one node")
        if not all(math.isfinite(w) for w in values):
            raise DomainError("field profile contains non-finite values")
        object.__setattr__(self, "omegas", values)

    @classmethod
    def zeros(cls, n_nodes: int) -> FieldProfile:
        return cls((0.0,) * n_nodes)

    @classmethod
    def symmetric(cls, n_nodes: int, outer: Sequence[float]) -> FieldProfile:
        """Mirror-symmetric profile with ``omega_k = omega_{N-k+1} = outer[k-1]``.

        Nodes not covered by ``outer`` are set to zero.
        """
        half = (n_nodes + 1) // 2
        if len(outer) > half:
            raise DomainError(
                f"{len(outer)} symmetric values do not fit a {n_nodes}-node chain"
            )
        omegas = [0.0] * n_nodes
        for k, w in enumerate(outer):
            omegas[k] = float(w)
            omegas[n_nodes - 1 - k] = float(w)
        return cls(tuple(omegas))

    def __len__(self) -> int:
        return len(self.omegas)

    def is_mirror_symmetric(self) -> bool:
        return self.omegas == self.omegas[::-1]

    def shifted(self, c: float) -> FieldProfile:
        return FieldProfile(tuple(w + c for w in self.omegas))

    def reversed(self) -> FieldProfile:
        return FieldProfile(self.omegas[::-1])


@dataclass(frozen=True)
class PhysicalUnits:
    """Physical constants fixing the dimensionless scale (CGS).

    gyromagnetic_ratio in rad/(s*G), lattice_spacing in cm, hbar in erg*s.
    """

    gyromagnetic_ratio: float
    lattice_spacing: float
    hbar: float = 1.054571817e-27

    def __post_init__(self):
        for name in ("gyromagnetic_ratio", "lattice_spacing", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be strictly positive, got {value!r}")

    def d1_scale(self) -> float:
        """Nearest-neighbour coupling ``D1 = gamma**2 hbar / a**3`` in rad/s."""
        return self.gyromagnetic_ratio**2 * self.hbar / self.lattice_spacing**3

    def current_to_strength(self, current: float, c: float = SPEED_OF_LIGHT_CGS) -> float:
        """Dimensionless strength ``b = B a**2 / (gamma hbar)`` with ``B = 2 j / c``.

        ``current`` is in statampere.
        """
        return 2.0 * current / c * self.lattice_spacing**2 / (
            self.gyromagnetic_ratio * self.hbar
        )


def dimensionless_time_to_seconds(units: PhysicalUnits, tau: float) -> float:
    return tau / units.d1_scale()
