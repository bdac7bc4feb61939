"""Second ADMM block: binary quadratic objective over the auxiliary bits.

With the continuous variables frozen, the augmented Lagrangian terms that
depend on the binary vector ``z`` are, per component (writing ``a = y + r``):

    lam * (a - z) + (rho / 2) * (a - z)**2

Using ``z**2 == z`` for binary ``z`` this collapses to a purely diagonal
QUBO: ``energy(z) = sum_i q_i z_i + constant`` with

    q_i      = -lam_i + rho * (1/2 - a_i)
    constant = sum_i (lam_i * a_i + (rho / 2) * a_i**2)

The representation keeps an (always empty here) coupling slot so future
quadratic terms have somewhere to go; the solvers guard against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import HasCouplings, InvariantViolation, LengthMismatch, TooLarge

#: Exhaustive QUBO solve guard (2**24 assignments).
EXACT_SOLVE_LIMIT = 24


@dataclass(frozen=True)
class QuboProblem:
    """Diagonal binary quadratic objective: ``sum_i linear[i] * z_i + constant``."""

    linear: tuple[float, ...]
    constant: float = 0.0
    couplings: tuple[tuple[int, int, float], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "linear", tuple(float(q) for q in self.linear))
        object.__setattr__(self, "couplings", tuple(self.couplings))

    @property
    def n(self) -> int:
        return len(self.linear)

    def energy(self, bits: Sequence[int]) -> float:
        if len(bits) != self.n:
            raise LengthMismatch(f"got {len(bits)} bits, expected {self.n}")
        self._require_diagonal()
        e = 0.0
        for q, z in zip(self.linear, bits):
            if z:
                e += q
        return e + self.constant

    def energies(self) -> np.ndarray:
        """Energy of every assignment, indexed by the bits-as-integer value."""
        self._require_diagonal()
        if self.n > EXACT_SOLVE_LIMIT:
            raise TooLarge(f"n={self.n} exceeds limit {EXACT_SOLVE_LIMIT}")
        idx = np.arange(1 << self.n)
        e = np.zeros(1 << self.n)
        for i, q in enumerate(self.linear):
            e += q * ((idx >> i) & 1)
        return e + self.constant

    def _require_diagonal(self) -> None:
        if self.couplings:
            raise HasCouplings("operation requires a coupling-free QUBO")


@dataclass(frozen=True)
class IsingProblem:
    """Spin form of a diagonal QUBO under the substitution ``z = (s + 1) / 2``."""

    h: tuple[float, ...]
    offset: float

    @property
    def n(self) -> int:
        return len(self.h)

    def energy(self, spins: Sequence[int]) -> float:
        if len(spins) != self.n:
            raise LengthMismatch(f"got {len(spins)} spins, expected {self.n}")
        if any(s not in (-1, 1) for s in spins):
            raise InvariantViolation(f"spins must be +/-1, got {tuple(spins)}")
        return math.fsum(hi * s for hi, s in zip(self.h, spins)) + self.offset


def build_qubo(
    y: Sequence[float],
    r: Sequence[float],
    lam: Sequence[float],
    rho: float,
) -> QuboProblem:
    """Assemble the second-block QUBO from the frozen iterates."""
    if not (len(y) == len(r) == len(lam)):
        raise LengthMismatch(
            f"y, r, lam lengths differ: {len(y)}, {len(r)}, {len(lam)}"
        )
    if rho <= 0.0:
        raise InvariantViolation(f"rho {rho} <= 0")
    a = np.asarray(y, dtype=float) + np.asarray(r, dtype=float)
    lam_arr = np.asarray(lam, dtype=float)
    linear = -lam_arr + rho * (0.5 - a)
    constant = math.fsum(lam_arr * a + (rho / 2.0) * a * a)
    return QuboProblem(tuple(linear), constant)


def to_spin(qubo: QuboProblem) -> IsingProblem:
    """Map bits to spins via ``s = 2 z - 1``; energies are preserved exactly."""
    qubo._require_diagonal()
    h = tuple(q / 2.0 for q in qubo.linear)
    offset = qubo.constant + math.fsum(h)
    return IsingProblem(h, offset)


def _energy_like_exact(qubo: QuboProblem, bits: Sequence[int]) -> float:
    # Same accumulation order as energies(): linear terms by index, then constant.
    e = 0.0
    for q, z in zip(qubo.linear, bits):
        e += q * z
    return e + qubo.constant


def solve_qubo_exact(qubo: QuboProblem) -> tuple[tuple[int, ...], float]:
    """Global minimum by exhaustive enumeration.

    Ties break toward bit value 0 scanning from unit 1 upward, i.e. toward the
    lexicographically smallest bits tuple.
    """
    qubo._require_diagonal()
    n = qubo.n
    if n > EXACT_SOLVE_LIMIT:
        raise TooLarge(f"n={n} exceeds limit {EXACT_SOLVE_LIMIT}")
    if n == 0:
        return (), qubo.constant
    energies = qubo.energies()
    emin = float(energies.min())
    best = min(
        tuple(int(m >> i) & 1 for i in range(n))
        for m in np.flatnonzero(energies == emin)
    )
    return best, _energy_like_exact(qubo, best)


def solve_qubo_perbit(qubo: QuboProblem) -> tuple[tuple[int, ...], float]:
    """Fast path exploiting separability: bit i is on iff its slope is negative.

    Matches :func:`solve_qubo_exact` bit-for-bit including the tie rule.
    """
    qubo._require_diagonal()
    bits = tuple(1 if q < 0.0 else 0 for q in qubo.linear)
    return bits, _energy_like_exact(qubo, bits)
