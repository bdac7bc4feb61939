"""Three-block ADMM coordinator for the decomposed unit commitment problem.

Each iteration solves, in order:

1. the convex QP over the relaxed commitments and outputs (``qpblock``),
2. the diagonal QUBO over the auxiliary bits ``z`` (classical per-bit solve
   or a QAOA statevector solve, optionally warm started with the previous
   iteration's angles),
3. the unconstrained quadratic over the slack ``r``, which has the closed
   form ``r = -(lam + rho (y - z)) / (beta + rho)``,

then takes the dual step ``lam += (rho / 2) (y - z + r)`` and stops once the
L1 consensus residual ``sum_i |y_i - z_i + r_i|`` falls below the tolerance.
The same L1 quantity drives both the stopping rule and the reported trace so
the two can never disagree.

Convergence of this splitting is heuristic (the middle block is binary); the
penalties must satisfy ``rho > beta > 0`` and are load-dependent in practice,
see :func:`preset_penalties`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import InvariantViolation, LengthMismatch
from .qaoa import QaoaConfig, QaoaParams, solve_qubo_qaoa
from .qpblock import Block1Problem, solve_block1
from .qubo import QuboProblem, build_qubo, solve_qubo_perbit
from .ucmodel import (
    Commitment,
    InfeasibleCommitment,
    UCInstance,
    UCSolution,
    economic_dispatch,
    evaluate_cost,
)

BACKEND_CLASSICAL = "classical"
BACKEND_QAOA = "qaoa"


def preset_penalties(load: float) -> tuple[float, float]:
    """Load-keyed (rho, beta) presets.

    Small systems want penalties around 1e6 with rho just above beta; mid
    loads use 1001/1000 and heavier loads 4000/1000.
    """
    if load < 100.0:
        return 1_000_001.0, 1_000_000.0
    if load <= 200.0:
        return 1001.0, 1000.0
    return 4000.0, 1000.0


@dataclass(frozen=True)
class AdmmConfig:
    rho: float
    beta: float
    epsilon: float = 1e-6
    max_iters: int = 1000
    backend: str = BACKEND_CLASSICAL
    qaoa: QaoaConfig = field(default_factory=QaoaConfig)
    warm_start: bool = True
    initial_z: tuple[float, ...] | None = None
    initial_r: tuple[float, ...] | None = None
    initial_lambda: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not (self.rho > self.beta > 0.0):
            raise InvariantViolation(
                f"need rho > beta > 0, got rho={self.rho}, beta={self.beta}"
            )
        if self.epsilon <= 0.0:
            raise InvariantViolation(f"epsilon {self.epsilon} <= 0")
        if self.max_iters < 1:
            raise InvariantViolation(f"max_iters {self.max_iters} < 1")
        if self.backend not in (BACKEND_CLASSICAL, BACKEND_QAOA):
            raise InvariantViolation(f"unknown backend {self.backend!r}")


def default_config(load: float, backend: str = BACKEND_CLASSICAL, **overrides) -> AdmmConfig:
    """Config with the load-keyed penalty presets filled in."""
    rho, beta = preset_penalties(load)
    base = AdmmConfig(rho=rho, beta=beta, backend=backend)
    return replace(base, **overrides) if overrides else base


@dataclass(frozen=True)
class AdmmState:
    """Snapshot of one iteration, as handed to a run observer.

    ``residual`` is always the L1 consensus gap of the snapshot's own
    ``(y, z, r)``; ``lam`` is the dual vector after this iteration's ascent
    step, and ``qaoa_params`` carries the angles being warm started.
    """

    iter: int
    y: tuple[float, ...]
    p: tuple[float, ...]
    z: tuple[float, ...]
    r: tuple[float, ...]
    lam: tuple[float, ...]
    residual: float
    qaoa_params: QaoaParams | None = None


@dataclass(frozen=True)
class TraceRow:
    iter: int
    residual: float
    objective: float
    block1_objective: float
    block1_kkt: float
    block2_energy: float


@dataclass(frozen=True)
class QaoaIterationRecord:
    iter: int
    params: QaoaParams
    expectation: float
    probabilities: dict[str, float]
    qubo: QuboProblem


@dataclass(frozen=True)
class SolveReport:
    instance: UCInstance
    converged: bool
    iterations: int
    final: UCSolution | None
    trace: tuple[TraceRow, ...]
    qaoa_diagnostics: tuple[QaoaIterationRecord, ...] | None = None


def update_r(
    y: Sequence[float],
    z: Sequence[float],
    lam: Sequence[float],
    rho: float,
    beta: float,
) -> np.ndarray:
    """Closed-form third-block minimizer ``r = -(lam + rho (y - z)) / (beta + rho)``."""
    if rho + beta <= 0.0:
        raise InvariantViolation(f"rho + beta = {rho + beta} <= 0")
    y_arr = np.asarray(y, dtype=float)
    z_arr = np.asarray(z, dtype=float)
    lam_arr = np.asarray(lam, dtype=float)
    return -(lam_arr + rho * (y_arr - z_arr)) / (beta + rho)


def update_dual(
    lam: Sequence[float],
    y: Sequence[float],
    z: Sequence[float],
    r: Sequence[float],
    rho: float,
) -> np.ndarray:
    """Dual ascent with the half step: ``lam + (rho / 2) (y - z + r)``."""
    lam_arr = np.asarray(lam, dtype=float)
    y_arr = np.asarray(y, dtype=float)
    z_arr = np.asarray(z, dtype=float)
    r_arr = np.asarray(r, dtype=float)
    if not (len(lam_arr) == len(y_arr) == len(z_arr) == len(r_arr)):
        raise LengthMismatch("lam, y, z, r lengths differ")
    return lam_arr + (rho / 2.0) * (y_arr - z_arr + r_arr)


def residual(
    y: Sequence[float], z: Sequence[float], r: Sequence[float]
) -> float:
    """L1 consensus gap ``sum_i |y_i - z_i + r_i|``."""
    y_arr = np.asarray(y, dtype=float)
    z_arr = np.asarray(z, dtype=float)
    r_arr = np.asarray(r, dtype=float)
    if not (len(y_arr) == len(z_arr) == len(r_arr)):
        raise LengthMismatch("y, z, r lengths differ")
    return math.fsum(abs(v) for v in (y_arr - z_arr + r_arr))


def _full_lagrangian(
    instance: UCInstance,
    y: np.ndarray,
    p: np.ndarray,
    z: np.ndarray,
    r: np.ndarray,
    lam: np.ndarray,
    rho: float,
    beta: float,
) -> float:
    slack = y - z + r
    terms = []
    for i, g in enumerate(instance.generators):
        terms.append(g.a * y[i] + g.b * p[i] + g.c * p[i] * p[i])
        terms.append((beta / 2.0) * r[i] * r[i])
        terms.append(lam[i] * slack[i])
        terms.append((rho / 2.0) * slack[i] * slack[i])
    return math.fsum(terms)


def _initial_vector(
    value: tuple[float, ...] | None, n: int, name: str
) -> np.ndarray:
    if value is None:
        return np.zeros(n)
    if len(value) != n:
        raise LengthMismatch(f"{name} has length {len(value)}, expected {n}")
    return np.asarray(value, dtype=float)


def run_admm(
    instance: UCInstance,
    config: AdmmConfig,
    observer: Callable[[AdmmState], None] | None = None,
) -> SolveReport:
    """Run the three-block loop until the residual closes or the cap is hit.

    The report's final solution re-dispatches the terminal binary commitment
    so it satisfies the original problem exactly (the relaxed ``y`` does not);
    if that commitment cannot serve the load the report carries no final
    solution.  InfeasibleRelaxation from the first block propagates, since it
    proves the original problem infeasible.  ``observer``, when given, sees
    an :class:`AdmmState` snapshot after every iteration.
    """
    n = instance.n
    z = _initial_vector(config.initial_z, n, "initial_z")
    r = _initial_vector(config.initial_r, n, "initial_r")
    lam = _initial_vector(config.initial_lambda, n, "initial_lambda")

    qaoa_params: QaoaParams | None = None
    trace: list[TraceRow] = []
    diagnostics: list[QaoaIterationRecord] = []
    converged = False
    iterations = 0

    for it in range(1, config.max_iters + 1):
        iterations = it
        block1 = solve_block1(
            Block1Problem(
                instance,
                tuple(z),
                tuple(r),
                tuple(lam),
                rho=config.rho,
                beta=config.beta,
            )
        )
        y = np.asarray(block1.y)
        p = np.asarray(block1.p)

        qubo = build_qubo(y, r, lam, config.rho)
        if config.backend == BACKEND_CLASSICAL:
            bits, block2_energy = solve_qubo_perbit(qubo)
        else:
            warm = qaoa_params if (config.warm_start and it > 1) else None
            outcome = solve_qubo_qaoa(qubo, config.qaoa, warm=warm)
            bits = outcome.bits
            block2_energy = qubo.energy(bits)
            qaoa_params = outcome.params
            diagnostics.append(
                QaoaIterationRecord(
                    it, outcome.params, outcome.expectation,
                    outcome.probabilities, qubo,
                )
            )
        z = np.asarray(bits, dtype=float)

        r = update_r(y, z, lam, config.rho, config.beta)
        res = residual(y, z, r)
        objective = _full_lagrangian(
            instance, y, p, z, r, lam, config.rho, config.beta
        )
        lam = update_dual(lam, y, z, r, config.rho)
        trace.append(
            TraceRow(
                it, res, objective,
                block1.objective, block1.kkt_residual, block2_energy,
            )
        )
        if observer is not None:
            observer(
                AdmmState(
                    it, tuple(y), tuple(p), tuple(z), tuple(r), tuple(lam),
                    res, qaoa_params,
                )
            )
        if res <= config.epsilon:
            converged = True
            break

    commitment = Commitment(tuple(int(round(v)) for v in z))
    final: UCSolution | None
    try:
        dispatch = economic_dispatch(instance, commitment)
        final = UCSolution(
            commitment, dispatch, evaluate_cost(instance, commitment, dispatch)
        )
    except InfeasibleCommitment:
        final = None

    return SolveReport(
        instance=instance,
        converged=converged,
        iterations=iterations,
        final=final,
        trace=tuple(trace),
        qaoa_diagnostics=tuple(diagnostics) if diagnostics else None,
    )
