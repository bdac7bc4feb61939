"""Dense statevector simulation of QAOA for diagonal QUBO objectives.

The circuit follows the usual alternating structure at depth P:

    |gamma, beta> = U(beta_P, B) U(gamma_P, C) ... U(beta_1, B) U(gamma_1, C) H^n |0>

with the diagonal cost unitary ``U(gamma, C) = exp(i pi gamma C / 2)`` acting
as a per-basis-state phase, and the transverse-field mixer
``U(beta, B) = exp(i pi beta B / 2)`` with ``B = sum_i X_i``, i.e. the
single-qubit rotation ``cos(pi beta / 2) I + i sin(pi beta / 2) X`` applied to
every qubit.  Note the pi/2 factor inside both exponents; the variational
angles are dimensionless.

Bit convention: variable ``i`` (1-based) lives on qubit ``i - 1``, the least
significant bit of the basis index, and bitstrings render most significant
qubit first, so basis index 11 on four qubits is '1011'.

Phase scaling: penalty-sized QUBO coefficients (thousands and up) would wrap
the cost phases many times over and shred the parameter landscape, so by
default the linear coefficients are divided by ``max_i |q_i|`` before phase
construction.  Positive rescaling never changes the argmin over bitstrings,
and expectation values are always reported in original units with the
constant offset restored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import DimensionMismatch, InvariantViolation, TooManyQubits
from .qubo import QuboProblem

#: Dense simulation guard: 2**16 amplitudes.
MAX_QUBITS = 16


@dataclass(frozen=True, eq=False)
class Statevector:
    """Complex amplitudes over the 2**n computational basis states."""

    amplitudes: np.ndarray
    n: int

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm_error(self) -> float:
        """Deviation of the total probability from one."""
        return abs(float(np.sum(self.probabilities())) - 1.0)


@dataclass(frozen=True)
class QaoaParams:
    """Variational angles, one (gamma, beta) pair per layer."""

    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if len(self.gammas) != len(self.betas) or not self.gammas:
            raise InvariantViolation(
                f"need equal-length nonempty angle lists, got "
                f"{len(self.gammas)} gammas and {len(self.betas)} betas"
            )

    @property
    def depth(self) -> int:
        return len(self.gammas)


def _default_initial_params(depth: int) -> QaoaParams:
    # Small nonzero angles avoid the flat-gradient point at exactly zero.
    return QaoaParams((0.1,) * depth, (0.1,) * depth)


@dataclass(frozen=True)
class QaoaConfig:
    depth: int = 2
    optimizer_budget: int = 100
    initial_params: QaoaParams | None = None
    extraction: str = "argmax"
    sample_seed: int = 0
    normalize_scale: bool = True

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise InvariantViolation(f"depth {self.depth} < 1")
        if self.optimizer_budget < 1:
            raise InvariantViolation(f"budget {self.optimizer_budget} < 1")
        if self.extraction not in ("argmax", "sample"):
            raise InvariantViolation(f"unknown extraction mode {self.extraction!r}")
        if (
            self.initial_params is not None
            and self.initial_params.depth != self.depth
        ):
            raise InvariantViolation(
                f"initial params depth {self.initial_params.depth} != {self.depth}"
            )

    def start_params(self) -> QaoaParams:
        return self.initial_params or _default_initial_params(self.depth)


@dataclass(frozen=True)
class QaoaOutcome:
    bits: tuple[int, ...]
    params: QaoaParams
    expectation: float
    probabilities: dict[str, float]


def bits_to_string(bits: Sequence[int]) -> str:
    """Render variable bits (unit 1 first) as a most-significant-first string."""
    return "".join(str(int(b)) for b in reversed(list(bits)))


def init_uniform(n: int) -> Statevector:
    """Equal superposition H^n |0>: every amplitude is 2**(-n/2)."""
    if n < 1:
        raise InvariantViolation(f"need at least one qubit, got {n}")
    if n > MAX_QUBITS:
        raise TooManyQubits(f"n={n} exceeds simulation guard {MAX_QUBITS}")
    amp = np.full(1 << n, 2.0 ** (-n / 2.0), dtype=complex)
    return Statevector(amp, n)


def _phase_energies(qubo: QuboProblem, scale: float | None) -> np.ndarray:
    """Offset-free QUBO energies for phase construction, optionally rescaled."""
    idx = np.arange(1 << qubo.n)
    e = np.zeros(1 << qubo.n)
    for i, q in enumerate(qubo.linear):
        e += q * ((idx >> i) & 1)
    if scale is not None:
        e = e / scale
    return e


def phase_scale(qubo: QuboProblem) -> float:
    """Coefficient normalizer: ``max_i |q_i]``, or 1 for an all-zero objective."""
    if qubo.n == 0:
        return 1.0
    biggest = max(abs(q) for q in qubo.linear)
    return biggest if biggest > 0.0 else 1.0


def apply_cost_layer(
    state: Statevector,
    qubo: QuboProblem,
    gamma: float,
    scale: float | None = None,
) -> Statevector:
    """Diagonal phase layer: amplitude of ``|x>`` gains ``exp(i pi gamma E(x) / 2)``.

    ``E(x)`` is the offset-dropped (and, when ``scale`` is given, rescaled)
    QUBO energy of ``x``.  Per-basis probabilities are untouched.
    """
    if qubo.n != state.n:
        raise DimensionMismatch(f"qubo n={qubo.n} but state n={state.n}")
    phases = np.exp(1j * math.pi * gamma * _phase_energies(qubo, scale) / 2.0)
    return Statevector(state.amplitudes * phases, state.n)


def apply_mixer_layer(state: Statevector, beta: float) -> Statevector:
    """Rotate every qubit by ``exp(i pi beta X / 2)``; preserves the norm."""
    c = math.cos(math.pi * beta / 2.0)
    s = 1j * math.sin(math.pi * beta / 2.0)
    amps = state.amplitudes
    for qubit in range(state.n):
        view = amps.reshape(-1, 2, 1 << qubit)
        a0 = view[:, 0, :]
        a1 = view[:, 1, :]
        amps = np.stack((c * a0 + s * a1, s * a0 + c * a1), axis=1).reshape(-1)
    return Statevector(amps, state.n)


def run_circuit(
    qubo: QuboProblem, params: QaoaParams, normalize_scale: bool = True
) -> Statevector:
    """Prepare the uniform state, then apply P (cost, mixer) layer pairs."""
    scale = phase_scale(qubo) if normalize_scale else None
    state = init_uniform(qubo.n)
    for gamma, beta in zip(params.gammas, params.betas):
        state = apply_cost_layer(state, qubo, gamma, scale=scale)
        state = apply_mixer_layer(state, beta)
    return state


def expectation(state: Statevector, qubo: QuboProblem) -> float:
    """Expected full QUBO energy (constant restored, original units)."""
    if qubo.n != state.n:
        raise DimensionMismatch(f"qubo n={qubo.n} but state n={state.n}")
    return float(state.probabilities() @ qubo.energies())


class _BudgetExhausted(Exception):
    pass


def optimize_params(
    qubo: QuboProblem, config: QaoaConfig
) -> tuple[QaoaParams, float]:
    """Derivative-free (Nelder-Mead) search over the angles.

    Spends at most ``config.optimizer_budget`` expectation evaluations and
    returns the best parameters seen, so the result is never worse than the
    starting point.
    """
    start = config.start_params()
    x0 = np.array(start.gammas + start.betas, dtype=float)
    depth = config.depth
    budget = config.optimizer_budget
    evals = 0
    best_x = x0.copy()
    best_val = math.inf

    def objective(x: np.ndarray) -> float:
        nonlocal evals, best_x, best_val
        if evals >= budget:
            raise _BudgetExhausted
        evals += 1
        params = QaoaParams(tuple(x[:depth]), tuple(x[depth:]))
        val = expectation(run_circuit(qubo, params, config.normalize_scale), qubo)
        if val < best_val:
            best_val = val
            best_x = np.array(x, dtype=float)
        return val

    try:
        objective(x0)
        minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"maxfev": budget, "xatol": 1e-6, "fatol": 1e-10},
        )
    except _BudgetExhausted:
        pass
    return QaoaParams(tuple(best_x[:depth]), tuple(best_x[depth:])), best_val


def extract_solution(state: Statevector, config: QaoaConfig) -> tuple[int, ...]:
    """Read a bit assignment out of the final state.

    argmax mode returns the most probable basis state, ties resolved toward
    the smallest basis index; sample mode draws once from the distribution
    seeded by ``config.sample_seed``.
    """
    probs = state.probabilities()
    if config.extraction == "argmax":
        index = int(np.argmax(probs))
    else:
        rng = np.random.default_rng(config.sample_seed)
        index = int(rng.choice(len(probs), p=probs / probs.sum()))
    return tuple((index >> i) & 1 for i in range(state.n))


def solve_qubo_qaoa(
    qubo: QuboProblem,
    config: QaoaConfig | None = None,
    warm: QaoaParams | None = None,
) -> QaoaOutcome:
    """Optimize the angles, run the circuit at the optimum, extract bits.

    ``warm`` overrides the configured starting point; passing the previous
    solve's optimum implements warm starting across outer iterations.
    """
    config = config or QaoaConfig()
    if qubo.n > MAX_QUBITS:
        raise TooManyQubits(f"n={qubo.n} exceeds simulation guard {MAX_QUBITS}")
    if warm is not None:
        config = QaoaConfig(
            depth=warm.depth,
            optimizer_budget=config.optimizer_budget,
            initial_params=warm,
            extraction=config.extraction,
            sample_seed=config.sample_seed,
            normalize_scale=config.normalize_scale,
        )
    params, value = optimize_params(qubo, config)
    state = run_circuit(qubo, params, config.normalize_scale)
    bits = extract_solution(state, config)
    probs = state.probabilities()
    prob_map = {
        format(i, f"0{state.n}b"): float(probs[i]) for i in range(len(probs))
    }
    return QaoaOutcome(bits, params, value, prob_map)


def probabilities_to_csv(probabilities: dict[str, float]) -> str:
    """Render a probability map as ``bitstring,probability`` rows."""
    lines = ["bitstring,probability"]
    for key in sorted(probabilities):
        lines.append(f"{key},{probabilities[key]!r}")
    return "\n".join(lines) + "\n"
