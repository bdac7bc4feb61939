"""Acceptance gate: one test per criterion, one printed PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline.
Criteria 1-3 pin the solver outputs to fixed reference commitments for this
ten-unit system; the remaining criteria are oracle and property checks on
the numerical engines.  Exhaustive enumeration shows the reference
commitments are not cost-optimal, so criteria 1-3 fail by construction of
the reference data; the failure messages carry the numbers.
"""

import math
import time

import numpy as np
from scipy.linalg import expm
from scipy.optimize import brentq

from helpers import grid_min_two_unit, random_instance

from hquc import (
    Block1Problem,
    Commitment,
    QaoaConfig,
    QaoaParams,
    QuboProblem,
    apply_cost_layer,
    apply_mixer_layer,
    bits_to_string,
    build_qubo,
    default_config,
    economic_dispatch,
    enumerate_uc,
    evaluate_cost,
    init_uniform,
    phase_scale,
    run_admm,
    solve_block1,
    solve_qubo_exact,
    solve_qubo_perbit,
    solve_qubo_qaoa,
    update_r,
)

LOAD_SUITE = (100.0, 200.0, 400.0, 800.0, 1000.0)

#: Reference commitments the baseline is required to reproduce, by load.
REFERENCE_COMMITMENTS = {
    100.0: (1, 1, 0, 0, 1, 0, 1, 1, 0, 1),
    200.0: (1, 1, 1, 1, 1, 0, 1, 1, 0, 1),
    400.0: (1, 1, 1, 1, 1, 0, 1, 1, 0, 1),
    800.0: (1, 1, 1, 1, 1, 1, 1, 1, 0, 1),
    1000.0: (1, 1, 1, 1, 1, 1, 1, 1, 1, 1),
}

#: Reference commitment for the four-unit 50 MW QAOA case.
REFERENCE_FOUR_UNIT = (1, 1, 0, 1)


def _line(num: int, name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f"  [{detail}]" if detail else ""
    print(f"ACCEPTANCE {num} {name}: {status}{suffix}")


def test_criterion_1_baseline_reference_reproduction(ten_unit):
    t0 = time.monotonic()
    mismatches = []
    for load in LOAD_SUITE:
        inst = ten_unit(load)
        sol = enumerate_uc(inst)
        expected = REFERENCE_COMMITMENTS[load]
        if sol.commitment.bits != expected:
            ref = Commitment(expected)
            ref_cost = evaluate_cost(inst, ref, economic_dispatch(inst, ref))
            mismatches.append(
                f"load {load:g}: enumeration -> |{sol.commitment.bitstring}> "
                f"cost {sol.cost:.4f}, reference |{ref.bitstring}> "
                f"cost {ref_cost:.4f}"
            )
    elapsed = time.monotonic() - t0
    ok = not mismatches and elapsed < 10.0
    _line(1, "baseline reference reproduction", ok, f"{elapsed:.2f}s")
    for msg in mismatches:
        print("  " + msg)
    assert elapsed < 10.0
    assert not mismatches, (
        "exhaustive enumeration disagrees with the reference commitments; "
        "the enumerated optimum is strictly cheaper in every mismatched case: "
        + "; ".join(mismatches)
    )


def test_criterion_2_s1_matches_baseline(ten_unit):
    t0 = time.monotonic()
    problems = []
    for load in LOAD_SUITE:
        inst = ten_unit(load)
        baseline = enumerate_uc(inst)
        states = []
        report = run_admm(inst, default_config(load), observer=states.append)
        if not report.converged:
            problems.append(f"load {load:g}: not converged")
            continue
        if report.trace[-1].residual > 1e-6:
            problems.append(f"load {load:g}: residual {report.trace[-1].residual}")
        if report.iterations > 1000:
            problems.append(f"load {load:g}: {report.iterations} iterations")
        got = report.final.commitment.bits if report.final else None
        if got != baseline.commitment.bits:
            terminal = Commitment(tuple(int(round(v)) for v in states[-1].z))
            suffix = "" if report.final else " (cannot serve the load)"
            problems.append(
                f"load {load:g}: s1 -> |{terminal.bitstring}>{suffix}, "
                f"baseline |{baseline.commitment.bitstring}>"
            )
    elapsed = time.monotonic() - t0
    ok = not problems and elapsed < 60.0
    _line(2, "s1 agreement with baseline", ok, f"{elapsed:.2f}s")
    for msg in problems:
        print("  " + msg)
    assert elapsed < 60.0
    assert not problems, "; ".join(problems)


def test_criterion_3_s2_four_unit_case(four_unit):
    t0 = time.monotonic()
    inst = four_unit(50.0)
    config = default_config(
        50.0,
        backend="qaoa",
        qaoa=QaoaConfig(depth=2, optimizer_budget=100, sample_seed=0),
    )
    states = []
    report = run_admm(inst, config, observer=states.append)
    elapsed = time.monotonic() - t0
    got = report.final.commitment.bits if report.final else None
    terminal = Commitment(tuple(int(round(v)) for v in states[-1].z))
    ok = (
        report.converged
        and got == REFERENCE_FOUR_UNIT
        and elapsed < 120.0
    )
    _line(
        3,
        "s2 four-unit reproduction",
        ok,
        f"converged={report.converged}, terminal |{terminal.bitstring}>, "
        f"want |{Commitment(REFERENCE_FOUR_UNIT).bitstring}>, {elapsed:.1f}s",
    )
    assert elapsed < 120.0
    assert report.converged
    assert got == REFERENCE_FOUR_UNIT, (
        f"terminal commitment |{terminal.bitstring}> cannot serve the load and "
        f"differs from the reference {REFERENCE_FOUR_UNIT}; from the neutral "
        "zero start the coordinator settles on the all-off stationary point "
        "for this load"
    )


def test_criterion_4_warm_start_beats_cold_start(four_unit):
    inst = four_unit(50.0)
    config = default_config(
        50.0,
        backend="qaoa",
        qaoa=QaoaConfig(depth=2, optimizer_budget=100, sample_seed=0),
    )
    report = run_admm(inst, config)
    last = report.qaoa_diagnostics[-1]
    final_qubo = last.qubo
    best_bits, _ = solve_qubo_exact(final_qubo)
    key = bits_to_string(best_bits)

    prob_warm = last.probabilities[key]
    cold = solve_qubo_qaoa(final_qubo, config.qaoa, warm=None)
    prob_cold = cold.probabilities[key]
    ok = prob_warm >= prob_cold
    _line(
        4,
        "warm start optimal-bitstring probability",
        ok,
        f"warm {prob_warm:.6f} vs cold {prob_cold:.6f}",
    )
    assert prob_warm >= prob_cold


def test_criterion_5_circuit_matches_dense_oracle():
    x_gate = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    rng = np.random.default_rng(55)
    worst_amp = 0.0
    worst_norm = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 4))
        depth = int(rng.integers(1, 4))
        qubo = QuboProblem(tuple(rng.normal(0, 5, n)), float(rng.normal()))
        params = QaoaParams(
            tuple(rng.uniform(-2, 2, depth)), tuple(rng.uniform(-2, 2, depth))
        )
        scale = phase_scale(qubo)

        # Independent dense product, layer by layer, checking the norm after
        # every single layer application on the engine side.
        idx = np.arange(1 << n)
        energies = np.zeros(1 << n)
        for i, q in enumerate(qubo.linear):
            energies = energies + q * ((idx >> i) & 1)
        energies = energies / scale
        dense_state = np.full(1 << n, 2.0 ** (-n / 2.0), dtype=complex)
        state = init_uniform(n)
        for gamma, beta in zip(params.gammas, params.betas):
            state = apply_cost_layer(state, qubo, gamma, scale=scale)
            worst_norm = max(worst_norm, state.norm_error())
            state = apply_mixer_layer(state, beta)
            worst_norm = max(worst_norm, state.norm_error())
            cost_mat = np.diag(np.exp(1j * np.pi * gamma * energies / 2.0))
            single = expm(1j * np.pi * beta / 2.0 * x_gate)
            mixer_mat = np.array([[1.0]], dtype=complex)
            for _ in range(n):
                mixer_mat = np.kron(mixer_mat, single)
            dense_state = mixer_mat @ (cost_mat @ dense_state)
        worst_amp = max(worst_amp, float(np.max(np.abs(state.amplitudes - dense_state))))
    ok = worst_amp < 1e-9 and worst_norm < 1e-10
    _line(
        5,
        "dense circuit oracle equivalence",
        ok,
        f"max amplitude diff {worst_amp:.2e}, max norm error {worst_norm:.2e}",
    )
    assert worst_amp < 1e-9
    assert worst_norm < 1e-10


def test_criterion_6_qubo_against_direct_evaluation():
    rng = np.random.default_rng(66)
    worst_rel = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 11))
        y = rng.uniform(0.0, 1.0, n)
        r = rng.normal(0.0, 0.5, n)
        lam = rng.normal(0.0, 200.0, n)
        rho = float(rng.uniform(0.5, 5000.0))
        qubo = build_qubo(y, r, lam, rho)

        bits_table = ((np.arange(1 << n)[:, None] >> np.arange(n)[None, :]) & 1)
        slack = y[None, :] - bits_table + r[None, :]
        direct = (lam[None, :] * slack + (rho / 2.0) * slack * slack).sum(axis=1)
        got = qubo.energies()
        denom = np.maximum(np.abs(direct), 1.0)
        worst_rel = max(worst_rel, float(np.max(np.abs(got - direct) / denom)))

        exact_bits, exact_energy = solve_qubo_exact(qubo)
        perbit_bits, perbit_energy = solve_qubo_perbit(qubo)
        assert exact_bits == perbit_bits
        assert exact_energy == perbit_energy
    ok = worst_rel < 1e-9
    _line(6, "qubo energies and per-bit solver", ok, f"worst rel err {worst_rel:.2e}")
    assert worst_rel < 1e-9


def test_criterion_7_block1_kkt_and_grid_oracle(ten_unit):
    # Certificates on every converged first-block call along the load suite.
    worst_kkt = 0.0
    for load in LOAD_SUITE:
        report = run_admm(ten_unit(load), default_config(load))
        worst_kkt = max(worst_kkt, max(row.block1_kkt for row in report.trace))

    rng = np.random.default_rng(77)
    worst_above_grid = -math.inf
    for _ in range(20):
        inst = random_instance(rng, n=2, load_frac=float(rng.uniform(0.1, 0.9)))
        rho = float(rng.uniform(10.0, 5000.0))
        beta = float(rng.uniform(0.1, 0.9)) * rho
        z = tuple(float(b) for b in rng.integers(0, 2, 2))
        r = tuple(rng.normal(0.0, 0.3, 2))
        lam = tuple(rng.normal(0.0, rho / 10.0, 2))
        problem = Block1Problem(inst, z, r, lam, rho=rho, beta=beta)
        sol = solve_block1(problem)
        worst_kkt = max(worst_kkt, sol.kkt_residual)
        grid = grid_min_two_unit(inst, z, r, lam, rho, beta, step=1e-3)
        # The grid is feasible everywhere it is evaluated, so it can only
        # overestimate the optimum; the solver must sit at or below it.
        worst_above_grid = max(worst_above_grid, sol.objective - grid)
    ok = worst_kkt <= 1e-9 and worst_above_grid <= 1e-6
    _line(
        7,
        "block-1 KKT certificate and grid oracle",
        ok,
        f"worst KKT {worst_kkt:.2e}, worst excess over grid {worst_above_grid:.2e}",
    )
    assert worst_kkt <= 1e-9
    assert worst_above_grid <= 1e-6


def test_criterion_8_closed_form_r():
    rng = np.random.default_rng(88)
    worst_gap = 0.0
    for _ in range(1000):
        y = float(rng.uniform(0.0, 1.0))
        z = float(rng.integers(0, 2))
        lam = float(rng.normal(0.0, 500.0))
        rho = float(rng.uniform(1.0, 5000.0))
        beta = float(rng.uniform(0.1, 0.9)) * rho
        r_star = float(update_r((y,), (z,), (lam,), rho, beta)[0])

        def phi(r):
            slack = y - z + r
            return (beta / 2.0) * r * r + lam * slack + (rho / 2.0) * slack * slack

        assert phi(r_star) <= phi(r_star + 1e-3) + 1e-12
        assert phi(r_star) <= phi(r_star - 1e-3) + 1e-12

        def slope(r):
            return beta * r + lam + rho * (y - z + r)

        lo, hi = r_star - 1.0, r_star + 1.0
        assert slope(lo) < 0.0 < slope(hi)
        found = brentq(slope, lo, hi, xtol=1e-14)
        worst_gap = max(worst_gap, abs(r_star - found))
    ok = worst_gap <= 1e-8
    _line(8, "closed-form slack update", ok, f"worst gap to numeric {worst_gap:.2e}")
    assert worst_gap <= 1e-8
