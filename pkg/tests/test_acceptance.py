"""Acceptance criteria, each at its stated tolerance.

Every test prints one ``CRITERION k: PASS|FAIL`` line (visible even without
``-s``) before asserting.
"""

import cmath
import math

import numpy as np

from qwdefect import cli
from qwdefect.analytic import (
    Branch,
    DecayClass,
    build_solution,
    corollary_trig,
    lambda_squared,
    phase_grid,
    stationary_measure,
    theta_s_all_forms,
)
from qwdefect.core import (
    WalkState,
    build_wojcik_coin_field,
    evolve,
    homogeneous_field,
    step,
    time_averaged_measure,
    total_norm,
)
from qwdefect.sgf import build_system, det_A, lemma1_applicable, lemma1_residual, unit_circle_points
from qwdefect.spectral import build_truncated_operator, overflow_cap, stationarity_residual

GRID = phase_grid(97)
BRANCHES = (Branch.PLUS_I, Branch.MINUS_I)
S2 = math.sqrt(2.0)


def verdict(capsys, k, ok, detail):
    with capsys.disabled():
        print(f"\nCRITERION {k}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def test_criterion_1_special_eigenvalues(capsys):
    d_small = abs(lambda_squared(1e-8, Branch.PLUS_I) + 1j)
    d_quarter = abs(lambda_squared(0.25, Branch.PLUS_I) - 1j)
    ok = d_small <= 1e-6 and d_quarter <= 1e-12
    verdict(capsys, 1, ok, f"|l2(1e-8)+i|={d_small:.3e} (<=1e-6), |l2(1/4)-i|={d_quarter:.3e} (<=1e-12)")


def test_criterion_2_trig_consistency(capsys):
    worst_part = worst_unit = 0.0
    for phi in GRID:
        for b in BRANCHES:
            c, s = corollary_trig(phi, b)
            l2 = lambda_squared(phi, b)
            worst_part = max(worst_part, abs(c - l2.real), abs(s - l2.imag))
            worst_unit = max(worst_unit, abs(c * c + s * s - 1))
    ok = worst_part <= 1e-12 and worst_unit <= 1e-12
    verdict(capsys, 2, ok, f"max |(cos,sin)-l2|={worst_part:.3e}, max |cos^2+sin^2-1|={worst_unit:.3e} (<=1e-12)")


def test_criterion_3_stationarity(capsys):
    worst, where = 0.0, None
    for phi in GRID:
        for b in BRANCHES:
            sol = build_solution(phi, b)
            L = int(min(200, overflow_cap(sol)))
            r = stationarity_residual(sol, None, L, margin=2)
            if r > worst:
                worst, where = r, (phi, b.value, L)
    verdict(capsys, 3, worst <= 1e-10, f"max interior residual={worst:.3e} at {where} (<=1e-10)")


def test_criterion_4_theta_consistency(capsys):
    w_forms = w_prod = w_det = 0.0
    for phi in GRID:
        for b in BRANCHES:
            sol = build_solution(phi, b)
            forms = theta_s_all_forms(sol.lambda_, sol.omega, sol.alpha, sol.beta)
            w_forms = max(w_forms, max(abs(f - forms[0]) for f in forms))
            w_prod = max(w_prod, abs(sol.theta_s * sol.theta_l + 1))
            sys_ = build_system(sol.theta_s, sol.lambda_, sol.omega, sol.alpha, sol.beta)
            w_det = max(w_det, abs(det_A(sys_)))
    ok = w_forms <= 1e-12 and w_prod <= 1e-12 and w_det <= 1e-12
    verdict(capsys, 4, ok, f"forms={w_forms:.3e}, |ts*tl+1|={w_prod:.3e}, |det A|={w_det:.3e} (<=1e-12)")


def test_criterion_5_measure_structure(capsys):
    symmetric = True
    worst_ratio = 0.0
    for phi in GRID:
        for b in BRANCHES:
            sol = build_solution(phi, b)
            for x in range(1, 31):
                symmetric &= stationary_measure(sol, x) == stationary_measure(sol, -x)
                r = stationary_measure(sol, x + 1) / stationary_measure(sol, x)
                worst_ratio = max(worst_ratio, abs(r - sol.theta_s_abs_sq) / sol.theta_s_abs_sq)
    sol = build_solution(0.25, Branch.MINUS_I, 1 / S2)
    golden = {0: 1.0, 1: 3 / 5, -1: 3 / 5, 2: 3 / 25, -2: 3 / 25}
    worst_golden = max(abs(stationary_measure(sol, x) - v) for x, v in golden.items())
    ok = symmetric and worst_ratio <= 1e-12 and worst_golden <= 1e-14
    verdict(
        capsys,
        5,
        ok,
        f"symmetric={symmetric}, max rel ratio err={worst_ratio:.3e} (<=1e-12), golden err={worst_golden:.3e} (<=1e-14)",
    )


def test_criterion_6_lemma1_residual(capsys):
    worst, where = 0.0, None
    n_dec = n_na = 0
    failing = []
    for phi in GRID:
        for b in BRANCHES:
            sol = build_solution(phi, b)
            if not lemma1_applicable(sol):
                # recorded, never counted as a pass
                assert sol.decay_class is not DecayClass.DECAYING
                n_na += 1
                continue
            n_dec += 1
            for z in unit_circle_points(sol):
                r = max(lemma1_residual(sol, z, 400))
                if r > worst:
                    worst, where = r, (phi, b.value, round(cmath.phase(z), 4))
                if r > 1e-9:
                    failing.append((phi, b.value))
    n_fail = len(set(failing))
    verdict(
        capsys,
        6,
        worst <= 1e-9,
        f"{n_dec} DECAYING, {n_na} NOT-APPLICABLE; N=400 max residual={worst:.3e} at {where} (<=1e-9); "
        f"{n_fail} (phi, branch) pairs above tolerance",
    )


def test_criterion_7_unitarity(capsys):
    rng = np.random.default_rng(20261016)
    steps, radius = 10_000, 10
    L = steps + radius + 2
    amps = np.zeros((2 * L + 1, 2), dtype=complex)
    sl = slice(L - radius, L + radius + 1)
    amps[sl] = rng.normal(size=(2 * radius + 1, 2)) + 1j * rng.normal(size=(2 * radius + 1, 2))
    amps /= np.linalg.norm(amps)
    field = build_wojcik_coin_field(0.37)
    init = WalkState(L, amps)
    final = evolve(init, field, steps)
    drift = abs(total_norm(final) - total_norm(init))

    small_L = 40
    op = build_truncated_operator(field, small_L)
    worst_op = 0.0
    for _ in range(5):
        a = rng.normal(size=(2 * small_L + 1, 2)) + 1j * rng.normal(size=(2 * small_L + 1, 2))
        s = WalkState(small_L, a)
        worst_op = max(worst_op, float(np.max(np.abs(op.apply_state(s).amplitudes - step(s, field).amplitudes))))
    ok = drift <= 1e-10 and worst_op <= 1e-13 and not final.boundary_leak
    verdict(capsys, 7, ok, f"norm drift over 1e4 steps={drift:.3e} (<=1e-10), |op-step|={worst_op:.3e} (<=1e-13)")


def test_criterion_8_empirical_localization(capsys):
    T = 2000
    L = T + 2
    init = WalkState.localized(L, 1 / S2, 1j / S2)
    wojcik = time_averaged_measure(init, build_wojcik_coin_field(0.25), T).at(0)
    checkpoints = [2**k for k in range(11)] + [T]
    control = {t: time_averaged_measure(init, homogeneous_field(), t).at(0) for t in checkpoints}
    dyadic = [control[2**k] for k in range(11)]
    monotone = all(b < a for a, b in zip(dyadic, dyadic[1:]))
    ok = wojcik > 0.01 and control[T] < 0.02 and monotone
    verdict(
        capsys,
        8,
        ok,
        f"defect origin average={wojcik:.4e} (>0.01), control={control[T]:.4e} (<0.02), control monotone={monotone}",
    )


def test_criterion_9_determinism(capsys, tmp_path):
    blobs = []
    for name in ("first.json", "second.json"):
        cfg = cli.RunConfig(command="verify", grid_points=97, output_path=str(tmp_path / name))
        cli.cmd_verify(cfg)
        blobs.append((tmp_path / name).read_bytes())
    ok = blobs[0] == blobs[1]
    verdict(capsys, 9, ok, f"two reports of {len(blobs[0])} bytes identical={ok}")
