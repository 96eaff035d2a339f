"""End-to-end acceptance checks, one per criterion.

Each test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line with the measured
numbers before asserting, so the verdicts are visible in ``pytest -v`` output.
"""
import math
import time

import numpy as np
import pytest
from oracles import distance_by_grid

from dnls_gibbs.cli import default_lambdas, main
from dnls_gibbs.gibbs import GibbsSpec, default_radii, density_convergence_study
from dnls_gibbs.hierarchy import compare_printed, generate, grading_problems, involution_holds, to_complex
from dnls_gibbs.spectral import FourierField, check_inequalities, flow_series, integrate_flow, random_trig_poly
from dnls_gibbs.tails import (
    concentration_dichotomy, derivative_functional, linear_tail_study, quadratic_tail_study, sobolev_tail_study,
    sup_tail_study,
)
from dnls_gibbs.wick import hypercontractivity_check, l2_distance_analytic, l2_distance_mc


@pytest.fixture
def verdict(capsys):
    def say(n, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n} {'PASS' if ok else 'FAIL'}: {detail}")
        return ok
    return say


def test_criterion_1_hierarchy_fidelity(verdict):
    t0 = time.perf_counter()
    entries = generate(4)
    report = compare_printed(entries)
    elapsed = time.perf_counter() - t0
    required = all(report[n][0] for n in (0, 1, 2))
    extra = "; ".join(f"h{n} {'matches' if s else 'differs by ' + d.to_text()}" for n, (s, d) in sorted(report.items()))
    ok = required and elapsed < 30
    assert verdict(1, ok, f"{extra}; {elapsed:.2f}s"), extra


def test_criterion_2_gradings_and_involution(verdict):
    t0 = time.perf_counter()
    entries = generate(10)
    grading = {e.n: grading_problems(e) for e in entries}
    bad_grading = {n: p for n, p in grading.items() if p}
    bad_inv = [(m, n) for m in range(7) for n in range(m, 7) if not involution_holds(entries, m, n)]
    elapsed = time.perf_counter() - t0
    ok = not bad_grading and not bad_inv and elapsed < 300
    assert verdict(2, ok, f"grading violations {bad_grading or 'none'} (n<=10); "
                          f"involution failures {bad_inv or 'none'} (m,n<=6); {elapsed:.1f}s")


def test_criterion_3_conservation(verdict):
    hs = [to_complex(e.h) for e in generate(6)[::2]]
    psi0 = FourierField.from_modes(32, {1: 0.1, -2: 0.05})
    _, rows = flow_series(psi0, 0.5, 1.0, 1e-4, hs, every=1000)
    rows = np.array(rows)
    drift = np.max(np.abs(rows[:, 1:] - rows[0, 1:]) / np.abs(rows[0, 1:]), axis=0)
    A, beta = 0.1, 1.0
    pw = integrate_flow(FourierField.from_modes(32, {1: A}), beta, 1.0, 1e-4)
    exact = FourierField.from_modes(32, {1: A * np.exp(1j * (1 + beta * A * A))})
    err = float(np.max(np.abs(pw.coeffs - exact.coeffs)))
    ok = bool(np.all(drift < 1e-6)) and err < 1e-8
    assert verdict(3, ok, f"max relative drift E0..E3 = {', '.join(f'{d:.1e}' for d in drift)}; "
                          f"plane-wave error {err:.1e}")


def test_criterion_4_inequalities(verdict):
    beta = 1.0
    r0 = math.sqrt(2 / (9 * beta))
    rng = np.random.default_rng(20240518)
    h2 = to_complex(generate(2)[2].h)
    viol = [0, 0, 0]
    tight = [math.inf] * 3
    for _ in range(10_000):
        rep = check_inequalities(random_trig_poly(rng, 16, r0), beta, h2)
        for j in range(3):
            viol[j] += not rep.holds[j]
            if rep.rhs[j] > 0:
                tight[j] = min(tight[j], rep.rhs[j] / max(rep.lhs[j], 1e-300))
    ok = viol == [0, 0, 0]
    assert verdict(4, ok, f"violations GN/cubic/chain = {viol} over 10^4 fields; "
                          f"smallest rhs/lhs = {', '.join(f'{t:.3g}' for t in tight)}")


def test_criterion_5_wick(verdict):
    lines, ok = [], True
    for k in (2, 3):
        for M, N in ((4, 8), (8, 16)):
            w = l2_distance_analytic(k, M, N)
            ref = distance_by_grid(k, M, N)
            rel = abs(w.total - ref) / ref
            est, se = l2_distance_mc(k, M, N, 100_000, seed=1000 * k + M)
            z = abs(est - w.total) / se
            ok &= rel < 1e-9 and w.w1 == 0.0 and z <= 3
            lines.append(f"k={k} ({M},{N}) total={w.total:.5g} rel={rel:.1e} W1={w.w1} z={z:.2f}")
        scaled = [M * l2_distance_analytic(k, M, 2 * M).total for M in (4, 8, 16, 32)]
        ratio = max(scaled) / min(scaled)
        ok &= ratio < 3
        lines.append(f"k={k} M*total={', '.join(f'{s:.3g}' for s in scaled)} ratio={ratio:.3f}")
    assert verdict(5, ok, "; ".join(lines))


def test_criterion_6_hypercontractivity(verdict):
    rep = hypercontractivity_check(2, 16, 100_000, seed=6)
    assert verdict(6, rep.passed, f"L4/L2 = {rep.ratio:.4f} (rel. stderr {rep.rel_stderr:.3f}) vs bound {rep.bound:g}")


def test_criterion_7_tails(verdict):
    k = 2
    flagged = {}
    for N in (16, 32, 64):
        seed = N
        flagged[("sobolev", N)] = sobolev_tail_study(k, 1.0, N, default_lambdas("sobolev", k, N), 100_000, seed).n_flagged
        flagged[("quadratic", N)] = quadratic_tail_study(k, N, default_lambdas("quadratic", k, N), 100_000,
                                                         seed + 1).n_flagged
        flagged[("sup", N)] = sup_tail_study(k, N, default_lambdas("sup", k, N), 10_000, seed + 2).n_flagged
        flagged[("linear", N)] = linear_tail_study(k, N, derivative_functional(N, 1), default_lambdas("linear", k, N),
                                                   100_000, seed + 3).n_flagged
    conc = concentration_dichotomy(k, 1.25, 1.75, [16, 32, 64, 128], 10_000, seed=7)
    per_kind = {kind: [flagged[(kind, N)] for N in (16, 32, 64)] for kind in ("sobolev", "quadratic", "sup", "linear")}
    ok = all(v == 0 for v in flagged.values()) and conc.passed
    detail = "; ".join(f"{kind} flagged {v} at N=16/32/64" for kind, v in per_kind.items())
    detail += f"; concentration {'pass' if conc.passed else 'fail'} (low medians " \
              f"{', '.join(f'{m:.3f}' for m in conc.medians_low)})"
    assert verdict(7, ok, detail)


def test_criterion_8_density_convergence(verdict):
    spec = GibbsSpec(2, 64, 1.0, default_radii(2, 1.0), seed=8)
    rep = density_convergence_study(spec, [8, 16, 32, 64], 10_000)
    diffs = [d for _, d, _ in rep.diffs]
    ok = rep.strictly_decreasing and rep.moment_ratio(1.5) < 2
    assert verdict(8, ok, f"E|G_N - G_2N| = {', '.join(f'{d:.4f}' for d in diffs)}; "
                          f"E[G^1.5] max/min = {rep.moment_ratio(1.5):.3f}")


def test_criterion_9_determinism(verdict, tmp_path):
    runs = [
        ["sample", "--k", "2", "--N", "8", "--count", "5000"],
        ["wick", "--k", "2", "--M", "3", "--N", "6", "--samples", "5000", "--hyper"],
        ["tails", "--kind", "all", "--k", "2", "--N", "16", "--samples", "5000"],
        ["density", "--Ns", "4,8,16", "--samples", "3000"],
        ["inequalities", "--trials", "200"],
        ["conserve", "--N", "8", "--t", "0.05", "--dt", "1e-3"],
        ["hierarchy", "--n-max", "4"],
    ]
    differing = []
    for args in runs:
        outs = []
        for tag, workers in (("a", 1), ("b", 1), ("c", 4)):
            d = tmp_path / f"{args[0]}_{tag}"
            main(args + ["--seed", "13", "--workers", str(workers), "--out", str(d)])
            outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
        if not (outs[0] == outs[1] == outs[2]) or not outs[0]:
            differing.append(args[0])
    ok = not differing
    assert verdict(9, ok, f"{len(runs)} commands x (repeat, 4 workers): "
                          f"{'all byte-identical' if ok else 'differ: ' + ', '.join(differing)}")
