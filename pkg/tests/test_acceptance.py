"""Acceptance criteria 1-10, one recorded PASS/FAIL line each."""

import time
from math import comb

import numpy as np

from supq.bases import casimir, su11_commutator_check, su22_gram
from supq.cli import run
from supq.coherent import CoherentState, expand, overlap
from supq.definetti import definetti_gap, ratio_and_bound, reproducing_kernel_check, resolution_gram, su11_state
from supq.fock import bargmann_inner, invariant_subspace_dim, laplacian_kernel_dim_in_invariants
from supq.haar import n1_ks_check, tv_n1_exact, tv_sweep
from supq.hyperbolic import mobius_act, random_disc_point, random_group_element
from supq.phase_space import covariance, is_symplectic, pure_state_residuals, symplectic_of
from supq.results import canonical_json

GRID = [(p, q, n, d) for p in (1, 2) for q in (1, 2) for n in range(min(p, q), 4) for d in range(4)]


def test_criterion_01_dimension(criterion):
    t = time.perf_counter()
    bad = [c for c in GRID if invariant_subspace_dim(*c) != comb(c[0] * c[1] + c[3], c[3])]
    dt = time.perf_counter() - t
    ok = not bad and len(GRID) >= 18 and dt < 300
    criterion(1, ok, f"{len(GRID)} cases, mismatches {bad}, {dt:.1f} s")
    assert ok


def test_criterion_02_trivial_kernel(criterion):
    bad = [c for c in GRID if laplacian_kernel_dim_in_invariants(*c) != 1]
    criterion(2, not bad, f"{len(GRID)} cases, kernel dimension != 1 at {bad}")
    assert not bad


def test_criterion_03_overlap_series(criterion):
    rng = np.random.default_rng(3)
    t = time.perf_counter()
    worst = 0.0
    for p, q in [(1, 1), (1, 2), (2, 2)]:
        for _ in range(50):
            L1, L2 = random_disc_point(rng, p, q, 0.6), random_disc_point(rng, p, q, 0.6)
            series = complex(bargmann_inner(expand(CoherentState(L1, 1), 40), expand(CoherentState(L2, 1), 40)))
            closed = overlap(L1, L2, 1)
            worst = max(worst, abs(series - closed) / abs(closed))
    dt = time.perf_counter() - t
    ok = worst <= 1e-8 and dt < 120
    criterion(3, ok, f"150 pairs, d=40, n=1: worst relative error {worst:.2e}, {dt:.1f} s")
    assert ok


def test_criterion_04_resolution_of_identity(criterion):
    gerr = float(np.abs(resolution_gram(3, 6) - np.eye(7)).max())
    rng = np.random.default_rng(4)
    zs = []
    for _ in range(3):
        L1, L2 = random_disc_point(rng, 1, 2, 0.5), random_disc_point(rng, 1, 2, 0.5)
        est, closed, se = reproducing_kernel_check(1, 2, 3, L1, L2, budget=200_000, rng=rng)
        zs.append(abs(est - closed) / se)
    ok = gerr <= 1e-8 and max(zs) <= 3
    criterion(4, ok, f"quadrature Gram error {gerr:.2e}; Monte Carlo (1,2) n=3 |z| max {max(zs):.2f}")
    assert ok


def test_criterion_05_phase_space(criterion):
    rng = np.random.default_rng(5)
    transport = homo = form = pure = 0.0
    shapes = [(1, 1), (1, 2), (2, 1), (2, 2)]
    for i in range(100):
        p, q = shapes[i % 4]
        g, h = random_group_element(rng, p, q), random_group_element(rng, p, q)
        L = random_disc_point(rng, p, q)
        S = symplectic_of(g)
        G = covariance(L)
        transport = max(transport, np.abs(covariance(mobius_act(g, L)) - S @ G @ S.T).max())
        homo = max(homo, np.abs(symplectic_of(g @ h) - S @ symplectic_of(h)).max())
        form = max(form, 0.0 if is_symplectic(S, p, q, 1e-10) else np.inf)
        pure = max(pure, *pure_state_residuals(G, p, q))
    ok = transport <= 1e-9 and homo <= 1e-10 and form == 0.0 and pure <= 1e-9
    criterion(5, ok, f"transport {transport:.1e}, homomorphism {homo:.1e}, "
                     f"symplectic {'ok' if form == 0 else 'violated'}, pure-state {pure:.1e}")
    assert ok


def test_criterion_06_su11(criterion):
    bad = []
    for n in range(1, 6):
        for name, r in su11_commutator_check(n, 8).items():
            if r["interior"] != 0:
                bad.append((n, name))
        _, rep = casimir(n, 8)
        if any(x != rep["expected"] for x in rep["interior_diagonal"]) or rep["interior_residual"] != 0:
            bad.append((n, "casimir"))
        if any(v != 0 for v in rep["commutator_residuals"].values()):
            bad.append((n, "casimir commutators"))
    criterion(6, not bad, f"n=1..5, d=8, exact: failures {bad}")
    assert not bad


def test_criterion_07_su22(criterion, tmp_path):
    t = time.perf_counter()
    reports = {n: su22_gram(n, 3) for n in (2, 3, 4)}
    dt = time.perf_counter() - t
    ok = all(r.is_identity for r in reports.values()) and dt < 1800
    code = run(["su22-verify", "--n", "2", "--max-weight", "4", "--variant", "alternative", "--out", str(tmp_path)])
    ok = ok and code == 2
    sizes = {n: len(r.indices) for n, r in reports.items()}
    criterion(7, ok, f"Gram = identity for n=2,3,4 at weight <= 3 ({sizes} vectors, {dt:.2f} s); "
                     f"failing variant reported with exit code {code}")
    assert ok


def test_criterion_08_definetti(criterion):
    rng = np.random.default_rng(8)
    worst = -np.inf
    for n in (2, 3, 4):
        for k in (2, 4, 6):
            c = rng.standard_normal(5) + 1j * rng.standard_normal(5)
            r = definetti_gap(su11_state(c / np.linalg.norm(c), n + k), n, k)
            worst = max(worst, r.distance - (r.theorem_bound + r.tail))
    ratio_bad = []
    cases = 0
    for p in range(1, 4):
        for q in range(1, 4):
            for n in range(41):
                for k in range(p + q, 41):
                    rb = ratio_and_bound(p, q, n, k)
                    cases += 1
                    if not (rb.consistent and rb.respects_lower_bound):
                        ratio_bad.append((p, q, n, k))
    ok = worst <= 0 and not ratio_bad
    criterion(8, ok, f"max(distance - bound - tail) = {worst:.3f} over 9 states (d=4); "
                     f"{cases} exact ratio cases, failures {ratio_bad[:5]}")
    assert ok


def test_criterion_09_haar(criterion):
    t = time.perf_counter()
    ms = np.arange(4, 1025)
    tv = np.array([tv_n1_exact(int(m)) for m in ms])
    exact_ok = bool(np.all(tv <= 2 / (ms - 1)))
    rows = tv_sweep(ns=(1, 2, 3), factors=(4, 8, 16, 32, 64), budget=100_000, seed=0)
    sweep_ok = all(r.passed for r in rows)
    ks, _ = n1_ks_check(m=8, samples=1_000_000, seed=0)
    dt = time.perf_counter() - t
    ok = exact_ok and sweep_ok and ks <= 0.002 and dt < 1800
    worst = max(rows, key=lambda r: r.estimate - r.theorem_bound)
    criterion(9, ok, f"exact n=1 bound {'holds' if exact_ok else 'violated'} for m=4..1024; "
                     f"{len(rows)} sweep points {'pass' if sweep_ok else 'FAIL'} (tightest n={worst.n} m={worst.m} "
                     f"{worst.statistic} {worst.estimate:.4f} vs {worst.theorem_bound:.4f}); KS {ks:.5f}; {dt:.0f} s")
    assert ok


REPRO = [
    ["overlap", "--p", "2", "--q", "2", "--n", "1", "--d", "30"],
    ["covariance", "--p", "2", "--q", "2"],
    ["symplectic-check", "--p", "1", "--q", "2"],
    ["dim-scan", "--p", "2", "--q", "1", "--n", "2", "--d", "2"],
    ["kernel-scan", "--p", "1", "--q", "1", "--n", "2", "--d", "2"],
    ["su11-verify", "--n", "2", "--d", "5"],
    ["su22-verify", "--n", "2", "--max-weight", "2"],
    ["identity-check", "--p", "1", "--q", "2", "--n", "3", "--budget", "20000"],
    ["definetti-gap", "--n", "2", "--k", "2", "--d", "2"],
    ["haar-tv", "--n", "2", "--m", "40", "--budget", "20000", "--threads", "2"],
    ["count-fidelity", "--m", "32"],
]


def test_criterion_10_reproducibility(criterion, tmp_path):
    differ = []
    for argv in REPRO:
        texts = []
        for rep in ("a", "b"):
            out = tmp_path / rep / argv[0]
            run([*argv, "--seed", "11", "--out", str(out)])
            files = sorted(p for p in out.iterdir() if p.suffix in (".json", ".csv"))
            texts.append([canonical_json(p.read_text()) if p.suffix == ".json" else p.read_bytes() for p in files])
        if texts[0] != texts[1]:
            differ.append(argv[0])
    criterion(10, not differ, f"{len(REPRO)} subcommands rerun with seed 11; differing outputs {differ}")
    assert not differ
