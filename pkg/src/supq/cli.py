"""Command-line experiment runner.

Every subcommand writes ``result.json`` (and CSV files where relevant) to
``--out`` and exits with 0 on pass, 2 on a failed check or conjecture
(a finding) and 1 on errors.
"""

import argparse
import sys
from fractions import Fraction
from math import comb
from pathlib import Path

import numpy as np

from . import haar
from .bases import casimir, su11_commutator_check, su22_coherent_expansion_check, su22_gram
from .coherent import CoherentState, expand, overlap
from .definetti import definetti_gap, ratio_and_bound, reproducing_kernel_check, resolution_gram, su11_state
from .errors import BudgetError, CapacityError, SupqError
from .exact import GaussianRational
from .fock import bargmann_inner, invariant_subspace_dim, laplacian_kernel_dim_in_invariants
from .hyperbolic import mobius_act, random_disc_point, random_group_element
from .phase_space import covariance, is_symplectic, omega, pure_state_residuals, symplectic_of
from .results import ExperimentResult, experiment_rng, read_result, write_plotdata, write_result, write_sweep_csv

# claim checked by each subcommand, recorded in its result
CLAIMS = {
    "overlap": "coherent-state overlap <L1,n|L2,n> = [det(1-L1L1^+)^(1/2) det(1-L2L2^+)^(1/2) / det(1-L1^+L2)]^n",
    "covariance": "covariance transport Gamma(g.L) = s(g) Gamma(L) s(g)^T; pure-state Gamma Omega Gamma^T = Omega, det Gamma = 1",
    "symplectic-check": "s: SU(p,q) -> Sp(2(p+q), R) is a group homomorphism preserving Omega",
    "dim-scan": "dimension theorem: U(n)-invariant polynomials of degree <= d have dimension binom(pq+d, d)",
    "kernel-scan": "trivial kernel: the only invariant annihilated by every Laplacian Delta_ij is the constant",
    "su11-verify": "SU(1,1) algebra on Z^k: [K0,K+-] = +-K+-, [K-,K+] = 2K0, Casimir = n/2 (n/2 - 1)",
    "su22-verify": "SU(2,2) conjecture: normalized phi_{r,s}^{l,m} are orthonormal and expand the coherent state",
    "identity-check": "resolution of the identity: int |L,n><L,n| dmu_{p,q,n} = 1 on the symmetric subspace",
    "definetti-gap": "Gaussian de Finetti: || tr_k psi - mixture ||_tr <= 3npq / (2(n+k-p-q))",
    "haar-tv": "truncated Haar: || H_{m,n} - G^{n x n} ||_TV <= 2n^3 / (m-n)",
    "count-fidelity": "photon-count laws: Poisson(alpha^2) and NegBin(m, sigma^2) concentrate together as m grows",
    "report": "summary of stored results",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(1)


def _common(sp):
    sp.add_argument("--p", type=int, default=1)
    sp.add_argument("--q", type=int, default=1)
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--d", type=int, default=None)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--budget", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None, help="output directory (default results/<subcommand>)")
    sp.add_argument("--threads", type=int, default=None, help="worker threads (default $SUPQ_THREADS or all cores)")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="exact", action="store_true", default=None)
    mode.add_argument("--float", dest="exact", action="store_false")
    sp.add_argument("--tol", type=float, default=None)


def build_parser():
    ap = _Parser(prog="supq", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in CLAIMS:
        sp = sub.add_parser(name, help=CLAIMS[name])
        _common(sp)
        if name == "overlap":
            sp.set_defaults(n=1)
        if name == "su22-verify":
            sp.add_argument("--max-weight", type=int, default=3)
            sp.add_argument("--variant", choices=("basis", "alternative"), default="basis")
        if name == "haar-tv":
            sp.add_argument("--bins", type=int, default=64)
            sp.add_argument("--sweep", action="store_true", help="run n = 1..--n over m = 4n..64n")
        if name == "count-fidelity":
            sp.add_argument("--alpha2", type=float, default=1.0)
            sp.add_argument("--modes", type=int, default=1)
        if name == "identity-check":
            sp.add_argument("--jmax", type=int, default=6)
    return ap


def _verdict(ok, conjecture=False):
    if ok:
        return "pass"
    return "finding" if conjecture else "fail"


# subcommands ----------------------------------------------------------------


def cmd_overlap(args, res, out):
    rng = experiment_rng(res.experiment, args.seed)
    p, q, n = args.p, args.q, args.n
    tol = args.tol or 1e-8
    L1 = random_disc_point(rng, p, q)
    L2 = random_disc_point(rng, p, q)
    if args.exact:
        d = args.d if args.d is not None else 16
        to_q = lambda M: [[GaussianRational(Fraction(x.real).limit_denominator(100), Fraction(x.imag).limit_denominator(100))
                           for x in row] for row in M]
        E1, E2 = to_q(L1), to_q(L2)
        series = bargmann_inner(expand(CoherentState(E1, n), d, normalized=False),
                                expand(CoherentState(E2, n), d, normalized=False))
        A1 = np.array([[complex(x) for x in row] for row in E1])
        A2 = np.array([[complex(x) for x in row] for row in E2])
        closed = complex(np.linalg.det(np.eye(q) - A1.conj().T @ A2) ** (-n))
        series_c = complex(series)
        L1, L2 = A1, A2
    else:
        d = args.d if args.d is not None else 40
        series = bargmann_inner(expand(CoherentState(L1, n), d), expand(CoherentState(L2, n), d))
        closed = overlap(L1, L2, n)
        series_c = complex(series)
    rel = abs(series_c - closed) / abs(closed)
    res.params.update(p=p, q=q, n=n, d=d, exact=bool(args.exact))
    res.estimates.update(L1=L1, L2=L2, closed_form=closed, series=series, relative_error=rel)
    res.bounds["tolerance"] = tol
    print(f"closed form {closed:.12g}\nseries      {series_c:.12g}\nrelative error {rel:.3e}")
    return _verdict(rel <= tol)


def cmd_covariance(args, res, out):
    rng = experiment_rng(res.experiment, args.seed)
    p, q = args.p, args.q
    tol = args.tol or 1e-9
    L = random_disc_point(rng, p, q)
    g = random_group_element(rng, p, q)
    G = covariance(L)
    S = symplectic_of(g)
    transport = float(np.abs(covariance(mobius_act(g, L)) - S @ G @ S.T).max())
    sym, det = pure_state_residuals(G, p, q)
    res.params.update(p=p, q=q)
    res.estimates.update(Lambda=L, covariance=G, transport_error=transport, symplectic_residual=sym, det_residual=det)
    res.bounds["tolerance"] = tol
    print(np.array2string(G, precision=6, suppress_small=True))
    print(f"transport error {transport:.3e}  |G W G^T - W| {sym:.3e}  |det G - 1| {det:.3e}")
    return _verdict(max(transport, sym, det) <= tol)


def cmd_symplectic(args, res, out):
    rng = experiment_rng(res.experiment, args.seed)
    p, q = args.p, args.q
    tol = args.tol or 1e-10
    g1 = random_group_element(rng, p, q)
    g2 = random_group_element(rng, p, q)
    S1, S2 = symplectic_of(g1), symplectic_of(g2)
    hom = float(np.abs(symplectic_of(g1 @ g2) - S1 @ S2).max())
    W = omega(p, q)
    form = float(max(np.abs(S @ W @ S.T - W).max() for S in (S1, S2)))
    res.params.update(p=p, q=q)
    res.estimates.update(homomorphism_error=hom, form_error=form, symplectic=[is_symplectic(S1, p, q), is_symplectic(S2, p, q)])
    res.bounds["tolerance"] = tol
    print(f"homomorphism error {hom:.3e}  form error {form:.3e}")
    return _verdict(max(hom, form) <= tol)


def _scan(args, res, out, fn, expected_fn, label):
    p, q, n = args.p, args.q, args.n
    d = args.d if args.d is not None else 2
    values = [fn(p, q, n, e) for e in range(d + 1)]
    expected = [expected_fn(p, q, e) for e in range(d + 1)]
    res.params.update(p=p, q=q, n=n, d=d)
    res.estimates["by_degree"] = values
    res.bounds["expected_by_degree"] = expected
    write_plotdata(out / "plotdata.csv", range(d + 1), values)
    print(values[-1])
    print(f"{label} = {values[-1]}, expected {expected[-1]}")
    return _verdict(values == expected)


def cmd_dim(args, res, out):
    return _scan(args, res, out, invariant_subspace_dim, lambda p, q, d: comb(p * q + d, d), "dim")


def cmd_kernel(args, res, out):
    return _scan(args, res, out, laplacian_kernel_dim_in_invariants, lambda p, q, d: 1, "kernel dim")


def cmd_su11(args, res, out):
    n = args.n
    d = args.d if args.d is not None else 16
    comm = su11_commutator_check(n, d)
    _, rep = casimir(n, d)
    interior = {k: v["interior"] for k, v in comm.items()}
    ok = (
        all(v == 0 for v in interior.values())
        and all(x == rep["expected"] for x in rep["interior_diagonal"])
        and rep["interior_residual"] == 0
        and all(v == 0 for v in rep["commutator_residuals"].values())
    )
    res.params.update(n=n, d=d)
    res.estimates.update(commutators=comm, casimir_diagonal=rep["interior_diagonal"],
                         casimir_offdiagonal=rep["interior_residual"],
                         casimir_commutators=rep["commutator_residuals"])
    res.bounds["casimir"] = rep["expected"]
    print(f"Casimir {rep['expected']} on rows 0..{d - 1}: {'exact' if ok else 'MISMATCH'}")
    return _verdict(ok)


def cmd_su22(args, res, out):
    n, W = args.n, args.max_weight
    rep = su22_gram(n, W, args.variant)
    Lam = [[Fraction(1, 3), Fraction(1, 5)], [Fraction(1, 7), Fraction(1, 4)]]
    exp = su22_coherent_expansion_check(Lam, n, W, args.variant)
    res.params.update(n=n, max_weight=W, variant=args.variant)
    res.estimates.update(gram=rep, expansion=exp, expansion_Lambda=Lam)
    ok = rep.is_identity and exp["agrees"]
    print(f"{len(rep.indices)} vectors, Gram {'= identity' if rep.is_identity else f'has {len(rep.offending)} bad entries'}; "
          f"coherent expansion {'agrees' if exp['agrees'] else 'differs'}")
    return _verdict(ok, conjecture=True)


def cmd_identity(args, res, out):
    rng = experiment_rng(res.experiment, args.seed)
    p, q, n = args.p, args.q, args.n
    L1 = random_disc_point(rng, p, q, 0.5)
    L2 = random_disc_point(rng, p, q, 0.5)
    res.params.update(p=p, q=q, n=n)
    if p == 1 and q == 1:
        tol = args.tol or 1e-8
        G = resolution_gram(n, args.jmax)
        gerr = float(np.abs(G - np.eye(args.jmax + 1)).max())
        est, closed, kerr = reproducing_kernel_check(1, 1, n, L1, L2)
        res.params["jmax"] = args.jmax
        res.estimates.update(gram_error=gerr, kernel=est, closed_form=closed, kernel_error=kerr)
        res.bounds["tolerance"] = tol
        print(f"Gram error {gerr:.3e}  kernel error {kerr:.3e}")
        return _verdict(max(gerr, kerr) <= tol)
    budget = args.budget or 200_000
    est, closed, se = reproducing_kernel_check(p, q, n, L1, L2, budget=budget, rng=rng)
    z = abs(est - closed) / se
    res.params["budget"] = budget
    res.estimates.update(estimate=est, closed_form=closed, standard_error=se, z=z)
    res.bounds["z_max"] = 3.0
    print(f"estimate {est:.6g}  closed {closed:.6g}  z = {z:.2f}")
    return _verdict(z <= 3.0)


def cmd_definetti(args, res, out):
    rng = experiment_rng(res.experiment, args.seed)
    n, k = args.n, args.k
    d = args.d if args.d is not None else 3
    c = rng.standard_normal(d + 1) + 1j * rng.standard_normal(d + 1)
    c /= np.linalg.norm(c)
    r = definetti_gap(su11_state(c, n + k), n, k)
    rb = ratio_and_bound(args.p, args.q, n, k)
    res.params.update(n=n, k=k, d=d, ratio_p=args.p, ratio_q=args.q)
    res.estimates.update(gap=r, coefficients=c, ratio=rb.ratio, ratio_forms_agree=rb.consistent)
    res.bounds.update(definetti=r.theorem_bound, ratio_lower=rb.lower_bound)
    print(f"distance {r.distance:.6f} <= bound {r.theorem_bound:.6f} + tail {r.tail:.2e}; ratio {rb.ratio}")
    return _verdict(r.passed and rb.consistent and rb.respects_lower_bound)


def _threads(args):
    return args.threads if args.threads else haar.default_threads()


def cmd_haar(args, res, out):
    budget = args.budget or 100_000
    threads = _threads(args)
    if args.sweep:
        rows = haar.tv_sweep(ns=range(1, args.n + 1), budget=budget, seed=args.seed, bins=args.bins, threads=threads)
    else:
        m = args.m if args.m is not None else 100
        rows = haar.tv_lower_bounds(haar.TruncationParams(m, args.n, budget, args.seed), bins=args.bins, threads=threads)
    exact = {}
    for m in sorted({r.m for r in rows if r.n == 1}):
        exact[str(m)] = haar.tv_n1_exact(m)
    res.params.update(n=args.n, m=args.m, budget=budget, bins=args.bins, sweep=args.sweep)
    res.estimates.update(lower_bounds=rows, tv_n1_exact=exact)
    res.bounds["theorem_bound"] = {f"{r.n},{r.m}": r.theorem_bound for r in rows}
    write_sweep_csv(out / "sweep.csv", rows)
    best = {}
    for r in rows:
        key = (r.n, r.m)
        if key not in best or r.estimate > best[key].estimate:
            best[key] = r
    xs = [m for _, m in best]
    write_plotdata(out / "plotdata.csv", xs, [b.estimate for b in best.values()], [b.ci_width for b in best.values()])
    ok = all(r.passed for r in rows) and all(v <= 2 / (int(m) - 1) for m, v in exact.items())
    for r in rows:
        print(f"n={r.n} m={r.m} {r.statistic:<11} estimate {r.estimate:.4f} "
              f"[{r.ci_lo:.4f}, {r.ci_hi:.4f}] bound {r.theorem_bound:.6f} {'pass' if r.passed else 'FAIL'}")
    return _verdict(ok)


def cmd_count(args, res, out):
    M = args.m if args.m is not None else 64
    a2 = args.alpha2
    ms = [m for m in (1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024) if m <= M]
    p = haar.CountDistribution("poisson", alpha2=(a2,) * args.modes)
    fids, tails = [], []
    for m in ms:
        sigma = (a2 / (m + a2)) ** 0.5
        q = haar.CountDistribution("negbin", m=m, sigma=(sigma,) * args.modes)
        f, t = haar.count_fidelity(p, q)
        fids.append(f)
        tails.append(t)
    res.params.update(alpha2=a2, modes=args.modes, m_max=M)
    res.estimates.update(m=ms, fidelity=fids, tail=tails)
    write_plotdata(out / "plotdata.csv", ms, fids, tails)
    for m, f in zip(ms, fids):
        print(f"m={m:<5} fidelity {f:.10f}")
    ok = all(b >= a - 1e-12 for a, b in zip(fids, fids[1:])) and all(0 <= f <= 1 + 1e-12 for f in fids)
    return _verdict(ok)


def cmd_report(args, res, out):
    root = Path(args.out) if args.out else Path("results")
    rows = []
    for path in sorted(root.rglob("result.json")):
        if path.parent == out:
            continue
        r = read_result(path)
        rows.append({"experiment": r.experiment, "path": str(path.parent), "verdict": r.verdict, "claim": r.claim})
    res.estimates["results"] = rows
    for r in rows:
        print(f"{r['verdict']:<8} {r['experiment']:<17} {r['path']}")
    if not rows:
        print("no results found")
    return "pass" if all(r["verdict"] == "pass" for r in rows) else "finding"


COMMANDS = {
    "overlap": cmd_overlap,
    "covariance": cmd_covariance,
    "symplectic-check": cmd_symplectic,
    "dim-scan": cmd_dim,
    "kernel-scan": cmd_kernel,
    "su11-verify": cmd_su11,
    "su22-verify": cmd_su22,
    "identity-check": cmd_identity,
    "definetti-gap": cmd_definetti,
    "haar-tv": cmd_haar,
    "count-fidelity": cmd_count,
    "report": cmd_report,
}


def run(argv=None):
    """Parse ``argv``, run one experiment and return the exit code."""
    args = build_parser().parse_args(argv)
    name = args.command
    if name == "report":
        out = (Path(args.out) if args.out else Path("results")) / "report"
    else:
        out = Path(args.out) if args.out else Path("results") / name
    res = ExperimentResult(experiment=name, claim=CLAIMS[name], params={}, seed=args.seed)
    try:
        verdict = COMMANDS[name](args, res, out)
    except CapacityError as e:
        print(f"error: capacity exceeded: {e}", file=sys.stderr)
        return 1
    except BudgetError as e:
        print(f"error: sample budget too small: {e}", file=sys.stderr)
        return 1
    except SupqError as e:
        print(f"error: invalid input: {e}", file=sys.stderr)
        return 1
    res.finish(verdict)
    path = write_result(out, res)
    print(f"verdict: {res.verdict} ({path})")
    return res.exit_code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
