"""Command-line entry point: ``bqtsim {run,verify,diff-tables,efficiency,ghz-check}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import ghz, metrics, oracle
from .protocol import ADMISSIBLE, MAX_N, MIN_N, InputCoefficients, default_table, run_bqt
from .statevector import fidelity, from_amplitudes

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CLI_NORM_ATOL = 1e-6


def _complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}") from None


def _coefficients(args, parser) -> InputCoefficients | None:
    given = [args.alpha, args.beta, args.gamma, args.delta]
    if all(v is None for v in given):
        return None
    if any(v is None for v in given):
        parser.error("--alpha, --beta, --gamma and --delta must be given together")
    for (a, b), names in (((args.alpha, args.beta), "alpha/beta"), ((args.gamma, args.delta), "gamma/delta")):
        norm = abs(a) ** 2 + abs(b) ** 2
        if abs(norm - 1.0) > CLI_NORM_ATOL:
            parser.error(f"{names} are not normalized (|.|^2 sum = {norm:.9g})")
    return InputCoefficients.normalized(*given)


def _branch(text: str, parser) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        parser.error(f"--force-branch expects 'A,B' outcome indices, got {text!r}")
    for x in (a, b):
        if x not in ADMISSIBLE:
            parser.error(f"outcome index {x} is not one of {list(ADMISSIBLE)}")
    return a, b


def _table(source: str, n: int):
    return default_table(n) if source == "derived" else oracle.load_table(source, n)


def cmd_run(args, parser) -> int:
    c = _coefficients(args, parser)
    seed = args.seed
    if c is None:
        seed = 0 if seed is None else seed
        c = InputCoefficients.random(np.random.default_rng([seed, 1]))
    branches = _branch(args.force_branch, parser) if args.force_branch else None
    if branches is None and seed is None:
        seed = 0
    tr = run_bqt(args.n, c, branches=branches, seed=seed, table=_table(args.table, args.n))
    if args.output:
        Path(args.output).write_text(tr.to_json(indent=2))
    if args.json:
        print(tr.to_json(indent=2))
    else:
        for e in tr.events:
            extra = " ".join(f"{k}={v}" for k, v in e.detail.items())
            print(f"[{e.step:>3}] {e.party:<6} {e.kind:<10} {','.join(e.qubits):<16} {extra}")
        m = metrics.transcript_metrics(tr)
        print(f"fidelity alice={tr.fidelity_alice:.12f} bob={tr.fidelity_bob:.12f}")
        print(f"toffoli={tr.toffoli_count} classical_bits={tr.classical_bits} peak_width={tr.peak_width} eta={m.render()}%")
    return EXIT_OK if tr.succeeded else EXIT_FAIL


def verify(n: int, seed: int, draws: int, source: str = "derived", workers: int = 1) -> list[dict]:
    """All 16 forced branch pairs for each seeded draw, in canonical order."""
    table = _table(source, n)
    rng = np.random.default_rng(seed)
    coeffs = [InputCoefficients.random(rng) for _ in range(draws)]
    cases = [(d, a, b) for d in range(draws) for a in ADMISSIBLE for b in ADMISSIBLE]

    def one(case):
        d, a, b = case
        tr = run_bqt(n, coeffs[d], branches=(a, b), table=table)
        return {
            "draw": d,
            "branch": [a, b],
            "fidelity_alice": tr.fidelity_alice,
            "fidelity_bob": tr.fidelity_bob,
            "toffoli_count": tr.toffoli_count,
            "classical_bits": tr.classical_bits,
            "ok": tr.succeeded,
        }

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(one, cases))
    return [one(c) for c in cases]


def cmd_verify(args, parser) -> int:
    t0 = time.perf_counter()
    results = verify(args.n, args.seed, args.draws, args.table, args.workers)
    ok = all(r["ok"] for r in results)
    if args.json:
        print(json.dumps({"n": args.n, "seed": args.seed, "draws": args.draws, "passed": ok, "results": results}, indent=2))
    else:
        for r in results:
            if r["draw"] == 0 or not r["ok"]:
                print(
                    f"draw {r['draw']:>2} branch {r['branch'][0]},{r['branch'][1]}  "
                    f"F_alice={r['fidelity_alice']:.12f} F_bob={r['fidelity_bob']:.12f}  {'ok' if r['ok'] else 'FAIL'}"
                )
        worst = min(min(r["fidelity_alice"], r["fidelity_bob"]) for r in results)
        print(f"{len(results)} runs, worst fidelity {worst:.15f}, {time.perf_counter() - t0:.2f}s: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_diff(args, parser) -> int:
    d = oracle.diff_against_published()
    print(json.dumps(d.to_dict(), ensure_ascii=False, indent=2) if args.json else d.render())
    return EXIT_OK


def cmd_efficiency(args, parser) -> int:
    rows = metrics.table3(args.n)
    if args.json:
        print(json.dumps([{**r.__dict__, "q_t": r.metrics.q_t, "eta": r.eta, "matches": r.matches} for r in rows], indent=2))
    else:
        print(metrics.render_table(rows))
    return EXIT_OK if all(r.matches for r in rows) else EXIT_FAIL


def ghz_check(n: int, seed: int = 0) -> dict:
    basis = ghz.basis_matrix(n)
    gram_err = float(np.max(np.abs(basis.conj().T @ basis - np.eye(2**n))))
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(2 ** (n + 1)) + 1j * rng.standard_normal(2 ** (n + 1))
    s = from_amplitudes(v)
    qubits = list(range(n))
    worst = 1.0
    for b in ghz.ghz_basis(n):
        _, p1, post1 = ghz.ghz_measure(s, qubits, branch=b.outcome)
        _, p2, post2 = ghz.measure_via_decode(s, qubits, branch=b.outcome)
        worst = min(worst, fidelity(post1, post2))
    return {"n": n, "gram_error": gram_err, "worst_path_fidelity": worst}


def cmd_ghz(args, parser) -> int:
    r = ghz_check(args.n)
    ok = r["gram_error"] < 1e-12 and r["worst_path_fidelity"] > 1 - 1e-10
    print(f"n={r['n']}  max|G - I|={r['gram_error']:.3g}  decode-vs-projection min fidelity={r['worst_path_fidelity']:.15f}  {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bqtsim", description="Bidirectional cluster-state teleportation simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def n_arg(sp, default=3):
        sp.add_argument("--n", type=int, default=default, choices=range(MIN_N, MAX_N + 1), metavar=f"{{{MIN_N}..{MAX_N}}}")

    r = sub.add_parser("run", help="one protocol run")
    n_arg(r)
    for name in ("alpha", "beta", "gamma", "delta"):
        r.add_argument(f"--{name}", type=_complex, metavar="RE,IM")
    r.add_argument("--seed", type=int)
    r.add_argument("--force-branch", metavar="A,B")
    r.add_argument("--table", choices=("derived", "published"), default="derived")
    r.add_argument("--json", action="store_true")
    r.add_argument("--output", metavar="PATH", help="also write the JSON transcript here")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="every branch pair for seeded random inputs")
    n_arg(v)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--draws", type=int, default=20)
    v.add_argument("--table", choices=("derived", "published"), default="derived")
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("diff-tables", help="derived tables vs the published ones")
    d.add_argument("--json", action="store_true")
    d.set_defaults(func=cmd_diff)

    e = sub.add_parser("efficiency", help="intrinsic-efficiency comparison table")
    e.add_argument("--n", type=int, default=3, help="N for the N<->N row")
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_efficiency)

    g = sub.add_parser("ghz-check", help="basis orthonormality and decode-circuit equivalence")
    g.add_argument("--n", type=int, default=3, choices=range(2, ghz.MAX_GHZ_QUBITS + 1), metavar="{2..8}")
    g.set_defaults(func=cmd_ghz)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if getattr(args, "table", None) == "published" and args.n != 3:
        parser.error("the published table exists only for --n 3")
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())
