"""Command-line entry point wiring the library together.

Every randomized subcommand takes a mandatory --seed and embeds it in the
output, which is deterministic byte-for-byte given the full configuration.
Exit status: 0 on success, 1 on a precondition / usage error, 2 on an
internal invariant violation (never expected).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import assemble as asm
from . import fileio
from .decompose import ConstraintGraph, SparseParams, decompose, verify_sparse
from .graphs import Graph, GraphError, generate, parse_graph, write_graph
from .mean_field import junction_conflict_frequencies, mean_field_process
from .recurrence import (
    f1_closed_form_bound,
    integrate_even_ode,
    pq_table,
    verify_limit_convergence,
)
from .sampler import (
    InternalInvariantError,
    SamplerParams,
    check_sample,
    sample_full_tis,
    trial_rng,
)

SCHEMA = "frac-total/1"


def _frac(x) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def _elem_key(x) -> str:
    if isinstance(x, tuple):
        return f"e{x[0] + 1}-{x[1] + 1}"
    return f"v{x + 1}"


def _emit(obj, out=None):
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_graph(path) -> Graph:
    return parse_graph(Path(path).read_text())


def cmd_gen(args):
    kind = args.kind
    params = {}
    if kind in ("cycle", "complete"):
        params["n"] = args.n
    elif kind == "complete_bipartite":
        params.update(a=args.a, b=args.b)
    elif kind == "prism":
        params["n"] = args.n or 3
    elif kind == "generalized_petersen":
        params.update(n=args.n, k=args.k)
    elif kind == "random_cubic_girth":
        params.update(n=args.n, min_girth=args.min_girth, seed=args.seed)
    g = generate(kind, **params)
    settings = " ".join(f"{k}={v}" for k, v in params.items())
    text = f"c gen {kind} {settings}\n" + write_graph(g)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_recurrence(args):
    t = pq_table(args.k, xi=Fraction(args.xi) if args.exact else args.xi, delta=args.delta,
                 exact=args.exact or None)
    if args.format == "csv":
        lines = ["i,p,q,qt"]
        for i in range(args.k):
            if t.exact:
                lines.append(f"{i + 1},{_frac(t.p[i])},{_frac(t.q[i])},{_frac(t.qt[i])}")
            else:
                lines.append(f"{i + 1},{t.p[i]!r},{t.q[i]!r},{t.qt[i]!r}")
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        obj = {
            "schema": SCHEMA,
            "command": "recurrence",
            "params": {"k": args.k, "xi": str(args.xi), "delta": args.delta, "exact": t.exact},
            "p": [_frac(x) if t.exact else x for x in t.p],
            "q": [_frac(x) if t.exact else x for x in t.q],
            "qt": [_frac(x) if t.exact else x for x in t.qt],
            "p_star": _frac(t.p_star) if t.exact else float(t.p_star),
            "q_star": _frac(t.q_star) if t.exact else float(t.q_star),
        }
        _emit(obj, args.out)
    return 0


def cmd_ode(args):
    sol = integrate_even_ode(args.delta, args.step)
    bound = f1_closed_form_bound(args.delta)
    verdict = sol.Q1 > 1 / (args.delta + 1)
    if args.format == "csv":
        lines = ["x,F,Q"]
        for x, f, q in zip(sol.xs, sol.F, sol.Q):
            lines.append(f"{x!r},{f!r},{q!r}")
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        obj = {
            "schema": SCHEMA,
            "command": "ode",
            "params": {"delta": args.delta, "step": sol.h},
            "F1": sol.F1,
            "Q1": sol.Q1,
            "Q1_threshold": 1 / (args.delta + 1),
            "Q1_exceeds_threshold": verdict,
            "F1_closed_form_bound": bound,
            "F1_below_bound": sol.F1 <= bound,
            "consistency_error": sol.consistency_error(),
        }
        _emit(obj, args.out)
    return 0


def _factor_for(g, args):
    if getattr(args, "factor", None):
        return fileio.parse_factor(g, Path(args.factor).read_text())
    from .graphs import complement_two_factor, first_perfect_matching, two_factorize_even

    if g.is_regular(3):
        m = first_perfect_matching(g)
        if m is None:
            raise GraphError("graph has no perfect matching; supply --factor")
        return complement_two_factor(g, m)
    d = g.max_degree()
    if d >= 2 and d % 2 == 0 and g.is_regular(d):
        return two_factorize_even(g)[0]
    raise GraphError("cannot derive a 2-factor automatically; supply --factor")


def cmd_decompose(args):
    g = _load_graph(args.graph)
    F = _factor_for(g, args)
    Q = None
    if args.constraints:
        pairs = json.loads(Path(args.constraints).read_text())
        Q = ConstraintGraph([(tuple(sorted((u1 - 1, v1 - 1))), tuple(sorted((u2 - 1, v2 - 1))))
                             for (u1, v1), (u2, v2) in pairs])
    sets = decompose(g, F, SparseParams(ell=args.ell, strict=args.strict), Q=Q, seed=args.seed)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "factor.f").write_text(fileio.write_factor(F))
    report = {"schema": SCHEMA, "command": "decompose",
              "params": {"ell": args.ell, "strict": args.strict, "seed": args.seed},
              "sets": []}
    for i, b in enumerate(sets):
        name = f"boundary_{i:03d}.b"
        (outdir / name).write_text(fileio.write_edge_set(g, b.edges))
        report["sets"].append({
            "file": name,
            "colour": b.colour,
            "symbol": b.symbol,
            "size": len(b.edges),
            "passed": b.passed(),
            "report": _jsonable(b.report),
        })
    _emit(report, outdir / "report.json")
    sys.stdout.write(f"wrote {len(sets)} boundary sets to {outdir}\n")
    return 0


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return _frac(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, frozenset):
        return sorted(_jsonable(v) for v in obj)
    return obj


def cmd_sample(args):
    if args.trials < 1:
        raise GraphError("trials must be positive")
    g = _load_graph(args.graph)
    F = fileio.parse_factor(g, Path(args.factor).read_text())
    B = fileio.parse_edge_set(g, Path(args.boundary).read_text())
    params = SamplerParams(k=args.k, xi=args.xi)
    table = pq_table(args.k, xi=args.xi, delta=max(3, g.max_degree()), exact=False)
    counts = {}
    conflict_counts = {}
    violations = 0
    for i in range(args.trials):
        res = sample_full_tis(g, F, B, params, trial_rng(args.seed, i), table=table)
        if check_sample(g, F, B, res):
            violations += 1
        for x in res.total_set.elements:
            counts[_elem_key(x)] = counts.get(_elem_key(x), 0) + 1
        for r in res.conflicts:
            conflict_counts[r.kind] = conflict_counts.get(r.kind, 0) + 1
    obj = {
        "schema": SCHEMA,
        "command": "sample",
        "params": {"k": args.k, "xi": args.xi, "trials": args.trials, "seed": args.seed},
        "frequencies": {key: _frac(Fraction(c, args.trials)) for key, c in sorted(counts.items())},
        "conflicts": dict(sorted(conflict_counts.items())),
        "violations": violations,
    }
    _emit(obj, args.out)
    return 0


def cmd_weights(args):
    g = _load_graph(args.graph)
    F = fileio.parse_factor(g, Path(args.factor).read_text())
    B = fileio.parse_edge_set(g, Path(args.boundary).read_text())
    params = SamplerParams(k=args.k, xi=args.xi)
    est = asm.estimate_weights(g, F, B, params, args.trials, args.seed)
    by_type, outside = asm.type_aggregates(g, F, est)
    alpha, beta, gamma = est.class_means(g, F)
    table = pq_table(args.k, xi=args.xi, delta=max(3, g.max_degree()), exact=False)
    obj = {
        "schema": SCHEMA,
        "command": "weights",
        "params": {"k": args.k, "xi": args.xi, "trials": args.trials, "seed": args.seed},
        "violations": est.violations,
        "class_means": {"alpha": _frac(alpha), "beta": _frac(beta), "gamma": _frac(gamma)},
        "level_aggregates_reference": {
            "p_star": float(table.p_star),
            "q_star": float(table.q_star),
            "beta_minus_q_star": float(beta) - float(table.q_star),
            "gamma_minus_p_star": float(gamma) - float(table.p_star),
        },
        "by_type": {str(k): _frac(v) for k, v in by_type.items()},
        "outside_region": {k: (None if v is None else _frac(v)) for k, v in outside.items()},
        "frequencies": {
            _elem_key(x): _frac(est.frequency(x)) for x in sorted(est.counts, key=_elem_key)
        },
    }
    _emit(obj, args.out)
    return 0


def cmd_assemble(args):
    g = _load_graph(args.graph)
    cover = asm.uniform_pm_cover(g)
    factors = cover.expanded_factors(g)
    params = SamplerParams(k=args.k, xi=args.xi)
    sparse = SparseParams(ell=args.ell, strict=False)
    mixtures = []
    for i, F in enumerate(factors):
        mixtures.append(
            asm.average_over_decomposition(
                g, F, params, sparse, args.trials, seed=f"{args.seed}-f{i}"
            )
        )
    rep = asm.assemble_final(g, mixtures, cover)
    obj = {
        "schema": SCHEMA,
        "command": "assemble",
        "params": {
            "k": args.k,
            "xi": args.xi,
            "ell": args.ell,
            "trials": args.trials,
            "seed": args.seed,
        },
        "N": rep["N"],
        "n_factors": rep["n_factors"],
        "alpha": _frac(rep["alpha"]),
        "beta": _frac(rep["beta"]),
        "gamma": _frac(rep["gamma"]),
        "edge_weight": _frac(rep["edge_weight"]),
        "matching_coefficient": _frac(rep["matching_coefficient"]),
        "coefficient_nonnegative": rep["coefficient_nonnegative"],
        "beta_deficit": _frac(rep["beta_deficit"]),
        "beta_exceeds_quarter": rep["beta_exceeds_quarter"],
        "each_edge_in_2N_factors": rep["each_edge_in_2N_factors"],
        "sample_violations": rep["sample_violations"],
        "size_identity_exact_4": rep["size_identity_exact_4"],
        "alpha_bound_4_over_3ell": _frac(Fraction(4, 3 * args.ell)),
        "mixture_sources": [m.source for m in mixtures],
    }
    _emit(obj, args.out)
    return 0


def cmd_chift(args):
    g = _load_graph(args.graph)
    sol = asm.fractional_total_chromatic_number(g)
    obj = {
        "schema": SCHEMA,
        "command": "chift",
        "value": _frac(sol.value),
        "weights": [
            {"set": sorted(_elem_key(x) for x in s), "weight": _frac(w)}
            for s, w in zip(sol.sets, sol.weights)
            if w > 0
        ],
    }
    _emit(obj, args.out)
    return 0


def cmd_cover(args):
    g = _load_graph(args.graph)
    cover = asm.uniform_pm_cover(g)
    obj = {
        "schema": SCHEMA,
        "command": "cover",
        "N": cover.N,
        "total": cover.total,
        "matchings": [
            {"edges": sorted(_elem_key(e) for e in M.edges), "multiplicity": m}
            for M, m in zip(cover.matchings, cover.multiplicities)
        ],
    }
    _emit(obj, args.out)
    return 0


def cmd_verify(args):
    if args.what == "sparse":
        g = _load_graph(args.graph)
        F = fileio.parse_factor(g, Path(args.factor).read_text())
        B = fileio.parse_edge_set(g, Path(args.boundary).read_text())
        rep = verify_sparse(g, F, B, args.ell)
        _emit({"schema": SCHEMA, "command": "verify-sparse", "report": _jsonable(rep)}, args.out)
        return 0 if rep["passed"] else 1
    if args.what == "limits":
        ks = [int(x) for x in args.k_list.split(",")]
        rep = verify_limit_convergence(ks, tol=args.tol)
        _emit({"schema": SCHEMA, "command": "verify-limits", **_jsonable(rep)}, args.out)
        return 0 if rep["ok"] else 1
    raise GraphError(f"unknown verify target {args.what!r}")


def cmd_meanfield(args):
    params = SamplerParams(k=args.k, xi=args.xi)
    rep = mean_field_process(params, args.length, args.trials, seed=args.seed, delta=args.delta)
    jc = junction_conflict_frequencies(params, args.trials, seed=args.seed, delta=args.delta)
    obj = {
        "schema": SCHEMA,
        "command": "meanfield",
        "params": {"k": args.k, "xi": args.xi, "delta": args.delta,
                   "length": args.length, "trials": args.trials, "seed": args.seed},
        "p_hat": list(rep.p_hat),
        "q_hat": list(rep.q_hat),
        "p_exact": list(rep.p_exact),
        "q_exact": list(rep.q_exact),
        "max_sigma_deviation": rep.max_sigma_deviation(),
        "within_3_sigma": rep.within_3_sigma(),
        "conflicts": _jsonable(jc),
    }
    _emit(obj, args.out)
    return 0


def cmd_report(args):
    from . import report

    paths = report.render_all(Path(args.out), ode_deltas=(4, 6, 8))
    for p in paths:
        sys.stdout.write(f"{p}\n")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="fractotal")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a named test graph")
    p.add_argument("--kind", required=True,
                   choices=["cycle", "complete", "complete_bipartite", "prism",
                            "generalized_petersen", "random_cubic_girth"])
    p.add_argument("--n", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--min-girth", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("recurrence", help="level recurrence table")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--xi", type=float, default=1.0)
    p.add_argument("--delta", type=int, default=3)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_recurrence)

    p = sub.add_parser("ode", help="even-degree profile ODE")
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ode)

    p = sub.add_parser("decompose", help="boundary-set decomposition of a 2-factor")
    p.add_argument("--graph", required=True)
    p.add_argument("--factor")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--constraints", help="JSON list of F-edge pairs to separate")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("sample", help="end-to-end full total independent sets")
    p.add_argument("--graph", required=True)
    p.add_argument("--factor", required=True)
    p.add_argument("--boundary", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--xi", type=float, default=1.0)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", required=True)
    p.add_argument("--format", choices=["json"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("weights", help="per-element inclusion frequencies")
    p.add_argument("--graph", required=True)
    p.add_argument("--factor", required=True)
    p.add_argument("--boundary", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--xi", type=float, default=1.0)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("assemble", help="full weight-assembly report")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--xi", type=float, default=1.0)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("chift", help="exact fractional total chromatic number")
    p.add_argument("--graph", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_chift)

    p = sub.add_parser("cover", help="uniform perfect matching cover")
    p.add_argument("--graph", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("verify", help="verification reports")
    p.add_argument("what", choices=["sparse", "limits"])
    p.add_argument("--graph")
    p.add_argument("--factor")
    p.add_argument("--boundary")
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--k-list", default="100,1000,10000")
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("meanfield", help="mean-field oracle for the recurrence")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--xi", type=float, default=1.0)
    p.add_argument("--delta", type=int, default=3)
    p.add_argument("--length", type=int, default=0)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_meanfield)

    p = sub.add_parser("report", help="render figures and CSVs")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "meanfield" and args.length == 0:
        args.length = 10 * args.k
    try:
        return args.func(args)
    except InternalInvariantError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return 2
    except (GraphError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
