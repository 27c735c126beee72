"""Command line interface.

Subcommands: gen, lift, stats, verify, solve nibble, solve exact, schedule,
experiment.  Exit codes: 0 = success / "yes", 1 = negative result or run
failure, 2 = usage or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import exact, generators, harness, rmf
from .model import (MatchingFamily, check_hypotheses, compute_stats,
                    validate, verify_rainbow)
from .nibble import run
from .schedule import ScheduleParams, schedule_table


def _out_stream(args):
    if args.out:
        return open(args.out, "w")
    return sys.stdout


def _load(path):
    try:
        return rmf.read_rmf(path)
    except (OSError, rmf.RmfError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(2)


def cmd_gen(args):
    seed = args.seed or 0
    note = None
    if args.kind == "random":
        fam = generators.gen_random_simple(args.n, args.m, k=args.k, seed=seed,
                                           max_degree_cap=args.max_degree_cap)
    elif args.kind == "latin":
        fam = generators.gen_latin(args.n, kind=args.latin_kind, seed=seed)
    elif args.kind == "double-star":
        fam = generators.gen_double_star(args.m)
    elif args.kind == "two-k4":
        fam = generators.gen_two_k4()
    else:  # find-2reg
        fam, cert = generators.find_2regular_counterexample(args.max_vertices, seed=seed,
                                                            tries=args.tries)
        if fam is None:
            print(f"no witness found within budget ({cert['tried']} candidates)")
            return 1
        note = json.dumps(cert, default=str)
    f = _out_stream(args)
    rmf.write_rmf(fam, f)
    if f is not sys.stdout:
        f.close()
    if note and args.out:
        with open(args.out + ".cert.txt", "w") as cf:
            cf.write("certified: no full rainbow matching (exact oracle)\n" + note + "\n")
    return 0


def cmd_lift(args):
    fam = _load(args.instance)
    lifted = generators.lift_to_3uniform(fam)
    f = _out_stream(args)
    rmf.write_rmf(lifted.family, f)
    if f is not sys.stdout:
        f.close()
    sidecar = {
        "colour_vertices": list(lifted.colour_vertices),
        "original_vertices": lifted.original_vertices,
        "min_degree_colour_part": lifted.min_degree_colour_part,
        "max_degree_vertex_part": lifted.max_degree_vertex_part,
        "bipartition": [sorted(side) for side in lifted.bipartition] if lifted.bipartition else None,
    }
    if args.out:
        with open(args.out + ".parts.json", "w") as pf:
            json.dump(sidecar, pf, indent=2)
    else:
        print(json.dumps(sidecar), file=sys.stderr)
    return 0


def cmd_stats(args):
    fam = _load(args.instance)
    bad = validate(fam, require_disjoint=not args.improper)
    if bad:
        for v in bad:
            print("violation:", v)
        return 1
    st = compute_stats(fam)
    print(f"k {fam.k}")
    print(f"vertices {fam.num_vertices}")
    print(f"m {st.m}")
    print(f"min_size {st.min_size}")
    print(f"max_size {st.max_size}")
    print(f"max_degree {st.max_degree}")
    print(f"max_multiplicity {st.max_multiplicity}")
    print(f"max_codegree {st.max_codegree}")
    if args.theorem:
        rep = check_hypotheses(fam, args.theorem, c=args.c, delta=args.delta,
                               eps0=args.eps0)
        if rep.size_issue:
            print("size_issue", rep.size_issue)
        for cl in rep.clauses:
            print(f"clause {cl.name} measured {cl.measured:.6g} bound {cl.bound:.6g} "
                  f"{'OK' if cl.ok else 'FAIL'}")
        return 0 if rep.satisfied else 1
    return 0


def cmd_verify(args):
    fam = _load(args.instance)
    try:
        sel = rmf.read_selection(args.selection)
    except (OSError, rmf.RmfError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    bad = verify_rainbow(fam, sel, require_full=args.full)
    if bad:
        for v in bad:
            print("violation:", v)
        return 1
    print("ok")
    return 0


def cmd_solve_exact(args):
    fam = _load(args.instance)
    if args.count:
        try:
            count = exact.enumerate_oracle(fam)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(f"count {count}")
        return 0 if count > 0 else 1
    if args.max:
        res = exact.max_rainbow(fam, node_budget=args.node_budget)
        print(f"max {res.size}{'' if res.optimal else ' (lower bound: budget hit)'}")
        f = _out_stream(args)
        rmf.write_selection(res.witness, f)
        if f is not sys.stdout:
            f.close()
        return 0
    res = exact.find_full(fam, node_budget=args.node_budget)
    if res.status == "timeout":
        print("timeout")
        return 1
    if res.status == "none":
        print("none")
        return 1
    print("found")
    f = _out_stream(args)
    rmf.write_selection(res.witness, f)
    if f is not sys.stdout:
        f.close()
    return 0


def _schedule_params(args, fam=None):
    if args.mode == "theoretical":
        return ScheduleParams.theoretical(n=args.n, k=args.k, c=args.c,
                                          delta=args.delta, m=args.m,
                                          alpha=args.alpha, c0=args.c0,
                                          xi=args.xi)
    if fam is not None:
        n = fam.equal_size()
        degs = np.zeros(fam.num_vertices, dtype=np.int64)
        for _, e in fam.all_edges():
            for v in e:
                degs[v] += 1
        return ScheduleParams.adaptive(n=n, m=fam.m, k=fam.k,
                                       max_degree=int(degs.max()) if len(degs) else 0,
                                       epsilon=args.epsilon, alpha=args.alpha,
                                       c=args.c, delta=args.delta, c0=args.c0,
                                       xi=args.xi)
    return ScheduleParams.adaptive(n=args.n, m=args.m, k=args.k,
                                   max_degree=args.max_degree,
                                   epsilon=args.epsilon, alpha=args.alpha,
                                   c=args.c, delta=args.delta, c0=args.c0,
                                   xi=args.xi)


def cmd_solve_nibble(args):
    fam = _load(args.instance)
    try:
        params = _schedule_params_for_family(args, fam)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    outcome = run(fam, params, seed=args.seed or 0, max_restarts=args.max_restarts,
                  strict=args.strict)
    print(f"status {outcome.status}")
    print(f"restarts {outcome.restarts}")
    if args.trajectory:
        with open(args.trajectory, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(("i", "x", "min_size", "mean_size", "max_size",
                        "predicted_size", "max_next_degree", "predicted_degree",
                        "f", "c_slack", "marked", "killed", "zapped",
                        "collisions", "deferred", "zap_residual"))
            for r in outcome.trajectory:
                w.writerow((r.i, f"{r.x:.12g}", r.min_size, f"{r.mean_size:.12g}",
                            r.max_size, f"{r.predicted_size:.12g}",
                            r.max_next_degree, f"{r.predicted_degree:.12g}",
                            f"{r.f:.12g}", f"{r.c_slack:.12g}", r.marked,
                            r.killed, r.zapped, r.collisions, r.deferred,
                            f"{r.zap_residual:.3g}"))
    if outcome.status != "success":
        return 1
    f = _out_stream(args)
    rmf.write_selection(outcome.rainbow, f)
    if f is not sys.stdout:
        f.close()
    return 0


def _schedule_params_for_family(args, fam):
    n = fam.equal_size()
    if n is None:
        raise ValueError("instance matchings have unequal sizes")
    args.n, args.m, args.k = n, fam.m, fam.k
    return _schedule_params(args, fam if args.mode == "adaptive" else None)


def cmd_schedule(args):
    try:
        params = _schedule_params(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    f = _out_stream(args)
    w = csv.writer(f)
    w.writerow(("i", "x", "r", "g", "f", "a", "b", "c"))
    for row in schedule_table(params):
        w.writerow([row[0]] + [f"{x:.12g}" for x in row[1:]])
    if f is not sys.stdout:
        f.close()
    return 0


def cmd_experiment(args):
    try:
        spec = harness.ExperimentSpec.from_json(args.spec)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out_dir = args.out or "experiment_out"
    results = harness.run_experiment(spec, threads=args.threads or 1, out_dir=out_dir)
    for idx, res in enumerate(results):
        tag = f"cell {idx} {res.cell}"
        if res.error:
            print(f"{tag}: ERROR {res.error}")
        else:
            print(f"{tag}: {res.successes}/{res.trials} successes, "
                  f"max size dev {res.max_rel_size_dev:.3g}")
    return 0 if all(not r.error for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rainbow-nibble",
                                description="Full rainbow matchings: solvers, "
                                            "generators and experiments")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default=None, help="output file (default stdout)")
    sub = p.add_subparsers(dest="command", required=True)

    pg = sub.add_parser("gen", help="generate an instance (RMF)")
    pg.add_argument("kind", choices=["random", "latin", "double-star", "two-k4", "find-2reg"])
    pg.add_argument("--n", type=int, default=10)
    pg.add_argument("--m", type=int, default=4)
    pg.add_argument("--k", type=int, default=2)
    pg.add_argument("--latin-kind", choices=["cyclic", "random"], default="cyclic")
    pg.add_argument("--max-degree-cap", type=int, default=None)
    pg.add_argument("--max-vertices", type=int, default=12)
    pg.add_argument("--tries", type=int, default=2000)
    pg.set_defaults(func=cmd_gen)

    pl = sub.add_parser("lift", help="lift a k=2 instance to 3-uniform")
    pl.add_argument("instance")
    pl.set_defaults(func=cmd_lift)

    ps = sub.add_parser("stats", help="instance statistics and hypothesis checks")
    ps.add_argument("instance")
    ps.add_argument("--improper", action="store_true",
                    help="allow colour classes that share vertices")
    ps.add_argument("--theorem", type=int, choices=[1, 2, 3, 4], default=None)
    ps.add_argument("--c", type=float, default=0.05)
    ps.add_argument("--delta", type=float, default=0.0)
    ps.add_argument("--eps0", type=float, default=0.1)
    ps.set_defaults(func=cmd_stats)

    pv = sub.add_parser("verify", help="verify a selection file")
    pv.add_argument("instance")
    pv.add_argument("selection")
    pv.add_argument("--full", action="store_true")
    pv.set_defaults(func=cmd_verify)

    psv = sub.add_parser("solve", help="run a solver")
    ssub = psv.add_subparsers(dest="solver", required=True)

    pn = ssub.add_parser("nibble", help="randomized chunked solver")
    pn.add_argument("instance")
    pn.add_argument("--mode", choices=["adaptive", "theoretical"], default="adaptive")
    pn.add_argument("--epsilon", type=float, default=None)
    pn.add_argument("--alpha", type=float, default=None)
    pn.add_argument("--c", type=float, default=0.05)
    pn.add_argument("--delta", type=float, default=0.0)
    pn.add_argument("--xi", type=float, default=None)
    pn.add_argument("--c0", type=float, default=4.0)
    pn.add_argument("--max-restarts", type=int, default=10)
    pn.add_argument("--strict", action="store_true",
                    help="fail the run when (A1)/(A2) envelopes are breached")
    pn.add_argument("--trajectory", default=None, help="write per-iteration CSV here")
    pn.set_defaults(func=cmd_solve_nibble)

    pe = ssub.add_parser("exact", help="exact oracle")
    pe.add_argument("instance")
    pe.add_argument("--max", action="store_true", help="maximum rainbow matching")
    pe.add_argument("--count", action="store_true", help="count full rainbow matchings")
    pe.add_argument("--node-budget", type=int, default=None)
    pe.set_defaults(func=cmd_solve_exact)

    pc = sub.add_parser("schedule", help="print the (i, r, g, f, a, b, c) table as CSV")
    pc.add_argument("--mode", choices=["adaptive", "theoretical"], default="theoretical")
    pc.add_argument("--n", type=int, required=True)
    pc.add_argument("--m", type=int, default=None)
    pc.add_argument("--k", type=int, default=2)
    pc.add_argument("--max-degree", type=int, default=None)
    pc.add_argument("--epsilon", type=float, default=None)
    pc.add_argument("--alpha", type=float, default=None)
    pc.add_argument("--c", type=float, default=0.05)
    pc.add_argument("--delta", type=float, default=0.0)
    pc.add_argument("--xi", type=float, default=None)
    pc.add_argument("--c0", type=float, default=4.0)
    pc.set_defaults(func=cmd_schedule)

    px = sub.add_parser("experiment", help="run a Monte Carlo experiment spec")
    px.add_argument("spec", help="JSON spec file (or literal JSON)")
    px.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    except generators.GeneratorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
