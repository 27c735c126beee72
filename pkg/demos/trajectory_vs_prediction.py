"""Compare empirical nibble trajectories with the analytic curves.

Runs the chunked solver several times on a seeded random instance and
prints, for each iteration, the mean surviving class size against the
prediction r(i*eps)*n, plus the relative deviation. Finishes with the
success tally.

Run: python demos/trajectory_vs_prediction.py [--n 800] [--runs 10]
"""

import argparse

import numpy as np

from rainbow_nibble import (ScheduleParams, compute_stats, gen_random_simple,
                            run, verify_rainbow)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=800, help="class size")
    ap.add_argument("--m", type=int, default=None, help="classes (default 0.8n)")
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--epsilon", type=float, default=0.05)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    m = args.m if args.m is not None else int(0.8 * args.n)

    fam = gen_random_simple(n=args.n, m=m, k=2, seed=args.seed)
    st = compute_stats(fam)
    params = ScheduleParams.adaptive(n=args.n, m=m, k=2,
                                     max_degree=st.max_degree,
                                     epsilon=args.epsilon)
    print(f"instance: n={args.n} m={m} max_degree={st.max_degree} "
          f"gamma={params.gamma:.4f} tau={params.tau}")

    outs = [run(fam, params, seed=s) for s in range(args.runs)]

    depth = min(len(o.trajectory) for o in outs)
    print(f"\n{'i':>3} {'x':>6} {'mean size':>10} {'r_i * n':>10} {'dev':>8}")
    for i in range(depth):
        means = [o.trajectory[i].mean_size for o in outs]
        pred = params.r_at(i) * args.n
        dev = abs(np.mean(means) - pred) / pred
        print(f"{i:>3} {i * params.epsilon:>6.3f} {np.mean(means):>10.1f} "
              f"{pred:>10.1f} {dev:>7.1%}")

    succ = [o for o in outs if o.status == "success"]
    for o in succ:
        assert verify_rainbow(fam, o.rainbow, require_full=True) == []
    print(f"\n{len(succ)}/{args.runs} runs produced a verified full rainbow "
          f"matching; restarts per run: {[o.restarts for o in outs]}")


if __name__ == "__main__":
    main()
