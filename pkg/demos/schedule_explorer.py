"""Explore the theoretical schedule and its admissibility constraints.

Prints the error-term recurrences (a_i, b_i, c_i) alongside the analytic
curves for a given n, then scans n over several orders of magnitude and
reports the first iteration at which each run of the recurrences breaks
its admissibility envelope. At practically reachable n the envelope fails
from the start; the scan shows the violation receding as n grows.

Run: python demos/schedule_explorer.py [--n 1e6]
"""

import argparse

from rainbow_nibble import (ScheduleParams, check_ab_constraints,
                            error_term_table)


def first_violation(n, c=0.05):
    params = ScheduleParams.theoretical(n=int(n), c=c)
    for t in error_term_table(params):
        failed = check_ab_constraints(params, t.i, t.a, t.b, t.c)
        if failed or t.f > 1:
            return params, t.i, failed
    return params, None, []


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=float, default=1e6)
    ap.add_argument("--c", type=float, default=0.05)
    args = ap.parse_args()

    params = ScheduleParams.theoretical(n=int(args.n), c=args.c)
    print(f"n={int(args.n):.3g} c={args.c} alpha={params.alpha:.4f} "
          f"epsilon={params.epsilon:.3g} tau={params.tau}")
    print(f"\n{'i':>3} {'r_i':>8} {'g_i':>8} {'f_i':>10} "
          f"{'a_i':>10} {'b_i':>10} {'c_i':>10} violated")
    for t in error_term_table(params):
        failed = check_ab_constraints(params, t.i, t.a, t.b, t.c)
        print(f"{t.i:>3} {params.r_at(t.i):>8.4f} {params.g_at(t.i):>8.4f} "
              f"{t.f:>10.3e} {t.a:>10.3e} {t.b:>10.3e} {t.c:>10.3e} "
              f"{','.join(failed) if failed else '-'}")

    print("\nscan: first violated iteration by n")
    for exp in (4, 6, 8, 12, 16, 20, 24, 28, 32):
        params, i, failed = first_violation(10.0 ** exp, c=args.c)
        where = "none" if i is None else f"i={i} ({','.join(failed)})"
        print(f"  n=1e{exp:<3} tau={params.tau:>3}  first violation: {where}")


if __name__ == "__main__":
    main()
