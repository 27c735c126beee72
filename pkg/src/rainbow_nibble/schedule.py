"""Analytic trajectory of the chunked random process.

The idealized fractions r(x) = (1 - gamma*x)^k and g(x) = (1 - gamma*x)^(k-1)
predict the surviving matching sizes (r*n) and per-chunk vertex degrees
(eps*gamma*g*n) at time x = i*eps.  The theoretical mode additionally iterates
the coupled error-term recurrences (a_i, b_i, c_i) that budget the deviation
from the idealized trajectory, and the per-iteration condemnation probability
f_i = eps*gamma*g_i/r_i + c_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace


def r(x: float, gamma: float, k: int = 2) -> float:
    """Idealized surviving matching-size fraction at time x."""
    return (1.0 - gamma * x) ** k


def g(x: float, gamma: float, k: int = 2) -> float:
    """Idealized surviving chunk-degree fraction at time x."""
    return (1.0 - gamma * x) ** (k - 1)


def choose_alpha(c: float, delta: float):
    """Midpoint of the open interval of feasible chunk exponents alpha.

    The feasibility system is delta + 2c - alpha < 0,
    (3/2)alpha + delta/2 + 2c < 1/2, c < 1/3, 0 < alpha < 1/3.
    Returns None when the interval is empty.
    """
    if c >= 1 / 3:
        return None
    lo = max(delta + 2 * c, 0.0)
    hi = min((1 - delta - 4 * c) / 3, 1 / 3)
    if lo >= hi:
        return None
    return (lo + hi) / 2


def choose_epsilon(n: int, m: int, alpha: float) -> float:
    """Chunk fraction eps ~ n^-alpha rounded so that eps*m is an integer."""
    if m < 1:
        raise ValueError("m must be >= 1")
    s = max(1, round(n ** (-alpha) * m))
    return s / m


def final_stage_guard(k: int, remaining_m: int, min_size: int) -> bool:
    """True when greedy completion of the last chunk cannot fail.

    One greedy pick deletes k vertices and so removes at most k edges from
    any other matching; k * remaining <= min_size therefore guarantees every
    matching still has an edge at its turn (for k=2 this is the classical
    'sizes at least twice the number of matchings remaining').
    """
    return k * remaining_m <= min_size


@dataclass(frozen=True)
class ScheduleParams:
    """All analytic knobs of one run."""

    k: int
    n: int
    m: int
    gamma: float
    epsilon: float
    alpha: float = None
    delta: float = 0.0
    c: float = 0.05
    xi: float = None        # slack function value; defaults to 1/log n
    c0: float = 4.0         # recurrence constant
    mode: str = "adaptive"  # adaptive | theoretical

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma={self.gamma} must lie in (0, 1)")
        if not 0 < self.epsilon <= 1:
            raise ValueError(f"epsilon={self.epsilon} must lie in (0, 1]")
        s = self.epsilon * self.m
        if abs(s - round(s)) > 1e-9:
            raise ValueError(f"epsilon*m = {s} must be an integer")
        if self.mode not in ("adaptive", "theoretical"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.xi is None:
            object.__setattr__(self, "xi", 1 / math.log(self.n) if self.n > 1 else 1.0)

    @property
    def chunk_size(self) -> int:
        return round(self.epsilon * self.m)

    @property
    def tau(self) -> int:
        return math.ceil(1 / self.epsilon)

    def r_at(self, i: int) -> float:
        return r(i * self.epsilon, self.gamma, self.k)

    def g_at(self, i: int) -> float:
        return g(i * self.epsilon, self.gamma, self.k)

    def condemnation_base(self, i: int) -> float:
        """eps*gamma*g_i/r_i, the zero-slack condemnation probability.

        The same expression serves every k: an edge survives an iteration
        when all k of its vertices do, (1-f)^k ~ 1-kf, which is exactly the
        size ODE r' = -k*gamma*g.  (The degree ODE picks up its (k-1) factor
        because an edge at v dies through the other k-1 vertices.)
        """
        return self.epsilon * self.gamma * self.g_at(i) / self.r_at(i)

    @staticmethod
    def theoretical(n: int, k: int = 2, c: float = 0.05, delta: float = 0.0,
                    xi: float = None, c0: float = 4.0, m: int = None,
                    alpha: float = None) -> "ScheduleParams":
        """Parameters as pinned in the analysis: gamma = 1 - n^-c,
        m = floor(gamma * n^(1+delta)) unless given, eps ~ n^-alpha."""
        gamma = 1 - n ** (-c)
        if m is None:
            m = math.floor(gamma * n ** (1 + delta))
        if alpha is None:
            alpha = choose_alpha(c, delta)
            if alpha is None:
                raise ValueError(f"no feasible alpha for c={c}, delta={delta}")
        eps = choose_epsilon(n, m, alpha)
        return ScheduleParams(k=k, n=n, m=m, gamma=gamma, epsilon=eps, alpha=alpha,
                              delta=delta, c=c, xi=xi, c0=c0, mode="theoretical")

    @staticmethod
    def adaptive(n: int, m: int, k: int = 2, max_degree: int = None,
                 epsilon: float = None, alpha: float = None, c: float = 0.05,
                 delta: float = 0.0, xi: float = None, c0: float = 4.0) -> "ScheduleParams":
        """gamma = max(Delta/n, m/n) clamped below 1 so that r(1) > 0."""
        gamma = max((max_degree or 0) / n, m / n)
        gamma = min(max(gamma, 1e-12), 1 - 1e-9)
        if epsilon is None:
            if alpha is None:
                alpha = choose_alpha(c, delta)
                if alpha is None:
                    raise ValueError(f"no feasible alpha for c={c}, delta={delta}")
            epsilon = choose_epsilon(n, m, alpha)
        return ScheduleParams(k=k, n=n, m=m, gamma=gamma, epsilon=epsilon, alpha=alpha,
                              delta=delta, c=c, xi=xi, c0=c0, mode="adaptive")


@dataclass(frozen=True)
class ErrorTerms:
    i: int
    a: float  # matching-size error (edges)
    b: float  # degree error (edge-slots)
    c: float  # probability slack
    f: float  # condemnation probability


def error_term_table(params: ScheduleParams, upto: int = None) -> list:
    """Iterate the coupled recurrences from (a_0, b_0) through index ``upto``
    (default tau-1), computing c_i from (a_i, b_i) and then f_i.

    a_0 = 0, b_0 = sqrt(eps*gamma*n) * log n,
    c_i = eps*gamma*a_i*g_i*(1+2 xi)/(r_i^2 n) + b_i*(1+2 xi)/(r_i n),
    f_i = eps*gamma*g_i/r_i + c_i,
    a_{i+1} = C0*(eps^2 g_i m / r_i + sqrt(eps m) log n) + 2 c_i r_i n
              + a_i (1 - 2 eps gamma g_i / r_i),
    b_{i+1} = (1 - f_i) b_i + C0*(eps^2 g_i^2 / r_i^2 + sqrt(eps m) log n).
    """
    if upto is None:
        upto = params.tau - 1
    eps, gam, n, m, xi, c0 = (params.epsilon, params.gamma, params.n,
                              params.m, params.xi, params.c0)
    ln = math.log(n)
    a = 0.0
    b = math.sqrt(eps * gam * n) * ln
    out = []
    for i in range(upto + 1):
        ri = params.r_at(i)
        gi = params.g_at(i)
        ci = eps * gam * a * gi * (1 + 2 * xi) / (ri * ri * n) + b * (1 + 2 * xi) / (ri * n)
        fi = params.condemnation_base(i) + ci
        out.append(ErrorTerms(i=i, a=a, b=b, c=ci, f=fi))
        a = (c0 * (eps ** 2 * gi * m / ri + math.sqrt(eps * m) * ln)
             + 2 * ci * ri * n
             + a * (1 - 2 * eps * gam * gi / ri))
        b = (1 - fi) * b + c0 * (eps ** 2 * gi ** 2 / ri ** 2 + math.sqrt(eps * m) * ln)
    return out


def theoretical_error_terms(params: ScheduleParams, i: int) -> ErrorTerms:
    """Error terms and condemnation probability at iteration i."""
    if not 0 <= i <= params.tau - 1:
        raise ValueError(f"i={i} outside 0..tau-1={params.tau - 1}")
    return error_term_table(params, upto=i)[i]


# clause names reported by check_ab_constraints, in order
AB_CLAUSES = ("a_half", "b_cap", "c_cap", "a_small", "b_small")


def check_ab_constraints(params: ScheduleParams, i: int, a: float, b: float, c: float) -> list:
    """Return the names of the violated constraint clauses (empty = ok).

    a_half:  a_i < r_i n / 2
    b_cap:   b_i <= eps gamma g_i n
    c_cap:   c_i <= eps gamma g_i / r_i <= 1/2
    a_small: a_i <= xi r_i n
    b_small: b_i <= xi eps g_i n
    """
    ri = params.r_at(i)
    gi = params.g_at(i)
    eps, gam, n, xi = params.epsilon, params.gamma, params.n, params.xi
    failed = []
    if not a < ri * n / 2:
        failed.append("a_half")
    if not b <= eps * gam * gi * n:
        failed.append("b_cap")
    if not c <= eps * gam * gi / ri <= 0.5:
        failed.append("c_cap")
    if not a <= xi * ri * n:
        failed.append("a_small")
    if not b <= xi * eps * gi * n:
        failed.append("b_small")
    return failed


def schedule_table(params: ScheduleParams) -> list:
    """Rows (i, x, r_i, g_i, f_i, a_i, b_i, c_i) for i = 0..tau-1.

    In adaptive mode the error terms are not defined ahead of a run; the
    a/b/c columns are zero and f is the zero-slack base probability.
    """
    rows = []
    if params.mode == "theoretical":
        terms = error_term_table(params)
        for t in terms:
            rows.append((t.i, t.i * params.epsilon, params.r_at(t.i), params.g_at(t.i),
                         t.f, t.a, t.b, t.c))
    else:
        for i in range(params.tau):
            rows.append((i, i * params.epsilon, params.r_at(i), params.g_at(i),
                         params.condemnation_base(i), 0.0, 0.0, 0.0))
    return rows
