"""Coloured matching families over graphs, multigraphs and k-uniform hypergraphs.

A family is a list of colour classes over a dense integer vertex universe.
In the usual (properly coloured) case every colour class is a matching:
its edges are pairwise vertex-disjoint.  A few counterexample constructions
(the double-star family, 3-uniform lifts) carry colour classes that share
vertices; those are accepted by the data model and flagged by ``validate``
unless disjointness checking is switched off.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

Edge = tuple  # sorted tuple of k distinct vertex ids


@dataclass(frozen=True)
class MatchingFamily:
    """m colour classes of k-vertex edges over vertices 0..num_vertices-1."""

    k: int
    num_vertices: int
    matchings: tuple  # tuple of classes; each class a tuple of sorted k-tuples

    @staticmethod
    def build(k: int, num_vertices: int, matchings: Iterable[Iterable[Sequence[int]]]) -> "MatchingFamily":
        """Normalize raw edge lists: sort vertices within each edge, sort edges
        within each class. Structural validity is *not* enforced here."""
        norm = tuple(_normalize_class(cls, int(k)) for cls in matchings)
        return MatchingFamily(k=int(k), num_vertices=int(num_vertices), matchings=norm)

    @property
    def m(self) -> int:
        return len(self.matchings)

    def sizes(self) -> list:
        return [len(cls) for cls in self.matchings]

    def equal_size(self):
        """Common class size n, or None if the classes have unequal sizes."""
        s = self.sizes()
        if s and all(x == s[0] for x in s):
            return s[0]
        return None

    def edge_count(self) -> int:
        return sum(len(cls) for cls in self.matchings)

    def all_edges(self):
        for idx, cls in enumerate(self.matchings):
            for e in cls:
                yield idx, e


def _normalize_class(cls, k: int) -> tuple:
    """Sorted tuple of sorted k-tuples of python ints."""
    return tuple(sorted(tuple(map(int, sorted(e))) for e in cls))


@dataclass(frozen=True)
class FamilyStats:
    m: int
    min_size: int
    max_size: int
    max_degree: int       # edge-slots per vertex, counting multiplicity
    max_multiplicity: int  # max count of one vertex k-set across classes
    max_codegree: int      # max over vertex pairs of edges containing both


@dataclass(frozen=True)
class RainbowMatching:
    """One chosen edge per represented colour index."""

    selection: dict  # matching index -> edge tuple

    def edges(self):
        return list(self.selection.values())

    def covered(self):
        return set(self.selection)

    def __len__(self):
        return len(self.selection)


def validate(family: MatchingFamily, require_disjoint: bool = True) -> list:
    """Check family invariants; returns a list of violation strings (empty = ok).

    With ``require_disjoint=False`` colour classes may share vertices, which
    admits improperly coloured instances such as the double-star family.
    """
    violations = []
    if family.k < 2:
        violations.append(f"edge arity k={family.k} must be >= 2")
    if family.num_vertices < 0:
        violations.append(f"negative vertex count {family.num_vertices}")
    for mi, cls in enumerate(family.matchings):
        seen = {}
        for e in cls:
            if len(e) != family.k:
                violations.append(f"edge {e} in matching {mi} has arity {len(e)} != {family.k}")
                continue
            if len(set(e)) != family.k:
                violations.append(f"edge {e} in matching {mi} repeats a vertex")
                continue
            if tuple(e) != tuple(sorted(e)):
                violations.append(f"edge {e} in matching {mi} is not sorted")
            for v in e:
                if not 0 <= v < family.num_vertices:
                    violations.append(f"vertex {v} of edge {e} in matching {mi} out of range")
                elif v in seen and require_disjoint:
                    violations.append(f"vertex {v} repeated in matching {mi}")
                seen[v] = e
    return violations


def compute_stats(family: MatchingFamily) -> FamilyStats:
    """Exact size/degree/multiplicity/codegree statistics.

    Raises ValueError if the family fails structural validation (vertex
    disjointness within classes is not required; degree counts edge-slots).
    """
    bad = validate(family, require_disjoint=False)
    if bad:
        raise ValueError("invalid family: " + "; ".join(bad[:5]))
    sizes = family.sizes()
    degree = Counter()
    mult = Counter()
    codeg = Counter()
    for _, e in family.all_edges():
        mult[e] += 1
        for v in e:
            degree[v] += 1
        for p in combinations(e, 2):
            codeg[p] += 1
    return FamilyStats(
        m=family.m,
        min_size=min(sizes) if sizes else 0,
        max_size=max(sizes) if sizes else 0,
        max_degree=max(degree.values()) if degree else 0,
        max_multiplicity=max(mult.values()) if mult else 0,
        max_codegree=max(codeg.values()) if codeg else 0,
    )


def verify_rainbow(family: MatchingFamily, rm: RainbowMatching, require_full: bool = False) -> list:
    """Check a rainbow matching; returns violation strings (empty = ok).

    Each chosen edge must belong to its class and the chosen edges must be
    pairwise vertex-disjoint; with ``require_full`` every class 0..m-1 must
    be represented.
    """
    violations = []
    used = {}
    for mi, e in sorted(rm.selection.items()):
        if not 0 <= mi < family.m:
            violations.append(f"matching index {mi} out of range")
            continue
        e = tuple(e)
        if e not in family.matchings[mi]:
            violations.append(f"edge {e} does not belong to matching {mi}")
        for v in e:
            if v in used:
                violations.append(f"vertices overlap: {v} used by matchings {used[v]} and {mi}")
            used[v] = mi
    if require_full:
        missing = [i for i in range(family.m) if i not in rm.selection]
        if missing:
            violations.append(f"not full: matchings {missing} unrepresented")
    return violations


@dataclass(frozen=True)
class Clause:
    name: str
    measured: float
    bound: float
    ok: bool


@dataclass(frozen=True)
class HypothesisReport:
    theorem: int
    n: int          # common matching size (0 when sizes differ)
    clauses: tuple
    size_issue: str = ""

    @property
    def satisfied(self) -> bool:
        return not self.size_issue and all(cl.ok for cl in self.clauses)


def check_hypotheses(family: MatchingFamily, theorem: int, c: float = 0.05,
                     delta: float = 0.0, eps0: float = 0.1) -> HypothesisReport:
    """Measure the family against the hypotheses of one of the four theorems.

    theorem 1: m <= (1-n^-c) n^(1+delta), Delta <= (1-n^-c) n, simple,
               0 <= delta < 1/4, 0 < c < (1-4*delta)/10.
    theorem 2: m <= (1-n^-c) n, simple, 0 < c < 1/10.
    theorem 3: multigraph, m <= (1-eps0) n, multiplicity <= sqrt(n)/log^2 n.
    theorem 4: k-uniform, edge-disjoint, m <= (1-eps0) n,
               codegree <= sqrt(n)/log^2 n.
    Logarithms are natural.
    """
    if theorem not in (1, 2, 3, 4):
        raise ValueError(f"unknown theorem {theorem}")
    bad = validate(family, require_disjoint=False)
    if bad:
        raise ValueError("invalid family: " + "; ".join(bad[:5]))
    n = family.equal_size()
    size_issue = ""
    if n is None:
        sizes = sorted(set(family.sizes()))
        size_issue = f"matchings have unequal sizes {sizes}"
        n = 0
    stats = compute_stats(family)
    clauses = []

    def clause(name, measured, bound, ok=None):
        if ok is None:
            ok = measured <= bound
        clauses.append(Clause(name, float(measured), float(bound), bool(ok)))

    if n > 0:
        nc = n ** (-c) if theorem in (1, 2) else None
        if theorem == 1:
            clause("delta_range", delta, 0.25, 0 <= delta < 0.25)
            clause("c_range", c, (1 - 4 * delta) / 10, 0 < c < (1 - 4 * delta) / 10)
            clause("m_bound", stats.m, (1 - nc) * n ** (1 + delta))
            clause("max_degree", stats.max_degree, (1 - nc) * n)
            clause("simple", stats.max_multiplicity, 1)
        elif theorem == 2:
            clause("c_range", c, 0.1, 0 < c < 0.1)
            clause("m_bound", stats.m, (1 - nc) * n)
            clause("simple", stats.max_multiplicity, 1)
        elif theorem == 3:
            if family.k != 2:
                clause("graph_case", family.k, 2, False)
            clause("m_bound", stats.m, (1 - eps0) * n)
            clause("multiplicity", stats.max_multiplicity,
                   math.sqrt(n) / math.log(n) ** 2 if n > 1 else 1)
        else:
            clause("edge_disjoint", stats.max_multiplicity, 1)
            clause("m_bound", stats.m, (1 - eps0) * n)
            clause("codegree", stats.max_codegree,
                   math.sqrt(n) / math.log(n) ** 2 if n > 1 else 1)
    return HypothesisReport(theorem=theorem, n=n, clauses=tuple(clauses), size_issue=size_issue)
