"""Instance constructions: random families, Latin-square lifts, the
counterexample families, the 3-uniform lift, and disjoint-matching padding.

All generators are deterministic functions of their parameters and seed.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .model import MatchingFamily, compute_stats


class GeneratorError(RuntimeError):
    pass


def gen_random_simple(n: int, m: int, k: int = 2, seed: int = 0,
                      max_degree_cap: int = None, max_codegree_cap: int = None,
                      rho: float = 1.5) -> MatchingFamily:
    """m pairwise edge-disjoint matchings of size n over ceil(rho*k*n) vertices.

    Each matching is drawn as a random partition of k*n fresh-permuted
    vertices into k-sets; edges violating simplicity or the optional caps are
    re-drawn from the unused tail of the permutation (up to 1000 retries per
    edge, 20 restarts of the offending matching).
    """
    if n < 1 or m < 1 or k < 2:
        raise ValueError("need n >= 1, m >= 1, k >= 2")
    num_vertices = math.ceil(rho * k * n)
    if num_vertices < k * n:
        raise ValueError(f"vertex universe {num_vertices} too small for k*n = {k * n}")
    rng = np.random.default_rng(seed)
    seen = set()
    degree = np.zeros(num_vertices, dtype=np.int64)
    codeg = Counter() if (max_codegree_cap is not None and k >= 3) else None
    base = num_vertices ** np.arange(k - 1, -1, -1, dtype=np.int64)
    matchings = []
    for _ in range(m):
        for restart in range(20):
            perm = rng.permutation(num_vertices)
            if max_degree_cap is not None:
                ok_v = perm[degree[perm] < max_degree_cap]
                if len(ok_v) < k * n:
                    continue
                perm = ok_v
            # bulk draw: partition the head of the permutation into k-sets
            rows = np.sort(perm[:k * n].reshape(n, k).astype(np.int64), axis=1)
            codes = (rows @ base).tolist()
            edges = list(map(tuple, rows.tolist()))
            bad = []
            if not seen.isdisjoint(codes):
                bad = [i for i, c in enumerate(codes) if c in seen]
            if codeg is not None:
                fresh = Counter()
                for i, e in enumerate(edges):
                    if i in bad:
                        continue
                    if any(codeg[p] + fresh[p] >= max_codegree_cap for p in _pairs(e)):
                        bad.append(i)
                    else:
                        for p in _pairs(e):
                            fresh[p] += 1
            # redraw clashing edges from the unused tail of the permutation
            pos = k * n
            failed = False
            local = set(codes)
            for i in sorted(bad):
                local.discard(codes[i])
                placed = False
                for _retry in range(1000):
                    if pos + k > len(perm):
                        break
                    e = tuple(sorted(int(v) for v in perm[pos:pos + k]))
                    code = sum(int(v) * int(b) for v, b in zip(e, base))
                    if (code in seen or code in local or (codeg is not None and any(
                            codeg[p] >= max_codegree_cap for p in _pairs(e)))):
                        # park the first vertex and retry with the next window
                        perm[pos], perm[pos + k - 1] = perm[pos + k - 1], perm[pos]
                        pos += 1
                        continue
                    edges[i] = e
                    codes[i] = code
                    local.add(code)
                    pos += k
                    placed = True
                    break
                if not placed:
                    failed = True
                    break
            if not failed:
                break
        else:
            raise GeneratorError("could not place edge: constraints too tight")
        seen.update(local)
        if bad:
            flat = np.fromiter((v for e in edges for v in e), dtype=np.int64, count=k * n)
            np.add.at(degree, flat, 1)
        else:
            np.add.at(degree, rows.ravel(), 1)
        if codeg is not None:
            for e in edges:
                for p in _pairs(e):
                    codeg[p] += 1
        # sorted codes give lexicographic edge order (vertex ids < num_vertices)
        order = sorted(range(n), key=codes.__getitem__)
        matchings.append(tuple(edges[j] for j in order))
    return MatchingFamily(k=int(k), num_vertices=int(num_vertices),
                          matchings=tuple(matchings))


def _pairs(e):
    return [(e[i], e[j]) for i in range(len(e)) for j in range(i + 1, len(e))]


def cyclic_latin_square(n: int) -> list:
    return [[(r + c) % n for c in range(n)] for r in range(n)]


def latin_square_to_family(square) -> MatchingFamily:
    """Lift a Latin square to a bipartite family: rows are vertices 0..n-1,
    columns n..2n-1, symbol s becomes matching s = {{r, n+c} : L[r][c] = s}.
    A transversal of the square is exactly a full rainbow matching."""
    n = len(square)
    matchings = [[] for _ in range(n)]
    for row_i, row in enumerate(square):
        if len(row) != n or sorted(row) != list(range(n)):
            raise ValueError(f"row {row_i} is not a permutation of 0..{n - 1}")
        for col_i, s in enumerate(row):
            matchings[s].append((row_i, n + col_i))
    cols = list(zip(*square))
    for col_i, col in enumerate(cols):
        if sorted(col) != list(range(n)):
            raise ValueError(f"column {col_i} is not a permutation of 0..{n - 1}")
    return MatchingFamily.build(2, 2 * n, matchings)


def gen_latin(n: int, kind: str = "cyclic", seed: int = 0) -> MatchingFamily:
    """Bipartite family of a Latin square of order n.

    cyclic: L[r][c] = (r+c) mod n.  random: the cyclic square scrambled by
    seeded row, column and symbol permutations (a heuristic shuffle, not a
    uniformly random Latin square).
    """
    if n < 1:
        raise ValueError("order must be >= 1")
    square = cyclic_latin_square(n)
    if kind == "random":
        rng = np.random.default_rng(seed)
        rows = rng.permutation(n)
        cols = rng.permutation(n)
        syms = rng.permutation(n)
        square = [[int(syms[square[r][c]]) for c in cols] for r in rows]
    elif kind != "cyclic":
        raise ValueError(f"unknown Latin kind {kind!r}")
    return latin_square_to_family(square)


def gen_double_star(m: int) -> MatchingFamily:
    """The double-star family: m components, each two adjacent centres with
    m/2 leaves apiece.  Colour 0 ("blue") is the m central edges; colour j
    (1 <= j <= m) is the m leaf edges of component j-1, which share the two
    centres and therefore do NOT form a matching.  No full rainbow matching
    exists: a full selection must take some blue central edge, which blocks
    every leaf edge of that component's own colour.
    """
    if m < 2 or m % 2 != 0:
        raise ValueError("m must be an even integer >= 2")
    block = m + 2  # centre0, centre1, m leaves
    blue = []
    stars = []
    for comp in range(m):
        base = comp * block
        c0, c1 = base, base + 1
        blue.append((c0, c1))
        leaf_edges = []
        for t in range(m // 2):
            leaf_edges.append((c0, base + 2 + t))
        for t in range(m // 2):
            leaf_edges.append((c1, base + 2 + m // 2 + t))
        stars.append(leaf_edges)
    return MatchingFamily.build(2, m * block, [blue] + stars)


def gen_two_k4() -> MatchingFamily:
    """1-factorisations of two disjoint copies of K4: 3 matchings of size 4
    on 8 vertices with no full rainbow matching.  Factors on {0,1,2,3} are
    fixed as {01,23}, {02,13}, {03,12} for reproducible bytes."""
    factors = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]
    matchings = []
    for fac in factors:
        edges = [e for e in fac]
        edges += [tuple(v + 4 for v in e) for e in fac]
        matchings.append(edges)
    return MatchingFamily.build(2, 8, matchings)


@dataclass(frozen=True)
class LiftedFamily:
    """3-uniform lift of a coloured graph plus its part bookkeeping."""

    family: MatchingFamily          # k=3; hyperedge {u, v, colour-vertex}
    colour_vertices: tuple          # colour i -> vertex id of c_i (the V1 part)
    original_vertices: int          # original ids 0..original_vertices-1
    min_degree_colour_part: int     # delta(V1) = min colour-class size
    max_degree_vertex_part: int     # Delta over the original vertices
    bipartition: tuple = None       # (V2, V3) frozensets when the input is bipartite


def lift_to_3uniform(family: MatchingFamily) -> LiftedFamily:
    """Each colour i becomes a new vertex c_i; edge {u,v} of colour i becomes
    hyperedge {u, v, c_i}.  A full rainbow matching of the input is exactly a
    selection of one hyperedge per colour group with disjoint {u,v} parts."""
    if family.k != 2:
        raise ValueError("lift_to_3uniform requires a k=2 family")
    nv = family.num_vertices
    colour_vertices = tuple(nv + i for i in range(family.m))
    matchings = []
    degree = Counter()
    for mi, cls in enumerate(family.matchings):
        cv = colour_vertices[mi]
        matchings.append([tuple(sorted(e + (cv,))) for e in cls])
        for e in cls:
            degree[e[0]] += 1
            degree[e[1]] += 1
    lifted = MatchingFamily.build(3, nv + family.m, matchings)
    sizes = family.sizes()
    return LiftedFamily(
        family=lifted,
        colour_vertices=colour_vertices,
        original_vertices=nv,
        min_degree_colour_part=min(sizes) if sizes else 0,
        max_degree_vertex_part=max(degree.values()) if degree else 0,
        bipartition=bipartition(family),
    )


def bipartition(family: MatchingFamily):
    """2-colour the induced graph; returns (side0, side1) frozensets over the
    touched vertices, or None if some component is odd.  k=2 only."""
    if family.k != 2:
        return None
    adj = {}
    for _, (u, v) in family.all_edges():
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    colour = {}
    for start in adj:
        if start in colour:
            continue
        colour[start] = 0
        stack = [start]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in colour:
                    colour[w] = 1 - colour[u]
                    stack.append(w)
                elif colour[w] == colour[u]:
                    return None
    side0 = frozenset(v for v, cl in colour.items() if cl == 0)
    side1 = frozenset(v for v, cl in colour.items() if cl == 1)
    return (side0, side1)


def pad_with_disjoint_matchings(family: MatchingFamily, target_m: int) -> MatchingFamily:
    """Append target_m - m matchings of size n on fresh vertices.  Leaves the
    maximum degree and the existence of a full rainbow matching unchanged."""
    if target_m < family.m:
        raise ValueError(f"target_m={target_m} below current m={family.m}")
    n = family.equal_size()
    if n is None:
        raise ValueError("padding requires matchings of equal size")
    k = family.k
    matchings = [list(cls) for cls in family.matchings]
    next_v = family.num_vertices
    for _ in range(target_m - family.m):
        cls = []
        for _ in range(n):
            cls.append(tuple(range(next_v, next_v + k)))
            next_v += k
        matchings.append(cls)
    return MatchingFamily.build(k, next_v, matchings)


def find_2regular_counterexample(max_vertices: int, seed: int = 0, tries: int = 2000):
    """Search for a bipartite 2-regular graph, every colour on exactly 3 edges,
    with no full rainbow matching.

    2-regular bipartite graphs are disjoint unions of even cycles with as many
    edges as vertices, so candidate orders are multiples of 6.  For each order
    the search draws random even-cycle partitions and random colourings and
    certifies candidates with the exact oracle.  Returns (family, certificate)
    or (None, certificate) when the budget is exhausted.
    """
    from .exact import find_full

    orders = [v for v in range(6, max_vertices + 1, 2) if v % 3 == 0]
    cert = {"tried": 0, "orders": orders}
    if not orders:
        return None, cert
    rng = np.random.default_rng(seed)
    for t in range(tries):
        order = orders[int(rng.integers(len(orders)))]
        cycles = _random_even_cycle_partition(order, rng)
        edges = []
        v0 = 0
        for length in cycles:
            ring = list(range(v0, v0 + length))
            for idx in range(length):
                edges.append(tuple(sorted((ring[idx], ring[(idx + 1) % length]))))
            v0 += length
        ncol = order // 3
        colours = np.repeat(np.arange(ncol), 3)
        rng.shuffle(colours)
        matchings = [[] for _ in range(ncol)]
        for e, col in zip(edges, colours):
            matchings[int(col)].append(e)
        fam = MatchingFamily.build(2, order, matchings)
        cert["tried"] = t + 1
        res = find_full(fam, node_budget=200000)
        if res.status == "none":
            cert["order"] = order
            cert["cycles"] = cycles
            stats = compute_stats(fam)
            cert["max_degree"] = stats.max_degree
            cert["colour_class_size"] = 3
            return fam, cert
    return None, cert


def _random_even_cycle_partition(total: int, rng) -> list:
    """Random composition of ``total`` into even parts >= 4 (a single part may
    be the whole)."""
    parts = []
    left = total
    while left > 0:
        if left < 8:
            parts.append(left)
            break
        # choose an even length in [4, left-4] or take everything
        choices = list(range(4, left - 3, 2)) + [left]
        parts.append(int(choices[int(rng.integers(len(choices)))]))
        left -= parts[-1]
    return parts
