"""Randomized chunked solver for full rainbow matchings.

One run: permute the colour classes uniformly at random, split them into
chunks of eps*m, then per chunk (i) pick one surviving edge per class u.a.r.,
keep the collision-free picks and kill their endpoints, (ii) zap each
surviving vertex with the topping-up probability P(v) solving
Q(v) + P(v)(1 - Q(v)) = f_i, (iii) greedily repair the collided classes.
The last chunk is completed greedily.  A run restarts (fresh permutation)
when some P(v) falls outside [0, 1].

RNG contract: every random draw comes from a numpy Generator seeded with the
tuple (seed, restart, iteration, purpose), purpose 0 = permutation,
1 = edge choice, 2 = zap coins.  Identical (family, params, seed) therefore
reproduce identical outcomes regardless of history.

The engine keeps per-edge and per-vertex alive flags and a vertex-to-edge
incidence index, so each edge is touched O(1) times per run on top of the
per-chunk work.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .model import MatchingFamily, RainbowMatching, validate, verify_rainbow
from .schedule import ScheduleParams, error_term_table, final_stage_guard

_ETA = 1e-6  # adaptive slack margin keeping P(v) strictly inside [0, 1]


@dataclass(frozen=True)
class TrajectoryRecord:
    """Observables at the start of iteration i, plus that iteration's counts."""

    i: int
    x: float
    min_size: int
    mean_size: float
    max_size: int
    predicted_size: float     # r_i * n
    max_next_degree: int      # max over surviving v of d_v^(i+1)(i), exact
    predicted_degree: float   # eps * gamma * g_i * n
    f: float = 0.0
    c_slack: float = 0.0
    marked: int = 0
    killed: int = 0
    zapped: int = 0
    collisions: int = 0
    deferred: int = 0
    zap_residual: float = 0.0
    a1_breach: bool = False
    a2_breach: bool = False
    wallclock: float = 0.0
    condemned: frozenset = None


@dataclass(frozen=True)
class RunOutcome:
    status: str               # success | restart_exhausted | greedy_failed | constraint_violation
    rainbow: RainbowMatching  # None unless success
    trajectory: tuple
    seed: int
    restarts: int
    guard_held: bool = None   # final-stage guard at the start of the last chunk


class _Restart(Exception):
    """Internal signal: P(v) outside [0,1] or Q(v) = 1; re-permute and retry."""


def marking_probability(family: MatchingFamily, chunk_classes, v: int,
                        dead_vertices=frozenset()) -> float:
    """Reference Q(v): probability that v is marked when each listed class
    independently picks one of its surviving edges u.a.r.

    Surviving edges avoid dead_vertices; classes with no surviving edge are
    an error (the engine aborts there).  Works for improper classes too, via
    the exact product over per-class incidence counts.
    """
    q = 1.0
    for mi in chunk_classes:
        alive = [e for e in family.matchings[mi] if not any(u in dead_vertices for u in e)]
        if not alive:
            raise ValueError(f"matching {mi} has no surviving edge")
        hits = sum(1 for e in alive if v in e)
        q *= 1.0 - hits / len(alive)
    return 1.0 - q


def greedy_complete(family: MatchingFamily, class_indices, dead_vertices=frozenset()):
    """Reference final-stage greedy: process the given classes in index order,
    always taking the surviving edge with the smallest vertex tuple.  Returns
    the selection dict, or None when some class runs out of edges."""
    dead = set(dead_vertices)
    sel = {}
    for mi in sorted(class_indices):
        alive = [e for e in family.matchings[mi] if not any(u in dead for u in e)]
        if not alive:
            return None
        e = min(alive)
        sel[mi] = e
        dead.update(e)
    return sel


class _Compiled:
    """Flat numpy view of a family plus a vertex-to-edge incidence index."""

    __slots__ = ("edges", "eclass", "class_start", "incid_eidx", "incid_start",
                 "max_degree")

    def __init__(self, family: MatchingFamily):
        k, nv = family.k, family.num_vertices
        try:
            arrs = [np.asarray(cls, dtype=np.int64).reshape(len(cls), k)
                    for cls in family.matchings]
        except (ValueError, TypeError):
            _raise_invalid(family)
        self.edges = (np.concatenate(arrs) if arrs
                      else np.zeros((0, k), dtype=np.int64))
        sizes = np.array([len(cls) for cls in family.matchings], dtype=np.int64)
        self.class_start = np.concatenate(([0], np.cumsum(sizes)))
        self.eclass = np.repeat(np.arange(family.m, dtype=np.int64), sizes)
        if self.edges.size:
            if self.edges.min() < 0 or self.edges.max() >= nv:
                _raise_invalid(family)
            if k >= 2 and not (np.diff(self.edges, axis=1) > 0).all():
                _raise_invalid(family)
        flat = self.edges.ravel()
        order = np.argsort(flat, kind="stable")
        self.incid_eidx = order // k
        self.incid_start = np.searchsorted(flat[order], np.arange(nv + 1))
        degs = np.diff(self.incid_start)
        self.max_degree = int(degs.max()) if len(degs) else 0


def _raise_invalid(family):
    bad = validate(family, require_disjoint=False)
    raise ValueError("invalid family: " + "; ".join(bad[:5] or ["malformed edges"]))


_COMPILE_CACHE = {}  # id(family) -> (family ref, _Compiled); small FIFO


def _compile(family: MatchingFamily) -> _Compiled:
    key = id(family)
    hit = _COMPILE_CACHE.get(key)
    if hit is not None and hit[0] is family:
        return hit[1]
    comp = _Compiled(family)
    if len(_COMPILE_CACHE) >= 8:
        _COMPILE_CACHE.pop(next(iter(_COMPILE_CACHE)))
    _COMPILE_CACHE[key] = (family, comp)
    return comp


def run(family: MatchingFamily, params: ScheduleParams, seed: int = 0,
        max_restarts: int = 10, strict: bool = False,
        collect_condemned: bool = False) -> RunOutcome:
    """Execute the randomized algorithm; deterministic under (params, seed)."""
    comp = _compile(family)
    n = family.equal_size()
    if n is None or n < 1:
        raise ValueError("the solver requires nonempty matchings of equal size")
    if params.n != n or params.m != family.m or params.k != family.k:
        raise ValueError(f"params (k={params.k}, n={params.n}, m={params.m}) do not "
                         f"match family (k={family.k}, n={n}, m={family.m})")
    terms = None
    if params.mode == "theoretical":
        if comp.max_degree > params.gamma * n:
            raise ValueError(f"max degree {comp.max_degree} exceeds gamma*n = "
                             f"{params.gamma * n:.2f} required in theoretical mode")
        terms = error_term_table(params)

    for restart in range(max_restarts + 1):
        try:
            return _attempt(family, params, comp, terms, seed, restart,
                            strict, collect_condemned)
        except _Restart:
            continue
    return RunOutcome(status="restart_exhausted", rainbow=None, trajectory=(),
                      seed=seed, restarts=max_restarts)


def _ranges(starts, lens):
    """Concatenate index ranges [starts[j], starts[j]+lens[j]) into one array."""
    tot = int(lens.sum())
    if tot == 0:
        return np.zeros(0, dtype=np.int64)
    return np.repeat(starts, lens) + np.arange(tot) - np.repeat(np.cumsum(lens) - lens, lens)


def _attempt(family, params, comp, terms, seed, restart, strict, collect_condemned):
    k, n, m, nv = params.k, params.n, params.m, family.num_vertices
    eps, gamma = params.epsilon, params.gamma
    s = params.chunk_size
    chunk_lo = list(range(0, m, s))
    num_chunks = len(chunk_lo)

    edges, eclass = comp.edges, comp.eclass
    class_start = comp.class_start
    incid_eidx, incid_start = comp.incid_eidx, comp.incid_start

    perm = np.random.default_rng((seed, restart, 0, 0)).permutation(m)
    ealive = np.ones(len(edges), dtype=bool)
    valive = np.ones(nv, dtype=bool)
    sizes_cls = np.diff(class_start).copy()
    m0 = {}
    records = []

    def kill(vs):
        """Remove the given vertices and every alive edge touching them."""
        vs = np.unique(np.asarray(vs, dtype=np.int64))
        vs = vs[valive[vs]]
        if not len(vs):
            return
        valive[vs] = False
        eidx = incid_eidx[_ranges(incid_start[vs], incid_start[vs + 1] - incid_start[vs])]
        eidx = eidx[ealive[eidx]]
        if len(eidx):
            eidx = np.unique(eidx)
            ealive[eidx] = False
            np.subtract.at(sizes_cls, eclass[eidx], 1)

    for i in range(num_chunks):
        t0 = time.perf_counter()
        lo = chunk_lo[i]
        hi = min(lo + s, m)
        surv_sizes = sizes_cls[perm[lo:]]
        chunk_classes = perm[lo:hi]
        csz = sizes_cls[chunk_classes]          # snapshot: sizes at chunk start

        # alive edges of the chunk, grouped by class in position order
        clens = class_start[chunk_classes + 1] - class_start[chunk_classes]
        cidx = _ranges(class_start[chunk_classes], clens)
        calive = ealive[cidx]
        alive_idx = cidx[calive]
        slot_rep = np.repeat(np.arange(hi - lo), clens)[calive]  # chunk-local class slot

        # next-chunk degrees (exact): d_v^(i+1)(i) over the chunk being processed
        cdeg = np.bincount(edges[alive_idx].ravel(), minlength=nv)
        ri = params.r_at(i)
        gi = params.g_at(i)
        rec = dict(
            i=i, x=i * eps,
            min_size=int(surv_sizes.min()), mean_size=float(surv_sizes.mean()),
            max_size=int(surv_sizes.max()), predicted_size=ri * n,
            max_next_degree=int(cdeg.max()) if len(cdeg) else 0,
            predicted_degree=eps * gamma * gi * n,
        )
        if terms is not None:
            t = terms[i]
            rec["a1_breach"] = bool(rec["max_size"] > ri * n + t.a or rec["min_size"] < ri * n - t.a)
            rec["a2_breach"] = bool(rec["max_next_degree"] > eps * gamma * gi * n + t.b)
            if strict and (rec["a1_breach"] or rec["a2_breach"]):
                rec["wallclock"] = time.perf_counter() - t0
                records.append(TrajectoryRecord(**rec))
                return RunOutcome(status="constraint_violation", rainbow=None,
                                  trajectory=tuple(records), seed=seed, restarts=restart)

        if i == num_chunks - 1:
            guard = final_stage_guard(k, m - lo, int(csz.min()) if hi > lo else 0)
            ok = _final_greedy(edges, class_start, ealive, kill, m0, chunk_classes)
            rec["killed"] = k * (m - lo) if ok else 0
            rec["wallclock"] = time.perf_counter() - t0
            records.append(TrajectoryRecord(**rec))
            if not ok:
                assert not guard, "final-stage guard held but greedy completion failed"
                return RunOutcome(status="greedy_failed", rainbow=None,
                                  trajectory=tuple(records), seed=seed,
                                  restarts=restart, guard_held=guard)
            rainbow = RainbowMatching({int(c): tuple(int(v) for v in e)
                                       for c, e in m0.items()})
            assert not verify_rainbow(family, rainbow, require_full=True)
            return RunOutcome(status="success", rainbow=rainbow,
                              trajectory=tuple(records), seed=seed,
                              restarts=restart, guard_held=guard)

        if (csz == 0).any():
            rec["wallclock"] = time.perf_counter() - t0
            records.append(TrajectoryRecord(**rec))
            return RunOutcome(status="greedy_failed", rainbow=None,
                              trajectory=tuple(records), seed=seed, restarts=restart)

        # --- step (i): choose one surviving edge per chunk class -----------
        group_start = np.concatenate(([0], np.cumsum(csz)))[:-1]
        rng_pick = np.random.default_rng((seed, restart, i + 1, 1))
        draw = np.minimum((rng_pick.random(hi - lo) * csz).astype(np.int64), csz - 1)
        chosen = alive_idx[group_start + draw]
        cver = edges[chosen]                          # (classes_in_chunk, k)
        hitcount = np.bincount(cver.ravel(), minlength=nv)
        collide = (hitcount[cver] >= 2).any(axis=1)
        clean = ~collide
        for j in np.flatnonzero(clean):
            m0[int(chunk_classes[j])] = tuple(int(v) for v in cver[j])
        kill(cver[clean].ravel())
        deferred_classes = chunk_classes[collide]
        rec["marked"] = int(np.unique(cver).size)
        rec["killed"] = int(clean.sum()) * k
        rec["collisions"] = int(collide.sum())
        rec["deferred"] = len(deferred_classes)

        # --- step (ii): exact marking probabilities, then the zap coins ----
        iv = edges[alive_idx].ravel()
        islot = np.repeat(slot_rep, k)
        key = iv * (hi - lo) + islot
        uniq, cnt = np.unique(key, return_counts=True)
        uslot = uniq % (hi - lo)
        uvtx = uniq // (hi - lo)
        frac = cnt / csz[uslot]
        if (frac >= 1.0).any():
            raise _Restart  # Q(v) = 1: the zap equation has no solution
        logq = np.zeros(nv)
        np.add.at(logq, uvtx, np.log1p(-frac))
        q_all = -np.expm1(logq)
        # the zap equation only concerns vertices still alive after step (i)
        cand = np.flatnonzero(valive)
        max_q = float(q_all[cand].max()) if len(cand) else 0.0

        base = params.condemnation_base(i)
        if terms is not None:
            fi = terms[i].f
            c_slack = terms[i].c
            if max_q > fi:
                raise _Restart  # P(v) < 0 under the prescribed f
        else:
            c_slack = max(0.0, max_q - base) + _ETA
            fi = base + c_slack
        if fi > 1.0:
            raise _Restart
        rec["f"] = fi
        rec["c_slack"] = c_slack

        qc = q_all[cand]
        if (qc >= 1.0 - 1e-12).any():
            raise _Restart
        pz = (fi - qc) / (1.0 - qc)
        if (pz < 0).any() or (pz > 1).any():
            raise _Restart
        rec["zap_residual"] = float(np.abs(qc + pz * (1.0 - qc) - fi).max()) if len(qc) else 0.0
        coins = np.random.default_rng((seed, restart, i + 1, 2)).random(len(cand))
        zapped = cand[coins < pz]
        kill(zapped)
        rec["zapped"] = int(len(zapped))
        if collect_condemned:
            rec["condemned"] = frozenset(int(v) for v in np.unique(cver)) | \
                frozenset(int(v) for v in zapped)

        # --- step (iii): greedy repair of collided classes -----------------
        for c in sorted(int(x) for x in deferred_classes):
            sl = slice(class_start[c], class_start[c + 1])
            msk = ealive[sl]
            if not msk.any():
                rec["wallclock"] = time.perf_counter() - t0
                records.append(TrajectoryRecord(**rec))
                return RunOutcome(status="greedy_failed", rainbow=None,
                                  trajectory=tuple(records), seed=seed,
                                  restarts=restart)
            pick = edges[sl][msk][0]    # classes are stored lexicographically
            m0[c] = tuple(int(v) for v in pick)
            kill(pick)

        rec["wallclock"] = time.perf_counter() - t0
        records.append(TrajectoryRecord(**rec))

    raise AssertionError("unreachable: final chunk returns")


def _final_greedy(edges, class_start, ealive, kill, m0, chunk_classes):
    """Process the final chunk in class-index order, smallest surviving edge
    first; returns False as soon as a class has no surviving edge."""
    for c in sorted(int(x) for x in chunk_classes):
        sl = slice(class_start[c], class_start[c + 1])
        msk = ealive[sl]
        if not msk.any():
            return False
        pick = edges[sl][msk][0]
        m0[c] = tuple(int(v) for v in pick)
        kill(pick)
    return True
