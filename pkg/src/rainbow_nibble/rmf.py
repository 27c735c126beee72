"""RMF text format for coloured matching family instances.

Layout (one instance per file)::

    rmf 1
    k 2
    vertices 8
    m 3
    e 0 0 1
    e 0 2 3
    ...

Each ``e`` line is ``e <matching_index> <v1> ... <vk>`` with v1 < ... < vk.
Blank lines and ``#`` comments are ignored.  Witness selections use the same
conventions with ``pick`` lines instead of ``e`` lines.
"""

from __future__ import annotations

import io
from .model import MatchingFamily, RainbowMatching


class RmfError(ValueError):
    """Malformed RMF input; message carries the 1-based line number."""


def _open(path_or_file, mode):
    if hasattr(path_or_file, "read") or hasattr(path_or_file, "write"):
        return path_or_file, False
    return open(path_or_file, mode), True


def write_rmf(family: MatchingFamily, path_or_file) -> None:
    f, close = _open(path_or_file, "w")
    try:
        f.write("rmf 1\n")
        f.write(f"k {family.k}\n")
        f.write(f"vertices {family.num_vertices}\n")
        f.write(f"m {family.m}\n")
        for mi, e in family.all_edges():
            f.write("e %d %s\n" % (mi, " ".join(map(str, e))))
    finally:
        if close:
            f.close()


def read_rmf(path_or_file) -> MatchingFamily:
    f, close = _open(path_or_file, "r")
    try:
        header = {}
        edges_by_matching = None
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            if edges_by_matching is None:
                if not header:
                    if tok != ["rmf", "1"]:
                        raise RmfError(f"line {lineno}: expected 'rmf 1' magic, got {line!r}")
                    header["magic"] = True
                    continue
                if tok[0] in ("k", "vertices", "m"):
                    if len(tok) != 2 or not tok[1].lstrip("-").isdigit():
                        raise RmfError(f"line {lineno}: malformed header line {line!r}")
                    header[tok[0]] = int(tok[1])
                    if tok[0] == "m":
                        for key in ("k", "vertices"):
                            if key not in header:
                                raise RmfError(f"line {lineno}: '{key}' header missing before 'm'")
                        if header["k"] < 2:
                            raise RmfError(f"line {lineno}: k must be >= 2")
                        if header["vertices"] < 0 or header["m"] < 0:
                            raise RmfError(f"line {lineno}: negative count")
                        edges_by_matching = [[] for _ in range(header["m"])]
                    continue
                raise RmfError(f"line {lineno}: unexpected {tok[0]!r} before header complete")
            if tok[0] != "e":
                raise RmfError(f"line {lineno}: expected 'e' line, got {tok[0]!r}")
            if len(tok) != 2 + header["k"]:
                raise RmfError(f"line {lineno}: expected {header['k']} vertices, got {len(tok) - 2}")
            try:
                mi = int(tok[1])
                verts = [int(t) for t in tok[2:]]
            except ValueError:
                raise RmfError(f"line {lineno}: non-integer field in {line!r}") from None
            if not 0 <= mi < header["m"]:
                raise RmfError(f"line {lineno}: matching index {mi} out of range [0, {header['m']})")
            for v in verts:
                if not 0 <= v < header["vertices"]:
                    raise RmfError(f"line {lineno}: vertex {v} out of range [0, {header['vertices']})")
            if verts != sorted(verts):
                raise RmfError(f"line {lineno}: vertices not in increasing order")
            if len(set(verts)) != header["k"]:
                raise RmfError(f"line {lineno}: repeated vertex in edge")
            edges_by_matching[mi].append(tuple(verts))
        if edges_by_matching is None:
            raise RmfError("line 1: missing or incomplete header")
        return MatchingFamily.build(header["k"], header["vertices"], edges_by_matching)
    finally:
        if close:
            f.close()


def write_selection(rm: RainbowMatching, path_or_file) -> None:
    f, close = _open(path_or_file, "w")
    try:
        for mi in sorted(rm.selection):
            f.write("pick %d %s\n" % (mi, " ".join(map(str, rm.selection[mi]))))
    finally:
        if close:
            f.close()


def read_selection(path_or_file) -> RainbowMatching:
    f, close = _open(path_or_file, "r")
    try:
        sel = {}
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            if tok[0] != "pick" or len(tok) < 3:
                raise RmfError(f"line {lineno}: expected 'pick <matching> <v...>'")
            try:
                mi = int(tok[1])
                verts = tuple(int(t) for t in tok[2:])
            except ValueError:
                raise RmfError(f"line {lineno}: non-integer field") from None
            if mi in sel:
                raise RmfError(f"line {lineno}: duplicate pick for matching {mi}")
            sel[mi] = verts
        return RainbowMatching(selection=sel)
    finally:
        if close:
            f.close()


def selection_to_string(rm: RainbowMatching) -> str:
    buf = io.StringIO()
    write_selection(rm, buf)
    return buf.getvalue()
