"""Text format for point sets on a quadric.

    q=<q> rank=<r> modulus=<c0,c1,...>
    <coordinate codes separated by spaces>     one point per line
    idx: <i>                                   or an index into the point order

Blank lines and ``#`` comments are ignored.  Coordinates need not be
normalized.
"""

from __future__ import annotations

import re

from . import linalg
from .galois import make_field
from .polar import HyperbolicQuadric, build_quadric, bits


class PointFileError(ValueError):
    pass


class MalformedHeader(PointFileError):
    pass


class MalformedLine(PointFileError):
    pass


class CoordinateOutOfRange(PointFileError):
    pass


class WrongDimension(PointFileError):
    pass


class PointOffQuadric(PointFileError):
    pass


class IndexOutOfRange(PointFileError):
    pass


def header(Q: HyperbolicQuadric) -> str:
    mod = ",".join(str(c) for c in Q.field.modulus)
    return f"q={Q.q} rank={Q.rank} modulus={mod}"


def dumps(Q: HyperbolicQuadric, mask: int, indices: bool = False) -> str:
    lines = [header(Q)]
    for i in bits(mask):
        lines.append(f"idx: {i}" if indices else " ".join(str(c) for c in Q.points[i]))
    return "\n".join(lines) + "\n"


def subspace_dumps(Q: HyperbolicQuadric, S) -> str:
    """A subspace as its echelon basis rows under the usual header."""
    return "\n".join([header(Q)] + [" ".join(map(str, v)) for v in S.basis]) + "\n"


_HEADER_RE = re.compile(r"^(\w+)=(\S+)$")


def _parse_header(line: str):
    fields = {}
    for tok in line.split():
        m = _HEADER_RE.match(tok)
        if not m:
            raise MalformedHeader(f"bad header token {tok!r}")
        fields[m.group(1)] = m.group(2)
    if "q" not in fields or "rank" not in fields:
        raise MalformedHeader("header needs q=<q> and rank=<r>")
    try:
        q, r = int(fields["q"]), int(fields["rank"])
    except ValueError:
        raise MalformedHeader("q and rank must be integers") from None
    try:
        F = make_field(q)
    except ValueError as exc:
        raise MalformedHeader(str(exc)) from None
    if r < 1:
        raise MalformedHeader("rank must be >= 1")
    if "modulus" in fields:
        try:
            mod = tuple(int(c) for c in fields["modulus"].split(","))
        except ValueError:
            raise MalformedHeader("modulus must be comma-separated integers") from None
        if mod != F.modulus:
            raise MalformedHeader(f"modulus {mod} differs from the canonical {F.modulus}")
    return F, r


def loads(text: str, cap: int | None = None) -> tuple[HyperbolicQuadric, int]:
    """Parse a point file; returns the quadric and the point mask."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [(n, ln) for n, ln in enumerate(lines, 1) if ln]
    if not lines:
        raise MalformedHeader("empty file")
    F, r = _parse_header(lines[0][1])
    Q = build_quadric(r, F, cap)
    mask = 0
    for n, ln in lines[1:]:
        if ln.startswith("idx:"):
            try:
                i = int(ln[4:])
            except ValueError:
                raise MalformedLine(f"line {n}: bad index") from None
            if not 0 <= i < len(Q):
                raise IndexOutOfRange(f"line {n}: index {i} outside 0..{len(Q) - 1}")
            mask |= 1 << i
            continue
        try:
            v = tuple(int(t) for t in ln.split())
        except ValueError:
            raise MalformedLine(f"line {n}: coordinates must be integers") from None
        if len(v) != Q.dim:
            raise WrongDimension(f"line {n}: {len(v)} coordinates, expected {Q.dim}")
        if any(not 0 <= c < F.q for c in v):
            raise CoordinateOutOfRange(f"line {n}: coordinate codes must lie in 0..{F.q - 1}")
        if not any(v):
            raise MalformedLine(f"line {n}: zero vector")
        i = Q.index.get(linalg.normalize(F, v))
        if i is None:
            raise PointOffQuadric(f"line {n}: {v} is not on the quadric")
        mask |= 1 << i
    return Q, mask


def load(path, cap: int | None = None) -> tuple[HyperbolicQuadric, int]:
    with open(path) as fh:
        return loads(fh.read(), cap)
