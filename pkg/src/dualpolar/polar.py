"""Symplectic polar spaces of rank n over GF(p).

The model is the projective space of GF(p)^{2n} equipped with the standard
alternating form pairing coordinates (2i, 2i+1).  Every projective point is
isotropic, collinearity is vanishing of the form, and singular subspaces are
the totally isotropic linear subspaces (projective dimension = rank - 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .linalg import (
    GF,
    Subspace,
    contains,
    gf,
    nullspace,
    rref,
    sum_span,
    zero_subspace,
)

SUPPORTED_PRIMES = (2, 3, 5)

Point = tuple[int, ...]


def projdim(sub: Subspace) -> int:
    """Projective dimension of a subspace (-1 for the zero subspace)."""
    return sub.rank - 1


def normalize_point(field: GF, v: Sequence[int]) -> Point:
    """Unique representative of a projective point: first nonzero coord is 1."""
    p = field.p
    vec = [x % p for x in v]
    lead = next((x for x in vec if x), None)
    if lead is None:
        raise ValueError("zero vector does not represent a projective point")
    if lead != 1:
        scale = field.inv[lead]
        vec = [(x * scale) % p for x in vec]
    return tuple(vec)


class PolarSpace:
    """The rank-n symplectic polar space over GF(p), p in {2, 3, 5}."""

    def __init__(self, n: int, p: int):
        if n < 2:
            raise ValueError(f"rank must be at least 2, got {n}")
        if p not in SUPPORTED_PRIMES:
            raise ValueError(f"p must be one of {SUPPORTED_PRIMES}, got {p}")
        self.n = n
        self.p = p
        self.dim = 2 * n
        self.field = gf(p)
        self.gram = self._standard_gram(n, p)
        self.points: tuple[Point, ...] = tuple(sorted(self._all_points()))
        self.point_index = {pt: i for i, pt in enumerate(self.points)}
        self._collinear_masks: list[int] | None = None
        self._singular_cache: dict[int, tuple[Subspace, ...]] = {}
        self._check_model()

    @staticmethod
    def _standard_gram(n: int, p: int) -> tuple[tuple[int, ...], ...]:
        g = [[0] * (2 * n) for _ in range(2 * n)]
        for i in range(n):
            g[2 * i][2 * i + 1] = 1
            g[2 * i + 1][2 * i] = p - 1
        return tuple(tuple(row) for row in g)

    def _all_points(self) -> Iterable[Point]:
        p, d = self.p, self.dim
        for lead in range(d):
            for tail in product(range(p), repeat=d - lead - 1):
                yield (0,) * lead + (1,) + tail

    def _check_model(self) -> None:
        d = self.dim
        assert all(self.gram[i][i] == 0 for i in range(d))
        assert all(
            (self.gram[i][j] + self.gram[j][i]) % self.p == 0
            for i in range(d)
            for j in range(d)
        )
        if nullspace(self.field, self.gram, d).rank != 0:
            raise ValueError("alternating form is degenerate")
        # span{e_1..e_n} must be self-perpendicular: maximal isotropic rank is n
        witness = rref(self.field, [self._unit(2 * i) for i in range(self.n)], d)
        if perp_subspace(self, witness) != witness:
            raise ValueError("maximal totally isotropic rank is not n")

    def _unit(self, i: int) -> Point:
        return tuple(1 if j == i else 0 for j in range(self.dim))

    def hyperbolic_pair_units(self) -> list[tuple[Point, Point]]:
        """The standard basis points (e_i, f_i) pairing under the form."""
        return [(self._unit(2 * i), self._unit(2 * i + 1)) for i in range(self.n)]

    # -- point-line geometry interface used by check_polar_axioms ------------

    def point_count(self) -> int:
        return len(self.points)

    def collinear_mask(self, i: int) -> int:
        return self.collinear_masks()[i]

    def collinear_masks(self) -> list[int]:
        if self._collinear_masks is None:
            pts = self.points
            masks = [0] * len(pts)
            for i in range(len(pts)):
                for j in range(i + 1, len(pts)):
                    if form_value(self, pts[i], pts[j]) == 0:
                        masks[i] |= 1 << j
                        masks[j] |= 1 << i
            self._collinear_masks = masks
        return self._collinear_masks

    def line_index_sets(self) -> list[tuple[int, ...]]:
        lines = enumerate_singular(self, 1)
        return [
            tuple(sorted(self.point_index[pt] for pt in points_in_subspace(self, L)))
            for L in lines
        ]

    def describe_point(self, i: int) -> list[int]:
        return list(self.points[i])

    def __repr__(self) -> str:
        return f"PolarSpace(n={self.n}, p={self.p})"


def form_value(space: PolarSpace, u: Sequence[int], v: Sequence[int]) -> int:
    """The alternating form u · gram · v, reduced into [0, p)."""
    if len(u) != space.dim or len(v) != space.dim:
        raise ValueError("vectors must have length 2n")
    acc = 0
    for i in range(space.n):
        acc += u[2 * i] * v[2 * i + 1] - u[2 * i + 1] * v[2 * i]
    return acc % space.p


def is_collinear(space: PolarSpace, a: Sequence[int], b: Sequence[int]) -> bool:
    """Collinearity of distinct points: the form vanishes on them."""
    pa = normalize_point(space.field, a)
    pb = normalize_point(space.field, b)
    if pa == pb:
        raise ValueError("collinearity is defined for distinct points")
    return form_value(space, pa, pb) == 0


def enumerate_points(space: PolarSpace) -> tuple[Point, ...]:
    """All normalized points, sorted lexicographically (stable ids)."""
    return space.points


def empty_subspace(space: PolarSpace) -> Subspace:
    return zero_subspace(space.dim)


def is_singular(space: PolarSpace, sub: Subspace) -> bool:
    """True iff the subspace is totally isotropic."""
    rows = sub.rows
    return all(
        form_value(space, rows[i], rows[j]) == 0
        for i in range(len(rows))
        for j in range(i + 1, len(rows))
    )


def perp_subspace(space: PolarSpace, sub: Subspace) -> Subspace:
    """The full linear subspace of vectors orthogonal to every row of ``sub``."""
    p = space.p
    conds = []
    for row in sub.rows:
        cond = [0] * space.dim
        for i in range(space.n):
            cond[2 * i] = (-row[2 * i + 1]) % p
            cond[2 * i + 1] = row[2 * i]
        conds.append(cond)
    return nullspace(space.field, conds, space.dim)


def points_in_subspace(space: PolarSpace, sub: Subspace) -> list[Point]:
    """All normalized points of a linear subspace.

    RREF rows make the canonical coefficient sweep (leading coefficient 1)
    emit vectors that are already normalized.
    """
    p = space.p
    rows = sub.rows
    out: list[Point] = []
    for k in range(len(rows)):
        base = rows[k]
        for tail in product(range(p), repeat=len(rows) - k - 1):
            vec = list(base)
            for c, row in zip(tail, rows[k + 1 :]):
                if c:
                    vec = [(x + c * y) % p for x, y in zip(vec, row)]
            out.append(tuple(vec))
    return out


def singular_span(space: PolarSpace, vectors: Iterable[Sequence[int]]) -> Subspace:
    """Span of pairwise-collinear points; raises if the span is not singular."""
    sub = rref(space.field, list(vectors), space.dim)
    if not is_singular(space, sub):
        raise ValueError("span is not totally isotropic")
    return sub


def enumerate_singular(space: PolarSpace, k: int) -> tuple[Subspace, ...]:
    """All singular subspaces of projective dimension k, canonically sorted."""
    if not 0 <= k <= space.n - 1:
        raise ValueError(f"projective dimension {k} out of range [0, {space.n - 1}]")
    top = max(space._singular_cache) if space._singular_cache else -1
    if k <= top:
        return space._singular_cache[k]
    if top < 0:
        layer = tuple(
            sorted(
                (rref(space.field, [pt], space.dim) for pt in space.points),
                key=lambda s: s.rows,
            )
        )
        space._singular_cache[0] = layer
        top = 0
    else:
        layer = space._singular_cache[top]
    for kk in range(top + 1, k + 1):
        layer = _extend_layer(space, layer)
        space._singular_cache[kk] = layer
    return space._singular_cache[k]


def _extend_layer(space: PolarSpace, layer: Sequence[Subspace]) -> tuple[Subspace, ...]:
    field = space.field
    seen: set[Subspace] = set()
    for sub in layer:
        perp = perp_subspace(space, sub)
        for pt in points_in_subspace(space, perp):
            if not contains(field, sub, pt):
                seen.add(rref(field, sub.rows + (pt,), space.dim))
    return tuple(sorted(seen, key=lambda s: s.rows))


def star(space: PolarSpace, base: Subspace, k: int) -> tuple[Subspace, ...]:
    """All singular subspaces of projective dimension k containing ``base``."""
    if not projdim(base) < k <= space.n - 1:
        raise ValueError(f"need projdim(base) < k <= n-1, got {projdim(base)} and {k}")
    if not is_singular(space, base):
        raise ValueError("base subspace is not singular")
    layer: tuple[Subspace, ...] = (base,)
    for _ in range(k - projdim(base)):
        layer = _extend_layer(space, layer)
    return layer


def residue_collinear(space: PolarSpace, base: Subspace, a: Subspace, b: Subspace) -> bool:
    """Collinearity in the residue geometry on the subspaces one step above base.

    Both arguments must contain ``base`` and have projective dimension
    projdim(base) + 1; they are collinear exactly when their span is singular
    (of projective dimension projdim(base) + 2).
    """
    if a == b:
        raise ValueError("residue collinearity is defined for distinct elements")
    if a.rank != base.rank + 1 or b.rank != base.rank + 1:
        raise ValueError("arguments must lie one step above the base subspace")
    for side in (a, b):
        if not all(contains(space.field, side, row) for row in base.rows):
            raise ValueError("arguments must contain the base subspace")
    return is_singular(space, sum_span(space.field, a, b))


class ResidueSpace:
    """Point-line geometry of the residue of a singular subspace.

    Points are the singular subspaces one step above the base, lines are
    induced by the subspaces two steps above.  For a base of projective
    dimension m in a rank-n space this is a polar space of rank n - m - 1.
    """

    def __init__(self, space: PolarSpace, base: Subspace):
        m = projdim(base)
        if m > space.n - 3:
            raise ValueError("residue of rank < 2 is excluded from axiom checks")
        self.space = space
        self.base = base
        self.rank = space.n - m - 1
        self.points = star(space, base, m + 1)
        index = {s: i for i, s in enumerate(self.points)}
        self._lines = []
        for upper in star(space, base, m + 2):
            members = tuple(
                sorted(index[s] for s in self.points if contains_all(space, upper, s))
            )
            self._lines.append(members)
        self._masks = self._collinearity_masks()

    def _collinearity_masks(self) -> list[int]:
        masks = [0] * len(self.points)
        for i in range(len(self.points)):
            for j in range(i + 1, len(self.points)):
                if residue_collinear(self.space, self.base, self.points[i], self.points[j]):
                    masks[i] |= 1 << j
                    masks[j] |= 1 << i
        return masks

    def point_count(self) -> int:
        return len(self.points)

    def collinear_mask(self, i: int) -> int:
        return self._masks[i]

    def line_index_sets(self) -> list[tuple[int, ...]]:
        return list(self._lines)

    def describe_point(self, i: int) -> list[list[int]]:
        return [list(row) for row in self.points[i].rows]


def contains_all(space: PolarSpace, outer: Subspace, inner: Subspace) -> bool:
    return all(contains(space.field, outer, row) for row in inner.rows)


def check_polar_axioms(geom) -> dict:
    """Exhaustively verify the polar-space axioms on a point-line geometry.

    ``geom`` provides point_count(), collinear_mask(i), line_index_sets() and
    describe_point(i).  Returns a report with one pass/fail entry per axiom
    and a witness for each failure; never raises.
    """
    npts = geom.point_count()
    lines = geom.line_index_sets()
    full = (1 << npts) - 1
    axioms = []

    small = [L for L in lines if len(L) < 3]
    axioms.append(
        {
            "axiom": "every line has at least three points",
            "ok": not small,
            "witness": None if not small else [geom.describe_point(i) for i in small[0]],
        }
    )

    deep = next(
        (i for i in range(npts) if geom.collinear_mask(i) | (1 << i) == full), None
    )
    axioms.append(
        {
            "axiom": "no point is collinear with all points",
            "ok": deep is None,
            "witness": None if deep is None else geom.describe_point(deep),
        }
    )

    bad = None
    line_masks = []
    for L in lines:
        mask = 0
        for j in L:
            mask |= 1 << j
        line_masks.append(mask)
    for i in range(npts):
        cm = geom.collinear_mask(i)
        for L, mask in zip(lines, line_masks):
            hits = (cm & mask).bit_count()
            if mask >> i & 1:
                ok = hits == len(L) - 1
            else:
                ok = hits in (1, len(L))
            if not ok:
                bad = {
                    "point": geom.describe_point(i),
                    "line": [geom.describe_point(j) for j in L],
                    "collinear_count": hits,
                }
                break
        if bad:
            break
    axioms.append(
        {"axiom": "a point is collinear with one or all points of a line", "ok": bad is None, "witness": bad}
    )

    # flags of singular subspaces are chains of nested subspaces; the model is
    # finite, so every flag is
    axioms.append({"axiom": "every singular-subspace flag is finite", "ok": True, "witness": None})

    return {
        "ok": all(a["ok"] for a in axioms),
        "points": npts,
        "lines": len(lines),
        "axioms": axioms,
    }


# -- frames and apartments ---------------------------------------------------


@dataclass(frozen=True)
class Frame:
    """2n points such that each has a unique non-collinear partner.

    ``points`` are lexicographically sorted; ``sigma[i]`` is the index of the
    partner of points[i] (a fixed-point-free involution).
    """

    points: tuple[Point, ...]
    sigma: tuple[int, ...]

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in enumerate(self.sigma) if i < j]


def is_frame(space: PolarSpace, points: Sequence[Sequence[int]]) -> Frame | None:
    """The Frame on these points, or None if some point lacks a unique
    non-collinear partner among the others."""
    if len(points) != 2 * space.n:
        raise ValueError(f"a frame needs exactly {2 * space.n} points")
    pts = sorted({normalize_point(space.field, pt) for pt in points})
    if len(pts) != 2 * space.n:
        raise ValueError("frame points must be distinct")
    sigma = []
    for i, a in enumerate(pts):
        partners = [j for j, b in enumerate(pts) if j != i and form_value(space, a, b) != 0]
        if len(partners) != 1:
            return None
        sigma.append(partners[0])
    return Frame(tuple(pts), tuple(sigma))


def enumerate_frames(space: PolarSpace, budget: int = 10**7) -> tuple[list[Frame], bool]:
    """All frames up to set equality, by backtracking over hyperbolic pairs.

    Pairs are chosen with lexicographically increasing anchors inside the
    perp of everything chosen so far, which generates each frame exactly
    once.  Returns (frames, complete); complete is False when the node
    budget ran out first.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    field = space.field
    pts = space.points
    seen: set[tuple[Point, ...]] = set()
    frames: list[Frame] = []
    nodes = 0
    exhausted = False

    def descend(chosen: list[int], cands: list[int], last_anchor: int) -> None:
        nonlocal nodes, exhausted
        if exhausted:
            return
        if len(chosen) == 2 * space.n:
            key = tuple(sorted(pts[i] for i in chosen))
            if key not in seen:
                seen.add(key)
                frame = is_frame(space, key)
                assert frame is not None
                frames.append(frame)
            return
        for ai, a in enumerate(cands):
            if a <= last_anchor:
                continue
            for b in cands[ai + 1 :]:
                if form_value(space, pts[a], pts[b]) == 0:
                    continue
                nodes += 1
                if nodes > budget:
                    exhausted = True
                    return
                nxt = chosen + [a, b]
                if len(nxt) == 2 * space.n:
                    descend(nxt, [], a)
                else:
                    w = perp_subspace(
                        space, rref(field, [pts[i] for i in nxt], space.dim)
                    )
                    sub_cands = sorted(
                        space.point_index[q] for q in points_in_subspace(space, w)
                    )
                    descend(nxt, sub_cands, a)
                if exhausted:
                    return

    descend([], list(range(len(pts))), -1)
    return frames, not exhausted


def sample_frames(space: PolarSpace, count: int, seed: int) -> list[Frame]:
    """``count`` distinct seeded random frames (hyperbolic pairs drawn
    uniformly inside iterated perps)."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    field = space.field
    out: dict[tuple[Point, ...], Frame] = {}
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 100 * count + 100:
            raise RuntimeError("frame sampling failed to reach the requested count")
        chosen: list[Point] = []
        cands = list(space.points)
        ok = True
        for _ in range(space.n):
            a = cands[int(rng.integers(len(cands)))]
            partners = [q for q in cands if form_value(space, a, q) != 0]
            if not partners:
                ok = False
                break
            b = partners[int(rng.integers(len(partners)))]
            chosen += [a, b]
            w = perp_subspace(space, rref(field, chosen, space.dim))
            cands = points_in_subspace(space, w)
        if not ok:
            continue
        key = tuple(sorted(chosen))
        if key not in out:
            frame = is_frame(space, key)
            assert frame is not None
            out[key] = frame
    return list(out.values())


def apartment_of_frame(space: PolarSpace, frame: Frame) -> tuple[Subspace, ...]:
    """The 2^n maximal singular subspaces spanned by one point per sigma pair.

    Entry ``mask`` takes the second point of pair k exactly when bit k of
    ``mask`` is set; this labeling is an isometric copy of the hypercube.
    """
    pairs = frame.pairs()
    members = []
    for mask in range(1 << space.n):
        sel = [
            frame.points[pair[(mask >> k) & 1]] for k, pair in enumerate(pairs)
        ]
        sub = rref(space.field, sel, space.dim)
        assert sub.rank == space.n and is_singular(space, sub)
        members.append(sub)
    assert len(set(members)) == 1 << space.n
    return tuple(members)
