"""Isometric hypercube embeddings into dual polar graphs.

The search engine backtracks over source vertices in BFS order with full
pairwise-distance pruning.  Found embeddings are then decomposed: the common
base subspace of the image, the 2m residue-frame subspaces obtained by
intersecting the images of opposite hypercube faces, and the reconstruction
of every image as a span.  A set of maximal singular subspaces is recognized
as an apartment exactly when such a decomposition exists.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Sequence

import numpy as np

from . import polar
from .graphs import DenseGraph, _bits, dual_polar_graph, geodesic_count, geodesics_between, hypercube
from .linalg import Subspace, contains_subspace, intersect, sum_span
from .polar import PolarSpace, residue_collinear
from .reporting import CounterexampleError, make_report, subspace_json

DEFAULT_BUDGET = 10_000_000


@dataclass(frozen=True, eq=False)
class Embedding:
    """An injective, distance-preserving vertex map between two graphs."""

    source: DenseGraph
    target: DenseGraph
    assignment: tuple[int, ...]

    def image_indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.assignment))

    def image_labels(self) -> list:
        return [self.target.labels[i] for i in self.assignment]


def is_isometric_embedding(mapping, src: DenseGraph, dst: DenseGraph) -> bool:
    """True iff ``mapping`` (vertex -> vertex) is injective and preserves all
    pairwise distances."""
    if isinstance(mapping, dict):
        if sorted(mapping) != list(range(src.num_vertices)):
            return False
        arr = [mapping[i] for i in range(src.num_vertices)]
    else:
        arr = list(mapping)
        if len(arr) != src.num_vertices:
            return False
    if len(set(arr)) != len(arr):
        return False
    for i in range(len(arr)):
        di, si = dst.dist[arr[i]], src.dist[i]
        for j in range(i + 1, len(arr)):
            if di[arr[j]] != si[j]:
                return False
    return True


def _source_plan(src: DenseGraph):
    """BFS assignment order from vertex 0, plus per-step distance constraints.

    Step k gets (parent position, [(earlier position, required distance)]).
    The parent is an already-assigned neighbor, so candidates come from one
    adjacency bitmask.
    """
    order = sorted(range(src.num_vertices), key=lambda v: (src.dist[0][v], v))
    pos_of = {v: k for k, v in enumerate(order)}
    plan = []
    for k, v in enumerate(order):
        if k == 0:
            continue
        parent = min(pos_of[u] for u in src.neighbors(v) if pos_of[u] < k)
        reqs = tuple((j, src.dist[v][order[j]]) for j in range(k) if j != parent)
        plan.append((parent, reqs))
    return order, plan


def _branch_search(dst_nbrs, dst_dist, plan, nsrc, root_img, budget, rng):
    """Explore one root placement; returns (image tuples, expansions, complete)."""
    if budget < 1:
        return [], 0, False
    found = []
    imgs = [root_img]
    state = {"expansions": 1, "complete": True}

    def dfs(k: int) -> None:
        if k == nsrc:
            found.append(tuple(imgs))
            return
        parent, reqs = plan[k - 1]
        cands = dst_nbrs[imgs[parent]]
        if rng is not None:
            cands = list(cands)
            rng.shuffle(cands)
        for cand in cands:
            drow = dst_dist[cand]
            ok = True
            for j, d in reqs:
                if drow[imgs[j]] != d:
                    ok = False
                    break
            if not ok:
                continue
            if state["expansions"] >= budget:
                state["complete"] = False
                return
            state["expansions"] += 1
            imgs.append(cand)
            dfs(k + 1)
            imgs.pop()
            if not state["complete"]:
                return

    if nsrc > 1:
        dfs(1)
    else:
        found.append(tuple(imgs))
    return found, state["expansions"], state["complete"]


def _run_tasks(tasks: Sequence[Callable], workers: int) -> list:
    if workers <= 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        futures = [ex.submit(t) for t in tasks]
        return [f.result() for f in futures]


def search_isometric_embeddings(
    src: DenseGraph,
    dst: DenseGraph,
    mode: str = "exhaustive",
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    workers: int = 1,
) -> tuple[list[Embedding], dict]:
    """All (or budget-bounded) isometric embeddings of ``src`` into ``dst``.

    The node budget is split over the root-placement branches up front and
    sample mode only permutes candidate order per branch, so the result set
    is identical for every worker count.  Expansions count vertex
    placements.
    """
    if mode not in ("exhaustive", "sample"):
        raise ValueError(f"unknown mode {mode!r}")
    if budget <= 0:
        raise ValueError("budget must be positive")
    order, plan = _source_plan(src)
    nsrc = src.num_vertices
    nv = dst.num_vertices
    if nv == 0:
        return [], {
            "mode": mode, "budget": budget, "seed": seed, "workers": workers,
            "expansions": 0, "complete": True, "embeddings": 0, "distinct_images": 0,
        }
    nbrs = tuple(tuple(_bits(mask)) for mask in dst.adj)
    shares = [budget // nv + (1 if i < budget % nv else 0) for i in range(nv)]
    if mode == "sample":
        # one independent stream per root branch, all split from the one seed,
        # so the result set does not depend on the worker count
        children = np.random.SeedSequence(seed).spawn(nv)
        rngs = [random.Random(int(c.generate_state(2, np.uint64)[0])) for c in children]
    else:
        rngs = [None] * nv

    tasks = [
        (lambda root=root: _branch_search(
            nbrs, dst.dist, plan, nsrc, root, shares[root], rngs[root]
        ))
        for root in range(nv)
    ]
    results = _run_tasks(tasks, workers)

    embeddings = []
    expansions = 0
    complete = True
    for found, exp, comp in results:
        expansions += exp
        complete = complete and comp
        for imgs in found:
            assignment = [0] * nsrc
            for k, v in enumerate(order):
                assignment[v] = imgs[k]
            embeddings.append(Embedding(src, dst, tuple(assignment)))
    stats = {
        "mode": mode,
        "budget": budget,
        "seed": seed,
        "workers": workers,
        "expansions": expansions,
        "complete": complete,
        "embeddings": len(embeddings),
        "distinct_images": len({e.image_indices() for e in embeddings}),
    }
    return embeddings, stats


def search_hypercube_embeddings(
    m: int,
    graph: DenseGraph,
    mode: str = "exhaustive",
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    workers: int = 1,
) -> tuple[list[Embedding], dict]:
    """Isometric embeddings of the hypercube H_m into ``graph``.

    m may exceed the target diameter; the distance constraints then prune
    everything and the search returns no embeddings.
    """
    return search_isometric_embeddings(hypercube(m), graph, mode, budget, seed, workers)


# -- decomposition of embedded hypercubes ------------------------------------


@dataclass(frozen=True, eq=False)
class ApartmentWitness:
    """Decomposition certifying that 2^m maximal singular subspaces form an
    apartment inside the star of ``base``.

    ``residue_frame`` holds the subspaces Q for the signed indices
    +1..+m, -1..-m in that order (partner of entry s is entry (s + m) mod 2m);
    ``members`` is indexed by sign mask (bit i set = index -(i+1) chosen) and
    members[mask] is the span of its selected Q's over the base.
    """

    base: Subspace
    residue_frame: tuple[Subspace, ...]
    members: tuple[Subspace, ...]

    @property
    def m(self) -> int:
        return len(self.residue_frame) // 2

    def member_set(self) -> frozenset[Subspace]:
        return frozenset(self.members)

    def to_frame(self, space: PolarSpace) -> polar.Frame:
        """The recovered point frame; only defined when the base is empty."""
        if self.base.rank != 0:
            raise ValueError("frame points exist only for full-rank witnesses")
        pts = [q.rows[0] for q in self.residue_frame]
        frame = polar.is_frame(space, pts)
        if frame is None:
            raise CounterexampleError(
                "theorem2", {"kind": "recovered_points_not_a_frame", "points": pts}
            )
        return frame


def _images_by_mask(emb: Embedding) -> list[Subspace]:
    first = emb.source.labels[0]
    if not hasattr(first, "mask"):
        raise ValueError("embedding source is not a hypercube graph")
    images = [None] * emb.source.num_vertices
    for v, lab in enumerate(emb.source.labels):
        images[lab.mask] = emb.target.labels[emb.assignment[v]]
    return images


def _base_from_images(space: PolarSpace, images: Sequence[Subspace], statement: str) -> Subspace:
    field = space.field
    m = (len(images) - 1).bit_length()
    full = len(images) - 1
    base = intersect(field, images[0], images[full])
    if base.rank != space.n - m:
        raise CounterexampleError(
            statement,
            {
                "kind": "base_dimension",
                "expected_rank": space.n - m,
                "got_rank": base.rank,
                "base": subspace_json(base),
            },
        )
    for x in range(1 << (m - 1)):
        other = intersect(field, images[x], images[x ^ full])
        if other != base:
            raise CounterexampleError(
                statement,
                {"kind": "base_depends_on_opposite_pair", "mask": x, "other": subspace_json(other)},
            )
    for mask, img in enumerate(images):
        if not contains_subspace(field, img, base):
            raise CounterexampleError(
                statement, {"kind": "image_missing_base", "mask": mask}
            )
    everything = reduce(lambda a, b: intersect(field, a, b), images)
    if everything != base:
        raise CounterexampleError(
            statement,
            {"kind": "total_intersection_differs", "total": subspace_json(everything)},
        )
    return base


def base_subspace(space: PolarSpace, emb: Embedding) -> Subspace:
    """The singular subspace common to every image of an embedded hypercube.

    Computed as the intersection of one opposite image pair and checked to
    have projective dimension n - m - 1, to be independent of the pair
    chosen, and to lie in every image; failures raise CounterexampleError.
    """
    return _base_from_images(space, _images_by_mask(emb), "lemma3")


def _witness_from_images(space: PolarSpace, images: Sequence[Subspace]) -> ApartmentWitness:
    field = space.field
    m = (len(images) - 1).bit_length()
    base = _base_from_images(space, images, "theorem2")
    qs: list[Subspace] = []
    for s in range(2 * m):
        bit = s % m
        want = 1 if s >= m else 0
        face = [img for mask, img in enumerate(images) if (mask >> bit) & 1 == want]
        q = reduce(lambda a, b: intersect(field, a, b), face)
        if q.rank != space.n - m + 1 or not contains_subspace(field, q, base):
            raise CounterexampleError(
                "theorem2",
                {"kind": "face_intersection_defect", "signed_index": s, "got": subspace_json(q)},
            )
        qs.append(q)
    if len(set(qs)) != 2 * m:
        raise CounterexampleError("theorem2", {"kind": "face_subspaces_collide"})
    for s in range(2 * m):
        for t in range(s + 1, 2 * m):
            expected = t != (s + m) % (2 * m)
            if residue_collinear(space, base, qs[s], qs[t]) != expected:
                raise CounterexampleError(
                    "theorem2",
                    {"kind": "residue_frame_condition", "pair": [s, t], "expected": expected},
                )
    for mask, img in enumerate(images):
        chosen = [
            qs[i + m if (mask >> i) & 1 else i] for i in range(m)
        ]
        span = reduce(lambda a, b: sum_span(field, a, b), chosen)
        if span != img:
            raise CounterexampleError(
                "theorem2",
                {"kind": "image_not_spanned_by_faces", "mask": mask, "span": subspace_json(span)},
            )
        for s in range(2 * m):
            selected = ((mask >> (s % m)) & 1) == (1 if s >= m else 0)
            if contains_subspace(field, img, qs[s]) != selected:
                raise CounterexampleError(
                    "theorem2",
                    {"kind": "membership_equivalence", "mask": mask, "signed_index": s},
                )
    return ApartmentWitness(base=base, residue_frame=tuple(qs), members=tuple(images))


def recover_frame(space: PolarSpace, emb: Embedding) -> ApartmentWitness:
    """Decompose a valid embedded hypercube into base and residue frame.

    Every postcondition failure raises CounterexampleError; on hypercubes of
    full rank (m = n) the residue frame consists of single points forming a
    frame of the space.
    """
    return _witness_from_images(space, _images_by_mask(emb))


def _restriction_graph(space: PolarSpace, members: Sequence[Subspace]) -> DenseGraph:
    """Members as a graph carrying ambient dual-polar distances.

    Distances come from the subspace-intersection formula, not from BFS on
    the restriction (an induced subgraph may have longer internal paths).
    """
    field = space.field
    size = len(members)
    dist = [[0] * size for _ in range(size)]
    adj = [0] * size
    for i in range(size):
        for j in range(i + 1, size):
            d = space.n - intersect(field, members[i], members[j]).rank
            dist[i][j] = dist[j][i] = d
            if d == 1:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    seen = 1
    frontier = 1
    while frontier:
        nxt = 0
        for b in _bits(frontier):
            nxt |= adj[b]
        frontier = nxt & ~seen
        seen |= nxt
    return DenseGraph(
        labels=tuple(members),
        adj=tuple(adj),
        dist=tuple(tuple(r) for r in dist),
        diameter=max(max(r) for r in dist),
        connected=seen == (1 << size) - 1,
        index={s: i for i, s in enumerate(members)},
    )


def is_apartment(space: PolarSpace, members) -> ApartmentWitness | None:
    """Recognize a set of maximal singular subspaces as an apartment.

    Returns None when the set cannot even be relabeled as an isometrically
    embedded hypercube (wrong size, or no distance-preserving labeling).  If
    a labeling exists but its decomposition fails validation, that failure
    is a counterexample to the characterization and raises instead.
    """
    unique = sorted(set(members), key=lambda s: s.rows)
    for s in unique:
        if s.rank != space.n or not polar.is_singular(space, s):
            raise ValueError("members must be maximal singular subspaces")
    size = len(unique)
    m = size.bit_length() - 1
    if size != 1 << m or not 1 <= m <= space.n:
        return None
    restriction = _restriction_graph(space, unique)
    found, _ = search_isometric_embeddings(
        hypercube(m), restriction, mode="exhaustive", budget=10**6
    )
    if not found:
        return None
    return _witness_from_images(space, _images_by_mask(found[0]))


# -- statement verifiers ------------------------------------------------------


def verify_lemma1(
    space: PolarSpace,
    mode: str = "exhaustive",
    budget: int = 10_000,
    seed: int = 0,
    graph: DenseGraph | None = None,
) -> dict:
    """Check that geodesic interiors contain the intersection of the endpoints.

    Exhaustive mode walks every geodesic between every vertex pair (the
    budget caps the total, flagging incompleteness); sample mode draws
    ``budget`` seeded uniform geodesics from random pairs.
    """
    start = time.perf_counter()
    if graph is None:
        graph = dual_polar_graph(space)
    field = space.field
    violations: list[dict] = []
    tested = 0
    complete = True

    def check_path(path: list[int]) -> None:
        nonlocal tested
        tested += 1
        meet = intersect(field, graph.labels[path[0]], graph.labels[path[-1]])
        for u in path[1:-1]:
            if not contains_subspace(field, graph.labels[u], meet):
                violations.append(
                    {
                        "statement": "lemma1",
                        "path": [subspace_json(graph.labels[x]) for x in path],
                        "interior_vertex": subspace_json(graph.labels[u]),
                    }
                )
                return

    if mode == "exhaustive":
        nv = graph.num_vertices
        for v in range(nv):
            for w in range(v + 1, nv):
                if graph.dist[v][w] < 2 or not complete:
                    continue
                paths, _ = geodesics_between(graph, v, w)
                for path in paths:
                    if tested >= budget:
                        complete = False
                        break
                    check_path(path)
    elif mode == "sample":
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        nv = graph.num_vertices
        while tested < budget:
            v = int(rng.integers(nv))
            w = int(rng.integers(nv))
            if graph.dist[v][w] < 2:
                continue
            _, counts = geodesic_count(graph, v, w)
            path = _sample_geodesic(graph, v, w, counts, rng)
            check_path(path)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    return make_report(
        statement="lemma1",
        instance={"p": space.p, "n": space.n, "m": None},
        mode=mode,
        budget=budget,
        seed=seed if mode == "sample" else None,
        workers=1,
        counts={"geodesics": tested},
        violations=violations,
        complete=complete,
        expansions=tested,
        elapsed=time.perf_counter() - start,
    )


def _sample_geodesic(graph: DenseGraph, v: int, w: int, counts, rng) -> list[int]:
    dv = graph.dist[v]
    path = [w]
    while path[-1] != v:
        u = path[-1]
        preds = [t for t in _bits(graph.adj[u]) if dv[t] == dv[u] - 1 and counts[t] > 0]
        weights = np.array([counts[t] for t in preds], dtype=float)
        path.append(preds[int(rng.choice(len(preds), p=weights / weights.sum()))])
    return path[::-1]


def verify_theorem2(
    space: PolarSpace,
    m: int,
    mode: str = "exhaustive",
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    workers: int = 1,
    graph: DenseGraph | None = None,
) -> dict:
    """Search for embedded hypercubes H_m and validate that every distinct
    image is an apartment over a base of projective dimension n - m - 1.

    With m = n in exhaustive mode the distinct images are also counted
    against the frame-defined apartments, and each witness is round-tripped
    through its recovered frame.
    """
    if not 1 <= m <= space.n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={space.n}")
    start = time.perf_counter()
    if graph is None:
        graph = dual_polar_graph(space)
    embeddings, stats = search_hypercube_embeddings(m, graph, mode, budget, seed, workers)
    violations: list[dict] = []
    images_seen: dict[tuple[int, ...], Embedding] = {}
    for emb in embeddings:
        images_seen.setdefault(emb.image_indices(), emb)

    for key, emb in images_seen.items():
        members = [graph.labels[i] for i in key]
        try:
            witness = is_apartment(space, members)
        except CounterexampleError as exc:
            violations.append(exc.as_violation())
            continue
        if witness is None:
            violations.append(
                {"statement": "theorem2", "kind": "image_not_an_apartment", "image": list(key)}
            )
            continue
        if witness.base.rank != space.n - m:
            violations.append(
                {
                    "statement": "theorem2",
                    "kind": "base_projdim",
                    "expected": space.n - m - 1,
                    "got": witness.base.rank - 1,
                }
            )
            continue
        if m == space.n:
            try:
                frame = witness.to_frame(space)
            except CounterexampleError as exc:
                violations.append(exc.as_violation())
                continue
            rebuilt = set(polar.apartment_of_frame(space, frame))
            if rebuilt != set(members):
                violations.append(
                    {"statement": "theorem2", "kind": "frame_roundtrip_mismatch", "image": list(key)}
                )

    apartments = None
    if m == space.n and mode == "exhaustive" and stats["complete"]:
        frames, frames_complete = polar.enumerate_frames(space, budget=budget)
        if frames_complete:
            apartments = len({frozenset(polar.apartment_of_frame(space, f)) for f in frames})
            if apartments != len(images_seen):
                violations.append(
                    {
                        "statement": "theorem2",
                        "kind": "image_count_vs_apartments",
                        "distinct_images": len(images_seen),
                        "apartments": apartments,
                    }
                )

    counts = {
        "embeddings": stats["embeddings"],
        "distinct_images": stats["distinct_images"],
        "apartments": apartments,
    }
    return make_report(
        statement="theorem2",
        instance={"p": space.p, "n": space.n, "m": m},
        mode=mode,
        budget=budget,
        seed=seed,
        workers=workers,
        counts=counts,
        violations=violations,
        complete=stats["complete"],
        expansions=stats["expansions"],
        elapsed=time.perf_counter() - start,
    )
