import random
from itertools import combinations

import pytest

from dualpolar.linalg import contains, rref, zero_subspace
from dualpolar.polar import (
    PolarSpace,
    ResidueSpace,
    apartment_of_frame,
    check_polar_axioms,
    empty_subspace,
    enumerate_frames,
    enumerate_points,
    enumerate_singular,
    form_value,
    is_collinear,
    is_frame,
    is_singular,
    perp_subspace,
    points_in_subspace,
    projdim,
    residue_collinear,
    sample_frames,
    star,
)


def isotropic_count(n, k, q):
    """Totally isotropic subspaces of linear dimension k in a rank-n
    symplectic space: the standard two-branch recurrence (independent of the
    enumeration code)."""
    if k > n:
        return 0
    if k == 0:
        return 1
    return (1 + q ** (2 * n - k)) * isotropic_count(n - 1, k - 1, q) + (
        q**k
    ) * isotropic_count(n - 1, k, q)


SP42 = PolarSpace(2, 2)
SP62 = PolarSpace(3, 2)
SP43 = PolarSpace(2, 3)


def test_point_counts_match_closed_form():
    for space in (SP42, SP62, SP43):
        expected = (space.p ** (2 * space.n) - 1) // (space.p - 1)
        assert len(enumerate_points(space)) == expected
    assert len(SP42.points) == 15
    assert len(SP62.points) == 63
    assert len(SP43.points) == 40


def test_points_are_lexicographically_sorted():
    for space in (SP42, SP43):
        assert list(space.points) == sorted(space.points)


def test_singular_counts_match_recurrence_oracle():
    for space in (SP42, SP62, SP43):
        for k in range(space.n):
            got = len(enumerate_singular(space, k))
            assert got == isotropic_count(space.n, k + 1, space.p)


def test_maximal_counts():
    assert len(enumerate_singular(SP42, 1)) == 15
    assert len(enumerate_singular(SP62, 2)) == 135
    assert len(enumerate_singular(SP43, 1)) == 40
    assert len(enumerate_singular(PolarSpace(3, 3), 2)) == 1120


def test_enumerate_singular_range_check():
    with pytest.raises(ValueError):
        enumerate_singular(SP42, 2)


def test_space_parameter_validation():
    with pytest.raises(ValueError):
        PolarSpace(1, 2)
    with pytest.raises(ValueError):
        PolarSpace(2, 7)


def test_form_value_hyperbolic_pairs():
    e1 = (1, 0, 0, 0)
    f1 = (0, 1, 0, 0)
    e2 = (0, 0, 1, 0)
    assert form_value(SP42, e1, f1) == 1
    assert form_value(SP42, e1, e2) == 0
    rng = random.Random(0)
    for _ in range(100):
        v = tuple(rng.randrange(2) for _ in range(4))
        assert form_value(SP42, v, v) == 0


def test_is_collinear_examples():
    assert is_collinear(SP42, (1, 0, 0, 0), (0, 0, 1, 0))
    assert not is_collinear(SP42, (1, 0, 0, 0), (0, 1, 0, 0))
    with pytest.raises(ValueError):
        is_collinear(SP42, (1, 0, 0, 0), (1, 0, 0, 0))


def test_noncollinear_count_is_q_to_2n_minus_1():
    # every point of Sp(4,2) fails collinearity with exactly 8 of the others
    for a in SP42.points:
        bad = sum(1 for b in SP42.points if b != a and form_value(SP42, a, b) != 0)
        assert bad == 8


def test_perp_subspace():
    whole = perp_subspace(SP42, empty_subspace(SP42))
    assert whole.rank == 4
    pt = rref(SP42.field, [(1, 0, 0, 0)], 4)
    perp = perp_subspace(SP42, pt)
    assert perp.rank == 3
    assert contains(SP42.field, perp, (1, 0, 0, 0))
    for k in range(SP42.n):
        for sub in enumerate_singular(SP42, k):
            bigger = perp_subspace(SP42, sub)
            assert bigger.rank == 4 - sub.rank
            assert all(contains(SP42.field, bigger, row) for row in sub.rows)


def test_polar_axioms_pass_on_models():
    for space in (SP42, SP43):
        report = check_polar_axioms(space)
        assert report["ok"], report
    line_sizes = {len(L) for L in SP43.line_index_sets()}
    assert line_sizes == {4}


class _DegenerateGeometry:
    """Sp(4,2) collinearity with the first hyperbolic pair zeroed out of the
    form; the two radical points are collinear with everything."""

    def __init__(self):
        self.space = SP42
        self.points = SP42.points

    def point_count(self):
        return len(self.points)

    def collinear_mask(self, i):
        mask = 0
        u = self.points[i]
        for j, v in enumerate(self.points):
            if j == i:
                continue
            val = (u[2] * v[3] - u[3] * v[2]) % 2
            if val == 0:
                mask |= 1 << j
        return mask

    def line_index_sets(self):
        return self.space.line_index_sets()

    def describe_point(self, i):
        return list(self.points[i])


def test_degenerate_form_fails_no_deep_point_axiom():
    report = check_polar_axioms(_DegenerateGeometry())
    assert not report["ok"]
    by_name = {a["axiom"]: a for a in report["axioms"]}
    assert not by_name["no point is collinear with all points"]["ok"]
    assert by_name["no point is collinear with all points"]["witness"] is not None


def test_point_orthogonal_to_maximal_lies_inside():
    # exhaustively on Sp(4,2), sampled on Sp(6,2)
    for space, maximals, pts in (
        (SP42, enumerate_singular(SP42, 1), SP42.points),
        (SP62, enumerate_singular(SP62, 2)[:20], SP62.points),
    ):
        for sub in maximals:
            for q in pts:
                if all(form_value(space, q, row) == 0 for row in sub.rows):
                    assert contains(space.field, sub, q)


def test_pairwise_collinear_span_is_singular():
    rng = random.Random(9)
    for space in (SP42, SP62):
        pts = space.points
        for _ in range(40):
            sample = rng.sample(range(len(pts)), 3)
            chosen = [pts[i] for i in sample]
            if any(
                form_value(space, a, b) != 0 for a, b in combinations(chosen, 2)
            ):
                continue
            span = rref(space.field, chosen, space.dim)
            assert is_singular(space, span)
            for q in pts:
                if all(form_value(space, q, c) == 0 for c in chosen):
                    assert all(form_value(space, q, row) == 0 for row in span.rows)


def test_is_frame_standard_basis():
    pts = [u for pair in SP42.hyperbolic_pair_units() for u in pair]
    frame = is_frame(SP42, pts)
    assert frame is not None
    # partners are exactly the hyperbolic mates
    for i, j in frame.pairs():
        assert form_value(SP42, frame.points[i], frame.points[j]) != 0


def test_is_frame_rejections():
    assert is_frame(SP42, [(1, 0, 0, 0), (0, 0, 1, 0), (0, 1, 0, 0), (1, 0, 1, 0)]) is None
    # four pairwise collinear points have no non-collinear partner at all
    assert is_frame(SP42, [(1, 0, 0, 0), (0, 0, 1, 0), (1, 0, 1, 0), (1, 0, 1, 1)]) is None
    with pytest.raises(ValueError):
        is_frame(SP42, [(1, 0, 0, 0)])
    with pytest.raises(ValueError):
        is_frame(SP42, [(1, 0, 0, 0)] * 4)


def bruteforce_frames(space):
    """Scan every 2n-subset of the points for the unique-partner condition."""
    out = []
    for pts in combinations(space.points, 2 * space.n):
        ok = True
        for a in pts:
            partners = sum(1 for b in pts if b != a and form_value(space, a, b) != 0)
            if partners != 1:
                ok = False
                break
        if ok:
            out.append(pts)
    return out


def test_enumerate_frames_matches_bruteforce_oracle():
    frames, complete = enumerate_frames(SP42)
    assert complete
    oracle = bruteforce_frames(SP42)
    assert len(frames) == len(oracle) == 90
    assert {f.points for f in frames} == set(oracle)
    for f in frames:
        assert is_frame(SP42, f.points) is not None


def test_enumerate_frames_budget_flag():
    frames, complete = enumerate_frames(SP42, budget=10)
    assert not complete
    assert len(frames) < 90


def test_frames_are_independent_sets():
    frames, _ = enumerate_frames(SP42)
    for f in frames[:20]:
        for i, pt in enumerate(f.points):
            others = [q for j, q in enumerate(f.points) if j != i]
            span = rref(SP42.field, others, 4)
            assert not contains(SP42.field, span, pt)


def test_distinct_frames_give_distinct_apartments():
    frames, _ = enumerate_frames(SP42)
    images = {frozenset(apartment_of_frame(SP42, f)) for f in frames}
    assert len(images) == len(frames)


def test_apartment_of_standard_frame():
    pts = [u for pair in SP42.hyperbolic_pair_units() for u in pair]
    frame = is_frame(SP42, pts)
    members = apartment_of_frame(SP42, frame)
    assert len(members) == 4
    e1, f1 = (1, 0, 0, 0), (0, 1, 0, 0)
    e2, f2 = (0, 0, 1, 0), (0, 0, 0, 1)
    expected = {
        rref(SP42.field, [a, b], 4)
        for a in (e1, f1)
        for b in (e2, f2)
    }
    assert set(members) == expected


def test_apartment_members_take_one_point_per_pair():
    frames, _ = enumerate_frames(SP42)
    for frame in frames[:15]:
        members = apartment_of_frame(SP42, frame)
        assert len(members) == 1 << SP42.n
        for member in members:
            for i, j in frame.pairs():
                a = contains(SP42.field, member, frame.points[i])
                b = contains(SP42.field, member, frame.points[j])
                assert a != b


def test_sample_frames_deterministic_and_valid():
    a = sample_frames(SP62, 10, seed=5)
    b = sample_frames(SP62, 10, seed=5)
    assert [f.points for f in a] == [f.points for f in b]
    assert len({f.points for f in a}) == 10
    for f in a:
        assert is_frame(SP62, f.points) is not None


def test_star_of_empty_subspace_is_all_maximals():
    got = star(SP42, empty_subspace(SP42), 1)
    assert got == enumerate_singular(SP42, 1)


def test_star_of_point_in_sp62():
    pt = rref(SP62.field, [SP62.points[0]], 6)
    got = star(SP62, pt, 2)
    assert len(got) == 15
    for sub in got:
        assert all(contains(SP62.field, sub, row) for row in pt.rows)


def test_star_precondition():
    pt = rref(SP42.field, [(1, 0, 0, 0)], 4)
    with pytest.raises(ValueError):
        star(SP42, pt, 0)


def test_residue_collinear_inside_common_maximal():
    maximal = enumerate_singular(SP62, 2)[0]
    lines = [
        rref(SP62.field, [pt], 6)
        for pt in points_in_subspace(SP62, maximal)
    ]
    base = empty_subspace(SP62)
    # any two points of one maximal span a singular line
    assert residue_collinear(SP62, base, lines[0], lines[1])


def test_residue_collinear_reduces_to_collinearity_for_empty_base():
    base = empty_subspace(SP42)
    pts = SP42.points
    for a, b in combinations(pts[:8], 2):
        lhs = residue_collinear(
            SP42, base, rref(SP42.field, [a], 4), rref(SP42.field, [b], 4)
        )
        assert lhs == is_collinear(SP42, a, b)


def test_point_residue_of_sp62_is_rank2_polar_space():
    pt = rref(SP62.field, [SP62.points[0]], 6)
    residue = ResidueSpace(SP62, pt)
    assert residue.rank == 2
    assert residue.point_count() == 15
    report = check_polar_axioms(residue)
    assert report["ok"], report


def test_residue_space_rejects_rank_one():
    line = enumerate_singular(SP42, 0)[0]
    with pytest.raises(ValueError):
        ResidueSpace(SP42, line)


def test_projdim_convention():
    assert projdim(zero_subspace(4)) == -1
    assert projdim(rref(SP42.field, [(1, 0, 0, 0)], 4)) == 0


def test_rank_four_desk_scale():
    # the largest supported instance: counts against the recurrence oracle
    # and a full-rank hypercube witness round trip
    space = PolarSpace(4, 2)
    assert len(space.points) == 255
    for k, expected in enumerate((255, 5355, 11475, 2295)):
        assert len(enumerate_singular(space, k)) == expected
        assert expected == isotropic_count(4, k + 1, 2)
    from dualpolar.apartments import is_apartment

    for frame in sample_frames(space, 2, seed=8):
        members = apartment_of_frame(space, frame)
        witness = is_apartment(space, members)
        assert witness is not None and witness.m == 4
        assert witness.base.rank == 0
        assert set(witness.to_frame(space).points) == set(frame.points)
