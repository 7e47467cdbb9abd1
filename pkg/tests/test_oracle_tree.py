import itertools
import random
from fractions import Fraction as Q

import pytest

from bttypes.oracle_tree import (
    IDENTITY,
    TreeModel,
    TruncationError,
    canonical_key,
    four_point_ok,
    key_basis,
    mat,
    rank1_battery,
    val,
)


@pytest.fixture(scope="module")
def small():
    return TreeModel(p=3, radius=2)


def test_val():
    assert val(Q(50), 5) == 2
    assert val(Q(3, 25), 5) == -2
    assert val(Q(7), 5) == 0
    assert val(Q(0), 5) is None


def test_ball_sizes():
    # (p + 1) p^(k-1) vertices at distance k from the base
    for p, radius in ((3, 2), (5, 2), (2, 3)):
        m = TreeModel(p=p, radius=radius)
        expected = 1 + sum((p + 1) * p ** (k - 1) for k in range(1, radius + 1))
        assert len(m.vertices) == expected
        for v, depth in m.vertices.items():
            assert m.distance(m.base, v) == depth


def test_full_radius_four_has_937_vertices():
    assert len(TreeModel(p=5, radius=4).vertices) == 937


def test_rejects_composite_p():
    with pytest.raises(ValueError):
        TreeModel(p=6, radius=1)


def test_anisotropic_torus_needs_odd_p():
    m = TreeModel(p=2, radius=1)
    with pytest.raises(ValueError):
        m.anisotropic(0)
    with pytest.raises(ValueError):
        rank1_battery(p=2, radius=1)


def test_canonical_key_ignores_basis_changes(small):
    p = small.p
    for key in small.vertices:
        b = key_basis(key, p)
        unimod = mat([[1, 4], [0, 1]])
        scaled = tuple(tuple(Q(p) * e for e in row) for row in b)
        swapped = ((b[0][1], b[0][0]), (b[1][1], b[1][0]))
        for other in (scaled, swapped, tuple(
            tuple(sum(b[i][k] * unimod[k][j] for k in range(2)) for j in range(2)) for i in range(2)
        )):
            assert canonical_key(other, p) == key


def test_neighbours_at_distance_one(small):
    for v in small.vertices:
        nb = small.neighbours(v)
        assert len(set(nb)) == small.p + 1
        assert all(small.distance(v, w) == 1 for w in nb)


def test_four_point_condition(small):
    rnd = random.Random(3)
    verts = sorted(small.vertices)
    for _ in range(200):
        assert four_point_ok(small, *rnd.sample(verts, 4))


def test_upper_unipotent_fixes_half_line(small):
    # u(p^v) fixes the standard vertex (n, 0) exactly when v >= n
    line = [(n, Q(0)) for n in range(-2, 3)]
    for v in (-1, 0, 1):
        g = small.upper(v)
        assert {k for k in line if small.fixes(g, k)} == {k for k in line if v >= k[0]}


def test_identity_fixes_everything(small):
    assert small.fixed_vertices(IDENTITY) == frozenset(small.vertices)


def test_anisotropic_fixes_a_ball(small):
    for k in (0, 1, 2):
        fixed = small.fixed_vertices(small.anisotropic(k))
        assert fixed == {v for v, d in small.vertices.items() if d <= k}


def test_truncation_too_small_raises():
    m = TreeModel(p=3, radius=2, truncation=3)
    with pytest.raises(TruncationError) as info:
        m.truncate(IDENTITY)
    assert info.value.required == 5


def test_foot_is_on_standard_line(small):
    for v in small.vertices:
        f = small.foot(v)
        assert small.on_standard_line(f)
        d = small.distance(v, f)
        assert all(small.distance(v, (n, Q(0))) >= d for n in range(-3, 4))


def test_non_integral_element_rejected(small):
    with pytest.raises(ValueError):
        small.truncate(small.upper(-1))


def test_battery_small_radius():
    results = rank1_battery(p=5, radius=2)
    assert results and all(c.ok for c in results), [
        (c.name, c.mismatches[:3]) for c in results if not c.ok
    ]
    assert len({c.name for c in results}) == len(results)


def test_pairs_commute_with_distance(small):
    verts = sorted(small.vertices)[:10]
    for a, b in itertools.combinations(verts, 2):
        assert small.distance(a, b) == small.distance(b, a)


def test_depth_zero_split_torus_at_p3_fixes_more_than_the_line():
    # every unit squares to 1 mod 3, so diag(u, 1/u) acts as -1 on the residue tree
    m = TreeModel(p=3, radius=2)
    fixed = m.fixed_vertices(m.split_torus(0))
    assert any(not m.on_standard_line(v) for v in fixed)
    bad = [c for c in rank1_battery(p=3, radius=2) if not c.ok]
    assert [c.name for c in bad] == ["split torus t=0"]
