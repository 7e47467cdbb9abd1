import sys
from fractions import Fraction as Q
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))
from conftest import LONG, LONG_PAIR, matrix_skeletons  # noqa: E402

from bttypes.apartment import INF, ZERO, ZERO_PLUS, Depth  # noqa: E402
from bttypes.datum import (  # noqa: E402
    DepthSequence,
    LeviChain,
    build_skeleton,
    filtered_profile,
    genericity_walls,
    h_plus_profile,
    h_profile,
    j_profile,
    script_j_profiles,
)
from bttypes.roots import build_root_system  # noqa: E402

C2 = build_root_system("C2")
BOX = ((Q(-1), Q(1)), (Q(-1), Q(1)))


def sp4(r0=3):
    return build_skeleton(C2, [LONG], (r0, r0), (0, 0))


def in_level0(sk, i):
    return i in sk.chain.levels[0].members


def test_depth_order_rejected_with_constraint_named():
    with pytest.raises(ValueError, match=r"r_0 < r_1"):
        DepthSequence((2, 1, 3))
    with pytest.raises(ValueError, match=r"r_1 <= r_2"):
        DepthSequence((1, 3, 2))
    with pytest.raises(ValueError):
        DepthSequence((-1,))
    assert DepthSequence((1, 2, 2)).s == (Q(1, 2), Q(1))


def test_skeleton_validation():
    with pytest.raises(ValueError, match="need 2 depths"):
        build_skeleton(C2, [LONG], (1,), (0, 0))
    with pytest.raises(ValueError, match="vertex"):
        build_skeleton(C2, [LONG], (1, 1), (0, Q(1, 4)))
    with pytest.raises(ValueError, match="nested"):
        LeviChain(C2, (C2.full(), C2.full()))


def test_d0_profiles_are_constant():
    sk = build_skeleton(C2, [], (2,), (0, 0))
    assert set(j_profile(sk).root_depths) == {ZERO}
    hp = h_plus_profile(sk)
    assert set(hp.root_depths) == {ZERO_PLUS} and hp.torus_depth == ZERO_PLUS


def test_sp4_profiles():
    sk = sp4(3)
    j, hp = j_profile(sk), h_plus_profile(sk)
    for i in range(len(C2.roots)):
        if in_level0(sk, i):
            assert j.root_depths[i] == ZERO and hp.root_depths[i] == ZERO_PLUS
        else:
            assert j.root_depths[i] == Depth.of(Q(3, 2))
            assert hp.root_depths[i] == Depth.of(Q(3, 2), True)
    assert hp <= j


def test_filtered_profile_t0_and_display():
    sk = build_skeleton(C2, [LONG, LONG_PAIR], (1, 3, 4), (0, 0))
    assert filtered_profile("J", ZERO, sk).root_depths == j_profile(sk).root_depths
    assert filtered_profile("H", ZERO, sk).root_depths == h_profile(sk).root_depths
    s0, s1 = sk.s
    for t in (s0 / 2, s0, (s0 + s1) / 2, s1):
        ht = filtered_profile("H", Depth.of(t), sk)
        i = sum(1 for s in sk.s if s < t)  # level whose roots carry depth t
        for k in range(len(C2.roots)):
            lv = sk.chain.level_of(k)
            want = Depth.of(t) if lv <= i else Depth.of(sk.s[lv - 1], True)
            assert ht.root_depths[k] == want
        assert ht.torus_depth == Depth.of(t)


@pytest.mark.parametrize("d,r,sk", matrix_skeletons())
def test_filtered_profile_monotone(d, r, sk):
    grid = sorted({Q(0)} | set(sk.s) | {v + Q(1, 7) for v in sk.s} | {Q(5)})
    for base in ("J", "H", "J+", "H+"):
        profs = [filtered_profile(base, Depth.of(t), sk) for t in grid]
        assert all(b <= a for a, b in zip(profs, profs[1:]))


def test_filtered_profile_rejects_unknown_base():
    with pytest.raises(ValueError):
        filtered_profile("K", ZERO, sp4())
    with pytest.raises(ValueError):
        filtered_profile("J", INF, sp4())


def test_script_j_products_and_overlap():
    sk = build_skeleton(C2, [LONG, LONG_PAIR], (1, 3, 4), (0, 0))
    for i in range(sk.d):
        big, plus = script_j_profiles(i, sk)
        assert j_profile(sk, i).join(big) == j_profile(sk, i + 1)
        overlap = j_profile(sk, i).meet(big)
        r_i = Depth.of(sk.depths.r[i])
        for k in sk.chain.levels[i].members:
            assert overlap.root_depths[k] == r_i
        assert plus <= big
    with pytest.raises(ValueError):
        script_j_profiles(2, sk)


@pytest.mark.parametrize("d,r,sk", matrix_skeletons())
def test_normality_surrogate(d, r, sk):
    j = j_profile(sk)
    for t in [Q(0)] + list(sk.s):
        ht = filtered_profile("H+", Depth.of(t), sk)
        for a, alpha in enumerate(C2.roots):
            for b, beta in enumerate(C2.roots):
                s = tuple(x + y for x, y in zip(alpha, beta))
                if C2.is_root(s):
                    assert j.root_depths[a] + ht.root_depths[b] >= ht.root_depths[C2.index(s)]


def test_genericity_walls():
    sk = sp4(3)
    assert genericity_walls(1, sk.chain.levels[1], sk, BOX) == []
    walls = genericity_walls(1, sk.chain.levels[0], sk, BOX)
    assert {w.root for w in walls} == set(range(len(C2.roots))) - sk.chain.levels[0].members
    s0 = sk.s[0]
    for w in walls:
        a = C2.roots[w.root]
        # the wall alpha(p) + n = s0 meets the box at some corner combination
        vals = [C2.pair(a, (x, y)) for x in (-1, 1) for y in (-1, 1)]
        assert min(vals) <= s0 - w.offset <= max(vals)
    with pytest.raises(ValueError):
        genericity_walls(0, sk.chain.levels[0], sk, BOX)
