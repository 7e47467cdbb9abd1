from fractions import Fraction as Q

import pytest

from bttypes.apartment import INF, Depth
from bttypes.criteria import (
    ATYPICAL_A,
    ATYPICAL_B,
    TYPE_BEARING,
    UNDECIDED,
    Verdict,
    classify,
    context,
    critical_depths,
    gamma_refinement,
    in_delta,
    projection_criterion,
    shadow_at,
    theta_region,
    theta_union,
    thmA_applies,
    thmB_applies,
)
from bttypes.datum import build_skeleton
from bttypes.roots import build_root_system

from conftest import matrix_skeletons

H = Q(1, 2)


def roots_of(sk, idx):
    return {sk.rs.roots[i] for i in idx}


def test_shadow_is_full_at_x(sp4):
    _, sk, at = sp4
    sh = shadow_at(at.point(0, sk.x), sk, at)
    assert sh.surjective
    assert roots_of(sk, sh.present) == {(0, 2), (0, -2)}


@pytest.mark.parametrize("coords,kept", [
    ((0, H), (0, 2)),
    ((0, -H), (0, -2)),
    ((H, Q(1, 4)), (0, 2)),
])
def test_shadow_drops_roots_negative_at_z(sp4, coords, kept):
    _, sk, at = sp4
    sh = shadow_at(at.point(0, coords), sk, at)
    assert roots_of(sk, sh.present) == {kept}
    assert not sh.surjective


def test_shadow_on_fiber_keeps_both(sp4):
    _, sk, at = sp4
    assert shadow_at(at.point(0, (H, 0)), sk, at).surjective


def test_thmA_none_at_x(sp4):
    cfg, sk, at = sp4
    assert thmA_applies(at.point(0, sk.x), sk, at, cfg.complementary()) is None


def test_thmA_a1_witness_points_along_kept_root():
    rs = build_root_system("A1")
    sk = build_skeleton(rs, [], (4,), (0,))
    from bttypes.config import ConfigFile

    at = ConfigFile(label="A1", levels=(), depths=(Q(4),), x=(Q(0),),
                    box=((Q(-3), Q(3)),)).atlas()
    lam = thmA_applies(at.point(0, (Q(1),)), sk, at)
    assert lam is not None and lam[0] > 0
    lam = thmA_applies(at.point(0, (Q(-1),)), sk, at)
    assert lam is not None and lam[0] < 0


def test_thmA_skipped_on_complementary_trace(sp4):
    cfg, sk, at = sp4
    chains = cfg.complementary()
    z = at.point(1, (-H, H))
    assert thmA_applies(z, sk, at, chains) is None
    v = classify(z, sk, at, chains)
    assert v.kind == UNDECIDED
    assert any("complementary trace short" in n for n in v.annotations)


def test_projection_criterion_off_and_on_fiber(sp4_flat):
    _, sk, at = sp4_flat
    assert projection_criterion(at.point(0, (H, Q(1, 4))), sk, at) is True
    assert projection_criterion(at.point(0, (0, -1)), sk, at) is True
    assert projection_criterion(at.point(0, (H, 0)), sk, at) is False
    assert projection_criterion(at.point(0, sk.x), sk, at) is False


def test_delta_chamber_in_fold_chart(sp4):
    cfg, sk, at = sp4
    z = at.point(1, (Q(-1, 4), Q(3, 4)))
    assert in_delta(z, context(sk, at)) is True
    assert projection_criterion(z, sk, at) is False
    # still caught, by the shadow or by the refinement
    assert classify(z, sk, at, cfg.complementary()).kind == ATYPICAL_A
    foot = gamma_refinement(z, sk, at)
    if foot is not None:
        assert projection_criterion(foot, sk, at) is True


def test_gamma_refinement_silent_at_x(sp4):
    _, sk, at = sp4
    assert gamma_refinement(at.point(0, sk.x), sk, at) is None


@pytest.mark.parametrize("bad", [Q(0), Q(-1), Q(10), Depth(Q(1), True), INF])
def test_theta_rejects_out_of_range(sp4, bad):
    _, sk, at = sp4
    with pytest.raises(ValueError):
        theta_region(bad, sk, at)


def test_theta_rejects_d0():
    _, _, sk = next(m for m in matrix_skeletons() if m[0] == 0)
    from bttypes.config import load_config
    from conftest import SP4

    at = load_config(str(SP4)).atlas()
    with pytest.raises(ValueError):
        theta_region(Q(1, 2), sk, at)
    assert theta_union(sk, at).is_empty()


def test_critical_depths_interleave_midpoints(sp4):
    _, sk, _ = sp4
    cd = critical_depths(sk)
    assert cd == sorted(cd)
    assert cd[-1] == sk.s[-1]
    crit = cd[1::2]
    mids = cd[0::2]
    prev = Q(0)
    for m, c in zip(mids, crit):
        assert m == (prev + c) / 2
        prev = c
    assert critical_depths(matrix_skeletons()[0][2]) == []


def test_thmB_at_annulus_and_not_at_x():
    from conftest import sp4_config

    cfg = sp4_config(3)
    sk, at = cfg.skeleton(), cfg.atlas()
    hit = thmB_applies(at.point(0, (Q(4, 5), Q(0))), sk, at)
    assert hit is not None
    t, w = hit
    assert theta_region(t, sk, at).contains(w)
    assert thmB_applies(at.point(0, sk.x), sk, at) is None


def test_verdict_validation():
    with pytest.raises(ValueError):
        Verdict("Bogus")
    with pytest.raises(ValueError):
        Verdict(ATYPICAL_A)
    with pytest.raises(ValueError):
        Verdict(ATYPICAL_B, {"functional": (1,)})
    with pytest.raises(ValueError):
        Verdict(TYPE_BEARING, {"t": 1})
    assert Verdict(ATYPICAL_B, {"t": Q(1)}).kind == ATYPICAL_B


def test_classify_x_everywhere_in_matrix(sp4):
    _, _, at = sp4
    for _, _, sk in matrix_skeletons():
        v = classify(at.point(0, sk.x), sk, at)
        assert v.kind == TYPE_BEARING
        assert "up to component group" in v.annotations


def test_classify_annotations_report_delta(sp4):
    cfg, sk, at = sp4
    v = classify(at.point(0, (0, H)), sk, at, cfg.complementary())
    assert v.kind == ATYPICAL_A
    assert "outside Delta" in v.annotations
    assert "shadow not surjective" in v.annotations
    assert v.witness["functional"] == (0, 1)
