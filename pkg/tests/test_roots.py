from fractions import Fraction as Q

import pytest
import sympy as sp

from bttypes.roots import (
    LABEL_ALIASES,
    build_root_system,
    chevalley_commutator,
    exists_proper_parabolic_containing,
    is_closed,
    parabolic_subset,
    weyl_invariance_defect,
)

LABELS = ["A1", "A1xA1", "A2", "C2", "G2"]
COUNTS = {"A1": 2, "A1xA1": 4, "A2": 6, "C2": 8, "G2": 12}


@pytest.mark.parametrize("label", LABELS)
def test_root_counts_and_weyl_invariance(label):
    rs = build_root_system(label)
    assert len(rs.roots) == COUNTS[label]
    assert weyl_invariance_defect(rs) == []


@pytest.mark.parametrize("label", LABELS)
def test_coroot_pairs_to_two(label):
    rs = build_root_system(label)
    for a in rs.roots:
        assert rs.inner(a, rs.coroot(a)) == 2
        assert rs.reflect(a, a) == tuple(-c for c in a)


def test_short_roots_have_norm_two():
    for label in LABELS:
        rs = build_root_system(label)
        assert min(rs.norm2(a) for a in rs.roots) == 2


def test_aliases_and_unknown_label():
    assert build_root_system("B2").label == "C2"
    assert set(LABEL_ALIASES.values()) == set(LABELS)
    with pytest.raises(ValueError):
        build_root_system("E8")


def test_central_directions_are_orthogonal():
    rs = build_root_system("A1", central=1)
    assert rs.dim == 2 and rs.rank == 1
    assert all(rs.pair(a, (0, 5)) == 0 for a in rs.roots)


def test_subsystem_closure():
    rs = build_root_system("C2")
    long_pair = rs.subsystem([(2, 0), (-2, 0), (0, 2), (0, -2)])
    assert len(long_pair) == 4
    with pytest.raises(ValueError):
        rs.subsystem([(1, 1), (-1, -1), (1, -1), (-1, 1)])  # sums 2e1 missing
    with pytest.raises(ValueError):
        rs.subsystem([(2, 0)])
    assert is_closed(rs, range(len(rs.roots)))
    assert rs.empty() < long_pair < rs.full()


def test_parabolic_witness_in_a1():
    rs = build_root_system("A1")
    full = rs.full()
    lam = exists_proper_parabolic_containing(full, [(1,)])
    assert lam == rs.coroot((1,))
    assert exists_proper_parabolic_containing(full, [(1,), (-1,)]) is None
    assert exists_proper_parabolic_containing(full, []) is not None


def test_parabolic_witness_contains_subset():
    rs = build_root_system("G2")
    full = rs.full()
    subset = [(1, 0), (0, 1), (-1, 0)]
    lam = exists_proper_parabolic_containing(full, subset)
    assert lam is not None
    par = parabolic_subset(full, lam)
    assert {rs.index(a) for a in subset} <= par < full.members


def test_commutator_rejects_proportional_roots():
    rs = build_root_system("C2")
    with pytest.raises(ValueError):
        chevalley_commutator(rs, (1, 1), (-1, -1), 0, 0)


def test_g2_constants():
    rs = build_root_system("G2")
    mags = sorted({t.magnitude for terms in rs.chevalley.values() for t in terms})
    assert mags == [1, 2, 3]


def test_non_unit_constant_flagged_at_p2():
    rs = build_root_system("C2")
    terms = chevalley_commutator(rs, (1, -1), (1, 1), Q(0), Q(0), p=2)
    assert [(t.root, t.exact) for t in terms] == [((2, 0), False)]
    terms = chevalley_commutator(rs, (1, -1), (1, 1), Q(1, 2), Q(1), p=5)
    assert terms[0].valuation == Q(3, 2) and terms[0].exact


# Sp4 as 4x4 matrices preserving [[0, I], [-I, 0]], roots in e-coordinates


def _sp4_root_vector(root):
    m = sp.zeros(4, 4)
    a, b = root
    if (a, b) in ((1, -1), (-1, 1)):
        i, j = (0, 1) if a == 1 else (1, 0)
        m[i, j], m[j + 2, i + 2] = 1, -1
    elif (a, b) == (1, 1):
        m[0, 3], m[1, 2] = 1, 1
    elif (a, b) == (-1, -1):
        m[3, 0], m[2, 1] = 1, 1
    elif b == 0:
        m[(0, 2) if a > 0 else (2, 0)] = 1
    else:
        m[(1, 3) if b > 0 else (3, 1)] = 1
    return m


def _exp(m):
    out, term = sp.eye(4), sp.eye(4)
    for k in range(1, 5):
        term = term * m / k
        out += term
    return out


def _log(g):
    n = g - sp.eye(4)
    out, power = sp.zeros(4, 4), sp.eye(4)
    for k in range(1, 5):
        power = power * n
        out += (-1) ** (k + 1) * power / k
    return sp.expand(out)


def test_sp4_matrices_confirm_c2_commutator_table():
    rs = build_root_system("C2")
    a_, b_ = sp.symbols("a b")
    jform = sp.Matrix([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
    for r in rs.roots:
        x = _sp4_root_vector(r)
        assert x.T * jform + jform * x == sp.zeros(4, 4)
    checked = 0
    for (ia, ib), terms in rs.chevalley.items():
        alpha, beta = rs.roots[ia], rs.roots[ib]
        xa, xb = _sp4_root_vector(alpha), _sp4_root_vector(beta)
        g = _exp(a_ * xa) * _exp(b_ * xb) * _exp(-a_ * xa) * _exp(-b_ * xb)
        lg = _log(sp.expand(g))
        remainder = lg
        for t in terms:
            root = tuple(t.i * p + t.j * q for p, q in zip(alpha, beta))
            xr = _sp4_root_vector(root)
            k, l = next((k, l) for k in range(4) for l in range(4) if xr[k, l] != 0)
            coeff = sp.expand(lg[k, l] / xr[k, l])
            assert abs(sp.Poly(coeff, a_, b_).coeff_monomial(a_ ** t.i * b_ ** t.j)) == t.magnitude
            remainder = sp.expand(remainder - coeff * xr)
        assert remainder == sp.zeros(4, 4)
        checked += 1
    # every ordered non-proportional pair with a root among i*alpha + j*beta
    expected = sum(
        1
        for a in rs.roots
        for b in rs.roots
        if a != b and a != tuple(-c for c in b)
        and any(rs.is_root(tuple(i * p + j * q for p, q in zip(a, b))) for i in (1, 2) for j in (1, 2))
    )
    assert checked == expected == 24
