from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bttypes.config import (
    ConfigError,
    ConfigFile,
    lattice_points,
    load_config,
    parse_config,
    serialize,
)

from conftest import SL2, SP4, SP4_FLAT

MINIMAL = """\
[system]
label = C2
[datum]
depths = 1
x = (0, 0)
"""


def sp4_text():
    return SP4.read_text()


@pytest.mark.parametrize("path", [SP4, SP4_FLAT, SL2])
def test_examples_roundtrip(path):
    cfg = load_config(str(path))
    assert parse_config(serialize(cfg)) == cfg


def test_sp4_fixture_skeleton():
    cfg = load_config(str(SP4))
    sk = cfg.skeleton()
    assert sk.rs.label == "C2"
    assert sk.d == 1
    assert cfg.depths == (Q(3), Q(3))
    assert sk.x == (0, 0)
    assert {r for r in cfg.levels[0]} == {(0, 2), (0, -2)}
    at = cfg.atlas()
    assert at.charts == (0, 1)
    assert [c.name for c in cfg.complementary()] == ["long", "short"]
    assert cfg.layers == ("walls", "projection", "delta", "trace0", "complementary")


def test_minimal_d0_config():
    cfg = parse_config(MINIMAL)
    assert cfg.skeleton().d == 0
    assert cfg.query_points(cfg.atlas()) == []
    assert cfg.p == 5


def test_query_points_sorted_and_unique():
    cfg = load_config(str(SP4))
    pts = cfg.query_points(cfg.atlas())
    keys = [(z.chart, z.coords) for z in pts]
    assert keys == sorted(set(keys))


def test_lattice_points_cover_box():
    pts = lattice_points(((Q(-1), Q(1)), (Q(0), Q(1))), Q(1, 2))
    assert len(pts) == 5 * 3
    assert (Q(-1), Q(0)) in pts and (Q(1), Q(1)) in pts


def test_colour_values_survive_comment_stripping():
    text = sp4_text() + "color.trace0 = #123456   # dark\n"
    cfg = parse_config(text)
    assert ("trace0", "#123456") in cfg.colors


@pytest.mark.parametrize("mutation,field", [
    (lambda t: t + "[bogus]\n", None),
    (lambda t: t.replace("p = 5", "p = 5\nfoo = 1"), "system.foo"),
    (lambda t: t.replace("p = 5", "p = 5\np = 7"), "system.p"),
    (lambda t: t.replace("depths = 3 3", "depths = 3 x/2"), "datum.depths"),
])
def test_errors_name_line_and_field(mutation, field):
    text = mutation(sp4_text())
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    err = info.value
    assert err.line is not None
    assert f"line {err.line}" in str(err)
    if field is not None:
        assert err.field == field
    bad_line = text.splitlines()[err.line - 1]
    assert bad_line.strip()


def test_depth_order_violation_is_named():
    text = sp4_text().replace("depths = 3 3", "depths = 3 1")
    with pytest.raises(ConfigError, match=r"r_0 <= r_1"):
        parse_config(text)


@pytest.mark.parametrize("old,new,field", [
    ("p = 5", "p = 6", "system.p"),
    ("x = (0, 0)", "x = (0, 0, 0)", "datum.x"),
    ("level = (0, 2) (0, -2)", "level = (0, 3) (0, -3)", "datum.level"),
])
def test_semantic_errors(old, new, field):
    text = sp4_text()
    assert old in text
    with pytest.raises(ConfigError) as info:
        parse_config(text.replace(old, new))
    assert info.value.field == field


def test_unknown_layer_rejected():
    with pytest.raises(ConfigError, match="unknown layer"):
        parse_config(sp4_text().replace("layers = ", "layers = sparkles, "))


def test_missing_file():
    with pytest.raises(ConfigError, match="cannot read"):
        load_config("/nonexistent/none.cfg")


rationals = st.fractions(min_value=-4, max_value=4, max_denominator=8)


@settings(max_examples=15, deadline=None)
@given(
    # x must be a vertex for the level-0 roots +-2e2
    x=st.tuples(rationals, st.integers(-6, 6).map(lambda k: Q(k, 2))),
    r0=st.fractions(min_value=0, max_value=5, max_denominator=4),
    gap=st.fractions(min_value=0, max_value=3, max_denominator=4),
    half=st.fractions(min_value=Q(1, 4), max_value=3, max_denominator=4),
)
def test_roundtrip_property(x, r0, gap, half):
    cfg = ConfigFile(
        label="C2",
        levels=(((Q(0), Q(2)), (Q(0), Q(-2))),),
        depths=(r0, r0 + gap),
        x=x,
        box=((x[0] - half, x[0] + half), (x[1] - half, x[1] + half)),
        points=((0, x),),
    )
    assert parse_config(serialize(cfg)) == cfg
