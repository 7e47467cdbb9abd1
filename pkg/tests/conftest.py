import dataclasses
from fractions import Fraction as Q
from pathlib import Path

import pytest

from bttypes.config import load_config
from bttypes.datum import build_skeleton
from bttypes.roots import build_root_system

ROOT = Path(__file__).resolve().parent.parent
SP4 = ROOT / "configs" / "sp4_folded.cfg"
SP4_FLAT = ROOT / "configs" / "sp4_apartment.cfg"
SL2 = ROOT / "configs" / "sl2_tree.cfg"

LONG = [(0, 2), (0, -2)]
LONG_PAIR = [(2, 0), (-2, 0), (0, 2), (0, -2)]

# (levels below the top, depth sequences) for d = 0, 1, 2 in C2 at the origin
MATRIX = {
    0: ([], [(0,), (1,), (Q(5, 2),)]),
    1: ([LONG], [(1, 1), (3, 3), (2, 5)]),
    2: ([LONG, LONG_PAIR], [(1, 2, 2), (1, 3, 4), (Q(1, 2), 1, Q(3, 2))]),
}


def matrix_skeletons():
    rs = build_root_system("C2")
    out = []
    for d, (levels, seqs) in MATRIX.items():
        for r in seqs:
            out.append((d, r, build_skeleton(rs, levels, r, (0, 0))))
    return out


def sp4_config(r0=None, path=SP4):
    cfg = load_config(str(path))
    if r0 is not None:
        cfg = dataclasses.replace(cfg, depths=(Q(r0), Q(r0)))
    return cfg


@pytest.fixture(scope="session")
def sp4():
    cfg = sp4_config()
    return cfg, cfg.skeleton(), cfg.atlas()


@pytest.fixture(scope="session")
def sp4_flat():
    cfg = sp4_config(path=SP4_FLAT)
    return cfg, cfg.skeleton(), cfg.atlas()
