"""Scikit-learn style wrapper around the point classifier."""
from __future__ import annotations

from typing import List

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .atlas import AtlasPoint
from .config import ConfigFile, validate
from .criteria import (
    KINDS,
    Verdict,
    classify,
    context,
    in_delta,
    projection_criterion,
    shadow_at,
    thmA_applies,
)
from .validation import as_rational, as_vector, check_depths, check_query_array

FEATURES = (
    "fixed_by_J",
    "shadow_size",
    "shadow_surjective",
    "parabolic_witness",
    "projection_criterion",
    "in_delta",
    "distance2_to_x",
)


class BuildingClassifier(BaseEstimator):
    """Classify chart points of a building patch by typicality status.

    Rows of ``X`` are ``(chart, c_1, ..., c_n)``.  ``fit`` ignores its data
    beyond checking the width; everything is determined by the parameters.
    ``transform`` returns numeric features, with -1 marking an unknown
    value (projection outside the certified region).
    """

    def __init__(
        self,
        label: str = "C2",
        levels=(),
        depths=(0,),
        x=None,
        folds=(),
        box=None,
        p: int = 5,
        center_model: str = "anisotropic",
        center_step=1,
        chains=(),
        extend_folds: int = 0,
    ):
        self.label = label
        self.levels = levels
        self.depths = depths
        self.x = x
        self.folds = folds
        self.box = box
        self.p = p
        self.center_model = center_model
        self.center_step = center_step
        self.chains = chains
        self.extend_folds = extend_folds

    @classmethod
    def from_config(cls, cfg: ConfigFile, extend_folds: int = 0) -> "BuildingClassifier":
        return cls(
            label=cfg.label,
            levels=cfg.levels,
            depths=cfg.depths,
            x=cfg.x,
            folds=cfg.folds,
            box=cfg.box or None,
            p=cfg.p,
            center_model=cfg.center_model,
            center_step=cfg.center_step,
            chains=cfg.chains,
            extend_folds=extend_folds,
        )

    def _config(self) -> ConfigFile:
        from .roots import build_root_system

        dim = build_root_system(self.label).dim
        cfg = ConfigFile(
            label=self.label,
            p=int(self.p),
            levels=tuple(tuple(as_vector(r, dim, "level root") for r in lv) for lv in self.levels),
            depths=check_depths(self.depths),
            x=None if self.x is None else as_vector(self.x, dim, "x"),
            center_model=self.center_model,
            center_step=as_rational(self.center_step, "center_step"),
            box=() if self.box is None else tuple(
                (as_rational(a, "box"), as_rational(b, "box")) for a, b in self.box
            ),
            folds=tuple((as_vector(r, dim, "fold root"), as_rational(m, "fold depth"))
                        for r, m in self.folds),
            chains=tuple((str(n), tuple(as_vector(r, dim, "chain root") for r in rts))
                         for n, rts in self.chains),
        )
        validate(cfg)
        return cfg

    def fit(self, X=None, y=None):
        self.config_ = self._config()
        self.skeleton_ = self.config_.skeleton()
        self.atlas_ = self.config_.atlas(self.extend_folds)
        self.chains_ = self.config_.complementary()
        self.classes_ = np.array(KINDS, dtype=object)
        self.n_features_in_ = self.atlas_.dim + 1
        if X is not None:
            self._points(X)
        return self

    def _points(self, X) -> List[AtlasPoint]:
        rows = check_query_array(X, self.atlas_.dim)
        return [self.atlas_.point(c, v) for c, v in rows]

    def verdicts(self, X) -> List[Verdict]:
        check_is_fitted(self, "atlas_")
        return [classify(z, self.skeleton_, self.atlas_, self.chains_) for z in self._points(X)]

    def predict(self, X) -> np.ndarray:
        return np.array([v.kind for v in self.verdicts(X)], dtype=object)

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "atlas_")
        sk, at, chains = self.skeleton_, self.atlas_, self.chains_
        ctx = context(sk, at, chains)
        rows = []
        for z in self._points(X):
            sh = shadow_at(z, sk, at)
            crit = projection_criterion(z, sk, at)
            delta = in_delta(z, ctx)
            d2, _ = at.distance2(z, ctx.x_point)
            rows.append([
                float(ctx.fix_j.contains(z)),
                float(len(sh.present)),
                float(sh.surjective),
                float(thmA_applies(z, sk, at, chains) is not None),
                -1.0 if crit is None else float(crit),
                -1.0 if delta is None else float(delta),
                float(d2),
            ])
        return np.array(rows, dtype=float).reshape(-1, len(FEATURES))

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)

    def score(self, X, y) -> float:
        """Fraction of rows whose predicted kind equals ``y``."""
        pred = self.predict(X)
        y = np.asarray(y, dtype=object)
        return float(np.mean(pred == y)) if len(y) else 1.0

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        return np.array(FEATURES, dtype=object)
