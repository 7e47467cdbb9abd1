"""Exact geometry of Bruhat-Tits building patches and typicality criteria."""
from .apartment import Depth, FiltrationProfile, mp_profile
from .atlas import Atlas, AtlasPoint, Fold, Region, fixed_region_profile, project_to_trace
from .config import ConfigError, ConfigFile, load_config, parse_config, serialize
from .criteria import (
    ATYPICAL_A,
    ATYPICAL_B,
    KINDS,
    TYPE_BEARING,
    UNDECIDED,
    ComplementaryChain,
    Verdict,
    classify,
    critical_depths,
    gamma_refinement,
    projection_criterion,
    shadow_at,
    theta_region,
    theta_union,
    thmA_applies,
    thmB_applies,
)
from .datum import DatumSkeleton, build_skeleton, h_plus_profile, j_profile
from .estimator import BuildingClassifier
from .roots import RootSystem, build_root_system

__version__ = "0.1.0"

__all__ = [
    "ATYPICAL_A", "ATYPICAL_B", "KINDS", "TYPE_BEARING", "UNDECIDED",
    "Atlas", "AtlasPoint", "BuildingClassifier", "ComplementaryChain", "ConfigError",
    "ConfigFile", "DatumSkeleton", "Depth", "FiltrationProfile", "Fold", "Region",
    "RootSystem", "Verdict", "build_root_system", "build_skeleton", "classify",
    "critical_depths", "fixed_region_profile", "gamma_refinement", "h_plus_profile", "j_profile", "load_config", "mp_profile",
    "parse_config", "project_to_trace", "projection_criterion", "serialize", "shadow_at",
    "theta_region", "theta_union", "thmA_applies", "thmB_applies",
]
