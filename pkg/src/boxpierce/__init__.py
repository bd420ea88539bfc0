"""Approximate and exact piercing sets for axis-parallel boxes."""

from .classic import dnc_pierce, greedy_interval_pierce
from .dynamic import DynamicPiercer, complement_partition
from .epsnet import weak_net_for_boxes
from .geom import (
    Box,
    CapExceeded,
    PiercingSolution,
    ProblemInstance,
    UsageError,
    exact_piercing,
    normalize_instance,
    verify_piercing,
)
from .multiround import multi_round_pierce, two_round_2d
from .mwu import basic_mwu, improved_mwu

__all__ = [
    "Box",
    "CapExceeded",
    "DynamicPiercer",
    "PiercingSolution",
    "ProblemInstance",
    "UsageError",
    "basic_mwu",
    "complement_partition",
    "dnc_pierce",
    "exact_piercing",
    "greedy_interval_pierce",
    "improved_mwu",
    "multi_round_pierce",
    "normalize_instance",
    "two_round_2d",
    "verify_piercing",
    "weak_net_for_boxes",
]
