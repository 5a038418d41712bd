"""Random cyclic dynamical systems on the circle and the Vietoris-Rips cores they determine."""
from .circle import DynSystem, Fixed, Rational, SampleSet, build_map, parse_scale, regular_ticks, sample_uniform
from .dynamics import orbit_report, periodic_and_levels, preimage_interval, swiftness_types
from .errors import CyclicDynError

__all__ = [
    "CyclicDynError",
    "DynSystem",
    "Fixed",
    "Rational",
    "SampleSet",
    "build_map",
    "orbit_report",
    "parse_scale",
    "periodic_and_levels",
    "preimage_interval",
    "regular_ticks",
    "sample_uniform",
    "swiftness_types",
]
