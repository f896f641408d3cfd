from .classify import PatternClass, classify, spiral_criterion
from .locus import FrozenLocus, LocusSample, frozen_locus
from .polar import PolarProfile, interval_flux, phase_derivative_integral, polar_decompose
from .render import SpiralCurves, render_pattern

__all__ = [
    "FrozenLocus",
    "LocusSample",
    "PatternClass",
    "PolarProfile",
    "SpiralCurves",
    "classify",
    "frozen_locus",
    "interval_flux",
    "phase_derivative_integral",
    "polar_decompose",
    "render_pattern",
    "spiral_criterion",
]
