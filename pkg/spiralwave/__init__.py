"""Vortex and spiral-wave equilibria of the complex Ginzburg-Landau equation on surfaces of revolution."""

__version__ = "0.1.0"
