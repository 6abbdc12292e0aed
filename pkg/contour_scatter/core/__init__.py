"""Grids, model problems, discrete operators and solvers."""
