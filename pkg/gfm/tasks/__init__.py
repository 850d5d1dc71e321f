"""Parallel execution units for runs, checks and sweeps."""
