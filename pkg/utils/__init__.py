# Solver and harness utilities for Robin Spectra
