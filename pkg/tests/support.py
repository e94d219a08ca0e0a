"""Shared parameters and helpers for the test suite."""

import numpy as np

from dickespec.operators import ModelParams

# Disorder draw used throughout the strong-drive studies (units of gamma).
STRONG_DRIVE_DETUNINGS = (-0.62448819, 5.93539815, -1.53186917, 3.04670911)
STRONG_DRIVE = 200.0


def random_params(seed: int, atom_count: int, *, drive_scale: float = 2.0) -> ModelParams:
    rng = np.random.default_rng(seed)
    return ModelParams(
        atom_count=atom_count,
        drive=float(rng.uniform(0.0, drive_scale)),
        detunings=tuple(rng.normal(0.0, 1.0, atom_count)),
    )
