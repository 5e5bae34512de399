"""Initialization lab bindings: SVD utilities, initialization schemes, and
the deterministic training/experiment harness."""

from ._sinl import (
    accuracy,
    forward,
    gaussian,
    initialize,
    mse,
    orthogonal_factor,
    pinv,
    run_experiment,
    standardize,
    svd,
    synth_blobs,
    timing_probe,
    train,
)

__all__ = [
    "accuracy",
    "forward",
    "gaussian",
    "initialize",
    "mse",
    "orthogonal_factor",
    "pinv",
    "run_experiment",
    "standardize",
    "svd",
    "synth_blobs",
    "timing_probe",
    "train",
]
