"""Frequency-dependent attenuation models, their kernels and causality tests."""

__version__ = "0.1.0"
