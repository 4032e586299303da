"""Pure numpy implementations of the split-step inner kernels.

Both functions work in place on a contiguous complex128 array, matching the
signatures of the compiled ``_kernels`` extension.
"""
import numpy as np


def kerr_phase_step(a, gamma_h):
    """Multiply ``a`` by exp(i * gamma_h * |a|^2) in place."""
    phase = a.real * a.real
    phase += a.imag * a.imag
    phase *= gamma_h
    a *= np.cos(phase) + 1j * np.sin(phase)


def multiply_inplace(a, h):
    """Pointwise ``a *= h`` in place."""
    a *= h


def energy_sum(a):
    """Return sum(|a|^2)."""
    return float(np.vdot(a, a).real)
