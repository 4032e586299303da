"""Pulse construction and scalar NLSE propagation with a symmetric split-step solver.

The envelope obeys

    dA/dz = -i (beta2/2) d2A/dt2 + (beta3/6) d3A/dt3 + i gamma |A|^2 A - (alpha/2) A

with A in sqrt(W). The dispersive and loss terms are applied exactly in the
frequency domain, the Kerr term exactly in the time domain, arranged as
half-linear / nonlinear / half-linear per step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft
from scipy.constants import c as SPEED_OF_LIGHT

from . import kernels
from .errors import GridTooSmallError, InputError, WraparoundError
from .spectral import Spectrum

__all__ = [
    "TimeGrid",
    "PulseEnvelope",
    "FiberParams",
    "SECH_FWHM_FACTOR",
    "make_sech_pulse",
    "propagate",
    "spectrum",
    "gamma_from_mode_area",
    "temporal_rms_width",
]

# FWHM of sech^2(t/T0) is 2 arccosh(sqrt 2) T0 ~ 1.7627 T0
SECH_FWHM_FACTOR = 2.0 * math.acosh(math.sqrt(2.0))

MIN_SAMPLES = 256
MIN_STEPS = 100
INPUT_EDGE_TOL = 1e-6
OUTPUT_EDGE_TOL = 1e-3


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid centred on t = 0 (sample ``n_samples // 2`` sits at zero)."""

    n_samples: int = 2**13
    window: float = 10e-12

    def __post_init__(self):
        n = self.n_samples
        if not isinstance(n, (int, np.integer)) or n < MIN_SAMPLES or n & (n - 1):
            raise InputError(f"n_samples must be a power of two >= {MIN_SAMPLES}, got {n}")
        if not self.window > 0:
            raise InputError(f"window must be positive, got {self.window}")

    @property
    def dt(self) -> float:
        return self.window / self.n_samples

    @property
    def t(self) -> np.ndarray:
        return (np.arange(self.n_samples) - self.n_samples // 2) * self.dt

    @property
    def omega(self) -> np.ndarray:
        """Angular-frequency offsets in FFT order (rad/s)."""
        return 2 * np.pi * scipy.fft.fftfreq(self.n_samples, self.dt)


@dataclass(frozen=True, eq=False)
class PulseEnvelope:
    """Complex envelope samples (sqrt(W)) of one pulse on a TimeGrid."""

    grid: TimeGrid
    samples: np.ndarray
    center_wavelength: float
    edge_tol: float = field(default=INPUT_EDGE_TOL, repr=False)

    def __post_init__(self):
        a = np.ascontiguousarray(self.samples, dtype=np.complex128)
        object.__setattr__(self, "samples", a)
        if a.shape != (self.grid.n_samples,):
            raise InputError("samples do not match the grid size")
        if not np.all(np.isfinite(a)):
            raise InputError("pulse samples are not finite")
        if not self.center_wavelength > 0:
            raise InputError("center_wavelength must be positive")
        energy = self.energy
        if not (np.isfinite(energy) and energy > 0):
            raise InputError("pulse energy must be finite and positive")
        if self.edge_magnitude() >= self.edge_tol * math.sqrt(self.peak_power):
            raise InputError(
                f"pulse does not vanish at the window edges (tolerance {self.edge_tol:g} x peak)"
            )

    @property
    def energy(self) -> float:
        return kernels.get().energy_sum(self.samples) * self.grid.dt

    @property
    def peak_power(self) -> float:
        return float(np.max(self.samples.real**2 + self.samples.imag**2))

    @property
    def carrier_omega(self) -> float:
        return 2 * np.pi * SPEED_OF_LIGHT / self.center_wavelength

    def edge_magnitude(self) -> float:
        return float(max(abs(self.samples[0]), abs(self.samples[-1])))


@dataclass(frozen=True)
class FiberParams:
    """Scalar fiber model: length (m), beta2 (s^2/m), beta3 (s^3/m), gamma (1/(W m)), alpha (1/m)."""

    length: float
    beta2: float
    gamma: float
    beta3: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        if not self.length > 0:
            raise InputError(f"fiber length must be positive, got {self.length}")
        if not self.gamma >= 0:
            raise InputError(f"gamma must be nonnegative, got {self.gamma}")
        if not self.alpha >= 0:
            raise InputError(f"alpha must be nonnegative, got {self.alpha}")
        for name in ("beta2", "beta3"):
            if not np.isfinite(getattr(self, name)):
                raise InputError(f"{name} must be finite")

    @property
    def effective_length(self) -> float:
        if self.alpha == 0:
            return self.length
        return -math.expm1(-self.alpha * self.length) / self.alpha


def make_sech_pulse(energy, fwhm, center_wavelength, grid: TimeGrid) -> PulseEnvelope:
    """Unchirped sech pulse ``sqrt(P0) sech(t/T0)`` with the requested energy and intensity FWHM.

    ``T0 = fwhm / 1.7627`` and ``P0 = energy / (2 T0)``.
    """
    if not energy > 0:
        raise InputError(f"pulse energy must be positive, got {energy}")
    if not fwhm > 0:
        raise InputError(f"fwhm must be positive, got {fwhm}")
    if grid.window < 20 * fwhm:
        raise GridTooSmallError(
            f"time window {grid.window:g} s is shorter than 20 x FWHM ({20 * fwhm:g} s)"
        )
    t0 = fwhm / SECH_FWHM_FACTOR
    p0 = energy / (2 * t0)
    samples = np.sqrt(p0) / np.cosh(grid.t / t0)
    pulse = PulseEnvelope(grid, samples.astype(np.complex128), center_wavelength)
    if abs(pulse.energy - energy) > 1e-6 * energy:
        raise GridTooSmallError(f"time step {grid.dt:g} s under-resolves a {fwhm:g} s pulse")
    return pulse


def _linear_operator(grid: TimeGrid, fiber: FiberParams) -> np.ndarray:
    w = grid.omega
    return 1j * (fiber.beta2 / 2) * w**2 - 1j * (fiber.beta3 / 6) * w**3 - fiber.alpha / 2


def propagate(pulse: PulseEnvelope, fiber: FiberParams, n_steps: int, backend=None) -> PulseEnvelope:
    """Propagate ``pulse`` through ``fiber`` in ``n_steps`` fixed symmetric split steps.

    Args:
        pulse: input envelope; must vanish at the window edges.
        fiber: fiber parameters.
        n_steps: number of uniform steps, at least 100.
        backend: kernel backend name, or None for the import-time default.

    Returns:
        The output envelope.

    Raises:
        InputError: ``n_steps`` below 100 or an input pulse that touches the edges.
        WraparoundError: the output exceeds 1e-3 of its peak amplitude at the edges.
    """
    if not isinstance(n_steps, (int, np.integer)) or n_steps < MIN_STEPS:
        raise InputError(f"n_steps must be an integer >= {MIN_STEPS}, got {n_steps}")
    if pulse.edge_magnitude() >= INPUT_EDGE_TOL * math.sqrt(pulse.peak_power):
        raise InputError("input pulse does not vanish at the window edges")
    k = kernels.get(backend)
    h = fiber.length / n_steps
    lin = _linear_operator(pulse.grid, fiber)
    half = np.exp(lin * (h / 2))
    full = np.exp(lin * h)
    gamma_h = fiber.gamma * h

    # consecutive half steps are merged: D/2 N D N ... D N D/2
    spec = scipy.fft.fft(pulse.samples)
    k.multiply_inplace(spec, half)
    a = scipy.fft.ifft(spec, overwrite_x=True)
    for step in range(n_steps):
        if gamma_h != 0.0:
            k.kerr_phase_step(a, gamma_h)
        spec = scipy.fft.fft(a, overwrite_x=True)
        k.multiply_inplace(spec, full if step < n_steps - 1 else half)
        a = scipy.fft.ifft(spec, overwrite_x=True)

    if not np.all(np.isfinite(a)):
        raise WraparoundError("propagation produced non-finite samples")
    peak = math.sqrt(float(np.max(a.real**2 + a.imag**2)))
    edge = max(abs(a[0]), abs(a[-1]))
    if edge > OUTPUT_EDGE_TOL * peak:
        raise WraparoundError(
            f"output reaches the window edge ({edge / peak:.2e} of peak); widen the time window"
        )
    return PulseEnvelope(pulse.grid, a, pulse.center_wavelength, edge_tol=OUTPUT_EDGE_TOL)


def spectrum(pulse: PulseEnvelope) -> Spectrum:
    """Spectral density ``|A~(omega)|^2`` on the absolute angular-frequency axis.

    ``A~ = dt * DFT(A)`` so that ``sum |A~|^2 d omega / (2 pi)`` equals the pulse energy.
    """
    grid = pulse.grid
    amp = scipy.fft.fftshift(scipy.fft.fft(pulse.samples)) * grid.dt
    omega = pulse.carrier_omega + scipy.fft.fftshift(grid.omega)
    return Spectrum(omega, amp.real**2 + amp.imag**2)


def gamma_from_mode_area(mfd, wavelength, n2) -> float:
    """Nonlinear coefficient ``2 pi n2 / (wavelength A_eff)`` with ``A_eff = pi (mfd/2)^2``."""
    for name, value in (("mfd", mfd), ("wavelength", wavelength), ("n2", n2)):
        if not value > 0:
            raise InputError(f"{name} must be positive, got {value}")
    area = math.pi * (mfd / 2) ** 2
    return 2 * math.pi * n2 / (wavelength * area)


def temporal_rms_width(pulse: PulseEnvelope) -> float:
    p = np.abs(pulse.samples) ** 2
    t = pulse.grid.t
    mean = np.sum(t * p) / np.sum(p)
    return float(np.sqrt(np.sum((t - mean) ** 2 * p) / np.sum(p)))
