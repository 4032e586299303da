"""Stokes detection in the dark S1-S2 plane.

After the quarter-wave plate the mean polarization is circular (S3 = S0), so
S1 and S2 carry only fluctuations. Rotating the half-wave plate by ``theta``
turns the measured Stokes direction by ``4 theta`` within that plane, and
subtracting the two PBS photocurrents is a balanced homodyne measurement of
the dark mode with the bright mode as local oscillator.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .noise import QuadCovariance

__all__ = [
    "StokesState",
    "NoiseTrace",
    "DEFAULT_METADATA",
    "circular_state",
    "stokes_variance",
    "sweep_hwp",
    "calibrate_qnl",
    "raw_noise_power",
    "dark_noise_correct",
]

# recorded with traces; the Gaussian model is frequency-flat
DEFAULT_METADATA = {
    "detection_frequency_hz": 17e6,
    "rbw_hz": 300e3,
    "vbw_hz": 300.0,
}


@dataclass(frozen=True)
class StokesState:
    """Mean Stokes vector (S0, S1, S2, S3) plus the dark-plane covariance."""

    mean: tuple
    dark_cov: QuadCovariance

    def __post_init__(self):
        mean = tuple(float(s) for s in self.mean)
        if len(mean) != 4:
            raise InputError("mean Stokes vector needs four components")
        if not mean[0] > 0:
            raise InputError("S0 must be positive")
        if math.sqrt(mean[1] ** 2 + mean[2] ** 2 + mean[3] ** 2) > mean[0] * (1 + 1e-12):
            raise InputError("degree of polarization exceeds one")
        object.__setattr__(self, "mean", mean)


def circular_state(s0, dark_cov: QuadCovariance) -> StokesState:
    return StokesState((s0, 0.0, 0.0, s0), dark_cov)


def _projected(c, hwp_angle):
    # u^T C u with u = (cos 4t, sin 4t), in double-angle form so an isotropic C gives exactly c00
    mean, half_diff = 0.5 * (c[0, 0] + c[1, 1]), 0.5 * (c[0, 0] - c[1, 1])
    return mean + half_diff * np.cos(8 * hwp_angle) + c[0, 1] * np.sin(8 * hwp_angle)


def stokes_variance(state: StokesState, hwp_angle) -> float:
    """Shot-noise-normalized variance of the Stokes component selected by ``hwp_angle`` (rad)."""
    return float(_projected(state.dark_cov.c, hwp_angle))


@dataclass(frozen=True, eq=False)
class NoiseTrace:
    angles: np.ndarray
    variances: np.ndarray
    metadata: dict = field(default_factory=lambda: dict(DEFAULT_METADATA))

    def __post_init__(self):
        if np.shape(self.angles) != np.shape(self.variances):
            raise InputError("angles and variances differ in length")
        if np.any(np.asarray(self.variances) <= 0):
            raise InputError("variances must be positive")

    def minimum(self):
        k = int(np.argmin(self.variances))
        return float(self.angles[k]), float(self.variances[k])

    def maximum(self):
        k = int(np.argmax(self.variances))
        return float(self.angles[k]), float(self.variances[k])

    def to_csv(self, path=None) -> str:
        """Serialize as ``angle_rad,variance_snu`` rows; write to ``path`` if given."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["angle_rad", "variance_snu"])
        for a, v in zip(self.angles, self.variances):
            writer.writerow([repr(float(a)), repr(float(v))])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text


def sweep_hwp(state: StokesState, n_angles=360, metadata=None) -> NoiseTrace:
    """Variance at ``n_angles`` uniformly spaced HWP angles over one period [0, pi/4)."""
    if int(n_angles) != n_angles or n_angles < 8:
        raise InputError(f"n_angles must be an integer >= 8, got {n_angles}")
    angles = np.arange(int(n_angles)) * (np.pi / 4) / int(n_angles)
    variances = _projected(state.dark_cov.c, angles)
    meta = dict(DEFAULT_METADATA)
    if metadata:
        meta.update(metadata)
    return NoiseTrace(angles, variances, meta)


def calibrate_qnl(reference_power, detector_gain=1.0) -> float:
    """Raw noise power of a coherent reference beam: proportional to optical power times gain.

    The squeezed beam must be referenced to a coherent beam of equal power;
    the result is the 0 dB denominator.
    """
    if not reference_power > 0:
        raise InputError(f"reference power must be positive, got {reference_power}")
    if not detector_gain > 0:
        raise InputError(f"detector gain must be positive, got {detector_gain}")
    return float(reference_power) * float(detector_gain)


def raw_noise_power(state: StokesState, hwp_angle, power, detector_gain=1.0, dark=0.0) -> float:
    """Uncalibrated detector noise for a state carrying ``power``, plus electronic dark noise."""
    return stokes_variance(state, hwp_angle) * calibrate_qnl(power, detector_gain) + dark


def dark_noise_correct(v_raw, v_dark, v_qnl_raw) -> float:
    """Subtract electronic noise from signal and reference: ``(v_raw - v_dark) / (v_qnl_raw - v_dark)``."""
    if not v_dark >= 0:
        raise InputError("dark noise must be nonnegative")
    if not v_qnl_raw > v_dark:
        raise InputError("QNL reference does not exceed the dark noise")
    if not v_raw > v_dark:
        raise InputError("signal does not exceed the dark noise")
    return (v_raw - v_dark) / (v_qnl_raw - v_dark)
