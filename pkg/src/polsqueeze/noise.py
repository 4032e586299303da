"""Single-mode Gaussian noise model of the dark polarization mode.

Covariances are 2x2 in shot-noise units (vacuum = identity) over the
(amplitude X, phase Y) quadratures of one pulse, or of the dark mode after
the two counter-propagating pulses are recombined.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, UnphysicalInputError
from .pulse import FiberParams, PulseEnvelope

__all__ = [
    "QuadCovariance",
    "EfficiencyChain",
    "SqueezingResult",
    "to_db",
    "from_db",
    "nonlinear_phase",
    "kerr_covariance",
    "kerr_extremal_closed_form",
    "add_phase_noise",
    "combine_sagnac",
    "apply_loss",
    "extremal_variances",
    "infer_lossless",
    "efficiency_for_inference",
    "gawbs_noise",
]

_EPS = np.finfo(float).eps


def to_db(v):
    return 10.0 * np.log10(v)


def from_db(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


@dataclass(frozen=True, eq=False)
class QuadCovariance:
    """Symmetric positive-definite 2x2 covariance with det >= 1 (Heisenberg bound)."""

    c: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        if c.shape != (2, 2) or not np.all(np.isfinite(c)):
            raise InputError("covariance must be a finite 2x2 matrix")
        scale = max(1.0, float(np.max(np.abs(c))))
        if abs(c[0, 1] - c[1, 0]) > 1e-12 * scale:
            raise InputError("covariance is not symmetric")
        c[1, 0] = c[0, 1]
        if not (c[0, 0] > 0 and self._det(c) > 0):
            raise InputError("covariance is not positive definite")
        # rounding in a*d - b^2 grows with the entries
        if self._det(c) < 1 - 1e-9 - 8 * _EPS * c[0, 0] * c[1, 1]:
            raise UnphysicalInputError(f"covariance violates the uncertainty bound (det = {self._det(c):.6g})")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @staticmethod
    def _det(c):
        return c[0, 0] * c[1, 1] - c[0, 1] * c[1, 0]

    @classmethod
    def vacuum(cls):
        return cls(np.eye(2))

    @classmethod
    def diag(cls, vx, vy):
        return cls(np.diag([float(vx), float(vy)]))

    @property
    def det(self) -> float:
        return float(self._det(self.c))

    def __repr__(self):
        return f"QuadCovariance({self.c.tolist()!r})"


@dataclass(frozen=True)
class EfficiencyChain:
    eta_prop: float
    eta_det: float
    eta_vis: float

    def __post_init__(self):
        for name in ("eta_prop", "eta_det", "eta_vis"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise InputError(f"{name} must lie in (0, 1], got {value}")

    @classmethod
    def from_visibility(cls, eta_prop, eta_det, visibility):
        """Mode-matching efficiency is the squared interference visibility."""
        return cls(eta_prop, eta_det, visibility**2)

    @property
    def eta_total(self) -> float:
        return self.eta_prop * self.eta_det * self.eta_vis


@dataclass(frozen=True)
class SqueezingResult:
    v_sqz: float
    v_antisqz: float
    sqz_db: float
    antisqz_db: float
    theta_min: float
    purity: float


def nonlinear_phase(pulse: PulseEnvelope, fiber: FiberParams) -> float:
    """Peak nonlinear phase ``gamma * P0 * L_eff`` of the input pulse."""
    return fiber.gamma * pulse.peak_power * fiber.effective_length


def kerr_covariance(r) -> QuadCovariance:
    """Linearized Kerr shear X -> X, Y -> Y + 2 r X applied to vacuum."""
    if not r >= 0:
        raise InputError(f"nonlinear phase must be nonnegative, got {r}")
    return QuadCovariance(np.array([[1.0, 2 * r], [2 * r, 1 + 4 * r * r]]))


def kerr_extremal_closed_form(r):
    """(v_sqz, v_antisqz) = 1 + 2 r^2 -/+ 2 r sqrt(1 + r^2) for a pure Kerr state."""
    root = 2 * r * math.sqrt(1 + r * r)
    v_anti = 1 + 2 * r * r + root
    return 1.0 / v_anti, v_anti


def add_phase_noise(c: QuadCovariance, n_ex) -> QuadCovariance:
    if not n_ex >= 0:
        raise InputError(f"excess noise must be nonnegative, got {n_ex}")
    return QuadCovariance(c.c + np.array([[0.0, 0.0], [0.0, n_ex]]))


def _rotation(phi):
    cs, sn = math.cos(phi), math.sin(phi)
    return np.array([[cs, -sn], [sn, cs]])


def combine_sagnac(ca: QuadCovariance, cb: QuadCovariance, phi_rel=0.0) -> QuadCovariance:
    """Dark-mode covariance ``(ca + R cb R^T) / 2`` for independent fluctuations of the two beams."""
    rot = _rotation(phi_rel)
    return QuadCovariance(0.5 * (ca.c + rot @ cb.c @ rot.T))


def apply_loss(c: QuadCovariance, eta) -> QuadCovariance:
    """Beam-splitter loss: transmit ``eta``, admix vacuum ``1 - eta``."""
    if not 0.0 < eta <= 1.0:
        raise InputError(f"efficiency must lie in (0, 1], got {eta}")
    return QuadCovariance(eta * c.c + (1 - eta) * np.eye(2))


def extremal_variances(c: QuadCovariance) -> SqueezingResult:
    """Minimum/maximum quadrature variance, angle of the squeezed quadrature, and purity.

    The squeezed angle lies in [0, pi); an isotropic covariance reports 0.
    """
    a, b, d = c.c[0, 0], c.c[0, 1], c.c[1, 1]
    half_gap = math.hypot(0.5 * (a - d), b)
    v_max = 0.5 * (a + d) + half_gap
    # det / v_max avoids cancellation in the small eigenvalue
    v_min = min(c.det / v_max, v_max)
    if half_gap <= 1e-12 * v_max:
        theta = 0.0
    else:
        # two equivalent null vectors of (C - v_min I); use the better conditioned one
        u1 = (-b, a - v_min)
        u2 = (v_min - d, b)
        x, y = u1 if math.hypot(*u1) >= math.hypot(*u2) else u2
        theta = math.atan2(y, x) % math.pi
        if math.isclose(theta, math.pi, abs_tol=1e-15):
            theta = 0.0
    return SqueezingResult(
        v_sqz=v_min,
        v_antisqz=v_max,
        sqz_db=float(to_db(v_min)),
        antisqz_db=float(to_db(v_max)),
        theta_min=theta,
        purity=1.0 / math.sqrt(v_min * v_max),
    )


def infer_lossless(v_meas, eta):
    """Undo ``apply_loss`` on one quadrature variance: ``1 + (v_meas - 1) / eta``."""
    if not 0.0 < eta <= 1.0:
        raise InputError(f"efficiency must lie in (0, 1], got {eta}")
    if not v_meas > 1 - eta:
        raise UnphysicalInputError(
            f"variance {v_meas:.6g} is below the vacuum floor {1 - eta:.6g} for efficiency {eta:.6g}"
        )
    return 1 + (v_meas - 1) / eta


def efficiency_for_inference(v_meas, v_inferred):
    """Efficiency that maps a measured variance onto a given lossless variance."""
    if v_inferred == 1:
        raise InputError("inferred variance of exactly 1 fixes no efficiency")
    return (v_meas - 1) / (v_inferred - 1)


def gawbs_noise(pulse_energy, fiber: FiberParams, kappa_g) -> float:
    """Phenomenological excess phase noise ``kappa_g * E * L`` in shot-noise units."""
    if not (pulse_energy >= 0 and kappa_g >= 0):
        raise InputError("pulse energy and kappa_g must be nonnegative")
    return kappa_g * pulse_energy * fiber.length
