"""Spectra, the spectral-overlap bound and spectrometer file I/O.

Spectra live on a uniform angular-frequency grid. Spectrometers report
intensity per wavelength, so files are converted with the Jacobian
``|E(omega)|^2 = I(lambda) * lambda^2 / (2 pi c)`` before use.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from .errors import GridMismatchError, InputError, SpectrumParseError

__all__ = [
    "Spectrum",
    "OverlapReport",
    "spectral_overlap",
    "predicted_visibility",
    "rms_width",
    "load_spectrometer_file",
    "write_spectrometer_file",
    "resample",
]

logger = logging.getLogger(__name__)

UNIFORM_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Nonnegative spectral density on a uniform, increasing angular-frequency grid.

    Attributes:
        omega: angular frequencies in rad/s.
        density: ``|E(omega)|^2`` in arbitrary linear units.
        n_clamped: number of negative input samples that were clamped to
            zero while loading from a file.
    """

    omega: np.ndarray
    density: np.ndarray
    n_clamped: int = field(default=0, compare=False)

    def __post_init__(self):
        omega = np.ascontiguousarray(self.omega, dtype=float)
        density = np.ascontiguousarray(self.density, dtype=float)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "density", density)
        if omega.ndim != 1 or omega.shape != density.shape or omega.size == 0:
            raise InputError("omega and density must be 1-D arrays of equal, nonzero length")
        if not (np.all(np.isfinite(omega)) and np.all(np.isfinite(density))):
            raise InputError("spectrum contains non-finite values")
        if np.any(density < 0):
            raise InputError("spectral density must be nonnegative")
        if not np.any(density > 0):
            raise InputError("spectral density is zero everywhere")
        if omega.size > 1:
            steps = np.diff(omega)
            if np.any(steps <= 0):
                raise InputError("omega grid must be strictly increasing")
            mean_step = (omega[-1] - omega[0]) / (omega.size - 1)
            # allow a few ulps of the absolute frequency on top of the relative bound
            slack = UNIFORM_RTOL * mean_step + 8 * np.finfo(float).eps * np.max(np.abs(omega))
            if np.max(np.abs(steps - mean_step)) > slack:
                raise InputError("omega grid is not uniform")

    def __len__(self):
        return self.omega.size

    @property
    def step(self) -> float:
        if self.omega.size == 1:
            return 0.0
        return (self.omega[-1] - self.omega[0]) / (self.omega.size - 1)

    def integral(self) -> float:
        return _integrate(self.density, self.omega)

    def same_grid(self, other: "Spectrum") -> bool:
        return self.omega.size == other.omega.size and np.allclose(
            self.omega, other.omega, rtol=UNIFORM_RTOL, atol=0.0
        )

    def wavelength(self) -> np.ndarray:
        """Vacuum wavelengths in metres (requires omega > 0)."""
        return 2 * np.pi * SPEED_OF_LIGHT / self.omega


@dataclass(frozen=True)
class OverlapReport:
    v_max: float
    energy_p: float
    energy_s: float


def _integrate(y, x):
    if x.size == 1:
        return float(y[0])
    return float(np.trapezoid(y, x))


def spectral_overlap(sp: Spectrum, ss: Spectrum) -> OverlapReport:
    """Upper bound on the interference visibility of two fields from their spectra.

    ``v_max = int |E_p||E_s| / (0.5 * (int |E_p|^2 + int |E_s|^2))`` with the
    amplitude taken as the square root of the density, i.e. spectral phase
    is ignored. Both spectra must share one grid.
    """
    if not sp.same_grid(ss):
        raise GridMismatchError("spectra are on different frequency grids; resample first")
    dp, ds = sp.density, ss.density
    energy_p = _integrate(dp, sp.omega)
    energy_s = _integrate(ds, sp.omega)
    if energy_p <= 0 or energy_s <= 0:
        raise InputError("spectrum integrates to zero")
    # common rescale keeps dp*ds clear of under/overflow; the ratio is homogeneous
    scale = max(dp.max(), ds.max())
    a, b = dp / scale, ds / scale
    numerator = _integrate(np.sqrt(a * b), sp.omega)
    denominator = 0.5 * (_integrate(a, sp.omega) + _integrate(b, sp.omega))
    v_max = min(max(numerator / denominator, 0.0), 1.0)
    return OverlapReport(v_max=v_max, energy_p=energy_p, energy_s=energy_s)


def predicted_visibility(v_max: float, kappa_spatial: float) -> float:
    """Visibility expected from a spectral-overlap bound and a power-independent spatial factor."""
    if not 0.0 <= v_max <= 1.0:
        raise InputError(f"v_max must lie in [0, 1], got {v_max}")
    if not 0.0 < kappa_spatial <= 1.0:
        raise InputError(f"kappa_spatial must lie in (0, 1], got {kappa_spatial}")
    return min(max(kappa_spatial * v_max, 0.0), 1.0)


def rms_width(s: Spectrum) -> float:
    """Density-weighted standard deviation of omega (rad/s)."""
    if s.omega.size == 1:
        return 0.0
    norm = _integrate(s.density, s.omega)
    if norm <= 0:
        raise InputError("spectrum integrates to zero")
    # moments about the peak to limit cancellation on a large carrier offset
    x = s.omega - s.omega[np.argmax(s.density)]
    mean = _integrate(x * s.density, s.omega) / norm
    var = _integrate((x - mean) ** 2 * s.density, s.omega) / norm
    return float(np.sqrt(max(var, 0.0)))


def resample(s: Spectrum, omega: np.ndarray) -> Spectrum:
    """Linearly interpolate ``s`` onto ``omega``; zero outside its support."""
    density = np.interp(omega, s.omega, s.density, left=0.0, right=0.0)
    return Spectrum(omega, density)


def _parse_rows(path):
    rows = []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise SpectrumParseError(f"cannot read file ({exc.strerror})", path=path) from exc
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise SpectrumParseError(
                    f"expected 'wavelength_nm intensity', got {line!r}", path=path, line=lineno
                )
            try:
                wl, inten = float(parts[0]), float(parts[1])
            except ValueError:
                raise SpectrumParseError(f"non-numeric value in {line!r}", path=path, line=lineno)
            if not (np.isfinite(wl) and np.isfinite(inten)):
                raise SpectrumParseError("non-finite value", path=path, line=lineno)
            if wl <= 0:
                raise SpectrumParseError("wavelength must be positive", path=path, line=lineno)
            rows.append((lineno, wl, inten))
    return rows


def load_spectrometer_file(path) -> Spectrum:
    """Read a two-column ``wavelength_nm intensity`` file into a Spectrum.

    Lines starting with ``#`` are comments. Wavelengths must be strictly
    monotone (either direction). Negative intensities are clamped to zero and
    counted in ``Spectrum.n_clamped``. The result is resampled linearly onto a
    uniform omega grid with as many points as there are data rows.
    """
    rows = _parse_rows(path)
    if len(rows) < 2:
        raise SpectrumParseError("need at least two data rows", path=path)
    wl_nm = np.array([r[1] for r in rows])
    intensity = np.array([r[2] for r in rows])
    steps = np.diff(wl_nm)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        bad = int(np.argmax(steps <= 0) if steps[0] > 0 else np.argmax(steps >= 0)) + 1
        raise SpectrumParseError("wavelengths are not strictly monotone", path=path, line=rows[bad][0])

    negative = intensity < 0
    n_clamped = int(np.count_nonzero(negative))
    if n_clamped:
        logger.warning("%s: clamped %d negative intensities to zero", path, n_clamped)
        intensity = np.where(negative, 0.0, intensity)
    if not np.any(intensity > 0):
        raise SpectrumParseError("no positive intensity values", path=path)

    wl = wl_nm * 1e-9
    omega = 2 * np.pi * SPEED_OF_LIGHT / wl
    density = intensity * wl**2 / (2 * np.pi * SPEED_OF_LIGHT)
    order = np.argsort(omega)
    omega, density = omega[order], density[order]
    grid = np.linspace(omega[0], omega[-1], omega.size)
    resampled = np.interp(grid, omega, density)
    return Spectrum(grid, resampled, n_clamped=n_clamped)


def write_spectrometer_file(s: Spectrum, path, header=None) -> None:
    """Write ``s`` in the spectrometer format (ascending wavelength, Jacobian undone)."""
    if np.any(s.omega <= 0):
        raise InputError("only spectra on a positive absolute frequency axis can be written")
    wl = s.wavelength()
    intensity = s.density * 2 * np.pi * SPEED_OF_LIGHT / wl**2
    order = np.argsort(wl)
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            for line in str(header).splitlines():
                fh.write(f"# {line}\n")
        fh.write("# wavelength_nm intensity\n")
        for w, i in zip(wl[order] * 1e9, intensity[order]):
            fh.write(f"{w:.17g} {i:.17g}\n")
