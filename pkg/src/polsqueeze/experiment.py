"""Energy sweeps of the full Sagnac squeezing experiment, plus configuration files.

A sweep row is computed in two stages. The classical stage builds the two
counter-propagating pulses (energies ``E(1 +/- epsilon/2)``), propagates
them and measures their spectral overlap. The noise stage turns the input
peak powers into Kerr covariances, adds excess phase noise, recombines,
applies the loss chain and extracts the extremal variances. Only the noise
stage depends on ``kappa_g``, which lets calibration reuse the propagation.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from . import noise
from .errors import ConfigError, InputError, NumericalError
from .pulse import FiberParams, TimeGrid, gamma_from_mode_area, make_sech_pulse, propagate, spectrum
from .spectral import predicted_visibility, spectral_overlap

logger = logging.getLogger(__name__)

CSV_HEADER = ("energy_pJ", "v_max", "visibility", "eta_vis", "r_a", "r_b", "sqz_db", "antisqz_db", "purity")

PJ = 1e-12

DEFAULT_MFD = 1.8 / 1e6  # same rounding as the config parser (mfd_um / 1e6)
DEFAULT_N2 = 2.6e-20
DEFAULT_WAVELENGTH = 810e-9
# calibrated so the default 3-30 pJ sweep peaks at -3.9 dB (see calibrate_kappa_g)
DEFAULT_KAPPA_G = 5.93e12


def default_fiber() -> FiberParams:
    return FiberParams(
        length=1.0,
        beta2=-1.0e-26,
        beta3=1.0e-40,
        gamma=gamma_from_mode_area(DEFAULT_MFD, DEFAULT_WAVELENGTH, DEFAULT_N2),
        alpha=0.0,
    )


def _default_energies():
    return tuple(e * PJ for e in range(3, 31, 3))


@dataclass(frozen=True)
class ExperimentConfig:
    """All inputs of a sweep, in SI units."""

    fiber: FiberParams = field(default_factory=default_fiber)
    pulse_fwhm: float = 120e-15
    center_wavelength: float = DEFAULT_WAVELENGTH
    energies: tuple = field(default_factory=_default_energies)
    epsilon: float = 0.05
    kappa_spatial: float = 0.95
    kappa_g: float = DEFAULT_KAPPA_G
    eta_prop: float = 0.95
    eta_det: float = 0.95
    phi_rel: float = 0.0
    n_samples: int = 2**13
    window: float = 10e-12
    n_steps: int = 1000

    def __post_init__(self):
        energies = tuple(float(e) for e in self.energies)
        object.__setattr__(self, "energies", energies)
        if not energies or any(not e > 0 for e in energies):
            raise InputError("energies must be a nonempty list of positive values")
        if not 0.0 <= self.epsilon < 1.0:
            raise InputError(f"epsilon must lie in [0, 1), got {self.epsilon}")
        for name in ("kappa_spatial", "eta_prop", "eta_det"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise InputError(f"{name} must lie in (0, 1], got {value}")
        if not self.kappa_g >= 0:
            raise InputError(f"kappa_g must be nonnegative, got {self.kappa_g}")
        if not (self.pulse_fwhm > 0 and self.center_wavelength > 0):
            raise InputError("pulse_fwhm and center_wavelength must be positive")
        if int(self.n_steps) != self.n_steps or self.n_steps < 100:
            raise InputError(f"n_steps must be an integer >= 100, got {self.n_steps}")
        self.grid  # validates n_samples and window

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid(self.n_samples, self.window)


@dataclass(frozen=True)
class ClassicalRow:
    energy: float
    v_max: float
    r_a: float
    r_b: float
    energy_a: float
    energy_b: float


@dataclass(frozen=True)
class SweepRow:
    energy_pJ: float
    v_max: float
    visibility: float
    eta_vis: float
    r_a: float
    r_b: float
    sqz_db: float
    antisqz_db: float
    purity: float
    error: str | None = None

    def values(self):
        return tuple(getattr(self, name) for name in CSV_HEADER)


def pulse_pair_energies(energy, epsilon):
    return energy * (1 + epsilon / 2), energy * (1 - epsilon / 2)


def classical_stage(config: ExperimentConfig, energy: float, backend=None) -> ClassicalRow:
    """Propagate both pulses for one total energy and compare their output spectra."""
    grid = config.grid
    e_a, e_b = pulse_pair_energies(energy, config.epsilon)
    pa = make_sech_pulse(e_a, config.pulse_fwhm, config.center_wavelength, grid)
    out_a = propagate(pa, config.fiber, config.n_steps, backend=backend)
    if config.epsilon == 0:
        pb, out_b = pa, out_a
    else:
        pb = make_sech_pulse(e_b, config.pulse_fwhm, config.center_wavelength, grid)
        out_b = propagate(pb, config.fiber, config.n_steps, backend=backend)
    report = spectral_overlap(spectrum(out_a), spectrum(out_b))
    return ClassicalRow(
        energy=energy,
        v_max=report.v_max,
        r_a=noise.nonlinear_phase(pa, config.fiber),
        r_b=noise.nonlinear_phase(pb, config.fiber),
        energy_a=e_a,
        energy_b=e_b,
    )


def noise_stage(config: ExperimentConfig, row: ClassicalRow, kappa_g=None) -> SweepRow:
    """Quantum-noise chain for one classical row."""
    kappa_g = config.kappa_g if kappa_g is None else kappa_g
    visibility = predicted_visibility(row.v_max, config.kappa_spatial)
    chain = noise.EfficiencyChain.from_visibility(config.eta_prop, config.eta_det, visibility)
    ca = noise.add_phase_noise(
        noise.kerr_covariance(row.r_a), noise.gawbs_noise(row.energy_a, config.fiber, kappa_g)
    )
    cb = noise.add_phase_noise(
        noise.kerr_covariance(row.r_b), noise.gawbs_noise(row.energy_b, config.fiber, kappa_g)
    )
    dark = noise.combine_sagnac(ca, cb, config.phi_rel)
    # independent vacuum admixtures commute; order is immaterial
    for eta in (chain.eta_vis, chain.eta_prop, chain.eta_det):
        dark = noise.apply_loss(dark, eta)
    res = noise.extremal_variances(dark)
    return SweepRow(
        energy_pJ=row.energy / PJ,
        v_max=row.v_max,
        visibility=visibility,
        eta_vis=chain.eta_vis,
        r_a=row.r_a,
        r_b=row.r_b,
        sqz_db=res.sqz_db,
        antisqz_db=res.antisqz_db,
        purity=res.purity,
    )


def _failed_row(energy, exc):
    nan = math.nan
    return SweepRow(energy / PJ, nan, nan, nan, nan, nan, nan, nan, nan, error=str(exc))


def classical_rows(config: ExperimentConfig, workers=1, backend=None):
    """Classical stage for every energy, ordered by energy; failures come back as exceptions."""
    energies = sorted(config.energies)

    def one(energy):
        try:
            return classical_stage(config, energy, backend=backend)
        except NumericalError as exc:
            logger.warning("energy %.4g pJ failed: %s", energy / PJ, exc)
            return exc

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, energies))
    else:
        results = [one(e) for e in energies]
    return list(zip(energies, results))


def rows_from_classical(config, classical, kappa_g=None):
    rows = []
    for energy, result in classical:
        if isinstance(result, Exception):
            rows.append(_failed_row(energy, result))
        else:
            rows.append(noise_stage(config, result, kappa_g))
    return rows


def run_sweep(config: ExperimentConfig, workers=1, backend=None) -> list[SweepRow]:
    """Simulate every configured energy; rows are sorted by energy.

    A propagation that runs into the window edge yields a row of NaNs with
    ``error`` set instead of aborting the sweep.
    """
    return rows_from_classical(config, classical_rows(config, workers, backend))


def _fmt(x):
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return repr(float(x))


def rows_to_csv(rows, path=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([_fmt(v) for v in row.values()])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


@dataclass(frozen=True)
class Calibration:
    kappa_g: float
    best_sqz_db: float
    best_energy_pJ: float
    n_ex_reference: float
    reference_energy_pJ: float
    rows: tuple


def best_squeezing(rows):
    valid = [r for r in rows if r.error is None]
    if not valid:
        raise NumericalError("no valid sweep rows")
    return min(valid, key=lambda r: r.sqz_db)


def calibrate_kappa_g(config: ExperimentConfig, target_db=-3.9, reference_energy_pJ=14.6,
                      workers=1, backend=None, xtol=1e-6) -> Calibration:
    """Find ``kappa_g`` so that the best squeezing of the sweep equals ``target_db``.

    Propagation runs once; the root-find (Brent, on log10 kappa_g) only
    repeats the noise stage. Raises NumericalError when the target is better
    than the noise-free sweep can reach.
    """
    classical = classical_rows(config, workers, backend)

    def excess(log_k):
        k = 0.0 if log_k is None else 10.0**log_k
        return best_squeezing(rows_from_classical(config, classical, k)).sqz_db - target_db

    if excess(None) > 0:
        raise NumericalError(
            f"target {target_db} dB is out of reach even without excess noise "
            f"(best {excess(None) + target_db:.3f} dB)"
        )
    lo, hi = 0.0, 12.0
    while excess(lo) > 0:
        lo -= 4.0
        if lo < -40:
            raise NumericalError("could not bracket kappa_g")
    while excess(hi) < 0:
        hi += 4.0
        if hi > 40:
            raise NumericalError("could not bracket kappa_g")
    log_k = brentq(excess, lo, hi, xtol=xtol)
    kappa_g = 10.0**log_k
    rows = rows_from_classical(config, classical, kappa_g)
    best = best_squeezing(rows)
    return Calibration(
        kappa_g=kappa_g,
        best_sqz_db=best.sqz_db,
        best_energy_pJ=best.energy_pJ,
        n_ex_reference=noise.gawbs_noise(reference_energy_pJ * PJ, config.fiber, kappa_g),
        reference_energy_pJ=reference_energy_pJ,
        rows=tuple(rows),
    )


# ---------------------------------------------------------------------------
# configuration files
# ---------------------------------------------------------------------------

# key -> (description, default text)
CONFIG_KEYS = {
    "length_m": ("fiber length", "1.0"),
    "beta2_s2_per_m": ("group-velocity dispersion at the carrier", "-1e-26"),
    "beta3_s3_per_m": ("third-order dispersion", "1e-40"),
    "gamma_per_w_m": ("nonlinear coefficient; 'auto' derives it from mfd_um and n2_m2_per_w", "auto"),
    "mfd_um": ("mode field diameter", "1.8"),
    "n2_m2_per_w": ("nonlinear index of silica", "2.6e-20"),
    "alpha_per_m": ("power loss rate", "0"),
    "pulse_fwhm_fs": ("intensity FWHM of the sech input pulse", "120"),
    "center_wavelength_nm": ("carrier wavelength", "810"),
    "energies_pj": ("comma-separated total pulse energies", "3, 6, 9, 12, 15, 18, 21, 24, 27, 30"),
    "epsilon": ("coupling asymmetry; pulses get E(1 +/- epsilon/2)", "0.05"),
    "kappa_spatial": ("power-independent spatial mode-matching factor", "0.95"),
    "kappa_g": ("excess phase noise per pulse energy and fiber length, 1/(J m)", repr(DEFAULT_KAPPA_G)),
    "eta_prop": ("propagation efficiency fiber to detectors", "0.95"),
    "eta_det": ("photodiode quantum efficiency", "0.95"),
    "phi_rel_rad": ("relative phase of the recombined pulses", "0"),
    "n_samples": ("time-grid samples (power of two)", "8192"),
    "window_ps": ("time-grid span", "10"),
    "n_steps": ("split-step count", "1000"),
}


def default_config_text() -> str:
    lines = ["# polsqueeze experiment configuration (key = value, '#' starts a comment)"]
    for key, (desc, default) in CONFIG_KEYS.items():
        lines.append(f"# {desc}")
        lines.append(f"{key} = {default}")
    return "\n".join(lines) + "\n"


def _parse_float(key, text, lineno):
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key}: not a number: {text!r}", key=key, line=lineno)
    if not math.isfinite(value):
        raise ConfigError(f"line {lineno}: {key}: value must be finite", key=key, line=lineno)
    return value


def _parse_int(key, text, lineno):
    value = _parse_float(key, text, lineno)
    if value != int(value):
        raise ConfigError(f"line {lineno}: {key}: expected an integer, got {text!r}", key=key, line=lineno)
    return int(value)


def parse_config(text: str, source="<config>") -> ExperimentConfig:
    """Parse ``key = value`` text. Unknown or repeated keys are errors."""
    values = {key: (default, 0) for key, (_, default) in CONFIG_KEYS.items()}
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}", key=key, line=lineno)
        if key in seen:
            raise ConfigError(f"{source}:{lineno}: key {key!r} given twice", key=key, line=lineno)
        if not value:
            raise ConfigError(f"{source}:{lineno}: key {key!r} has no value", key=key, line=lineno)
        seen.add(key)
        values[key] = (value, lineno)

    def num(key):
        return _parse_float(key, *values[key])

    def integer(key):
        return _parse_int(key, *values[key])

    wavelength = num("center_wavelength_nm") / 1e9
    gamma_text, gamma_line = values["gamma_per_w_m"]
    try:
        if gamma_text.lower() == "auto":
            gamma = gamma_from_mode_area(num("mfd_um") / 1e6, wavelength, num("n2_m2_per_w"))
        else:
            gamma = _parse_float("gamma_per_w_m", gamma_text, gamma_line)
        fiber = FiberParams(
            length=num("length_m"),
            beta2=num("beta2_s2_per_m"),
            beta3=num("beta3_s3_per_m"),
            gamma=gamma,
            alpha=num("alpha_per_m"),
        )
    except ConfigError:
        raise
    except InputError as exc:
        raise ConfigError(f"{source}: invalid fiber parameters: {exc}") from exc

    energy_text, energy_line = values["energies_pj"]
    energies = [
        _parse_float("energies_pj", part.strip(), energy_line) * PJ
        for part in energy_text.split(",")
        if part.strip()
    ]
    try:
        return ExperimentConfig(
            fiber=fiber,
            pulse_fwhm=num("pulse_fwhm_fs") / 1e15,
            center_wavelength=wavelength,
            energies=tuple(energies),
            epsilon=num("epsilon"),
            kappa_spatial=num("kappa_spatial"),
            kappa_g=num("kappa_g"),
            eta_prop=num("eta_prop"),
            eta_det=num("eta_det"),
            phi_rel=num("phi_rel_rad"),
            n_samples=integer("n_samples"),
            window=num("window_ps") / 1e12,
            n_steps=integer("n_steps"),
        )
    except ConfigError:
        raise
    except InputError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_config(text, source=str(path))


def with_overrides(config: ExperimentConfig, **changes) -> ExperimentConfig:
    """Copy of ``config`` with some fields replaced; ``energies_pJ`` is accepted for convenience."""
    if "energies_pJ" in changes:
        changes["energies"] = tuple(e * PJ for e in changes.pop("energies_pJ"))
    return replace(config, **changes)


def energies_pj(config):
    return np.asarray(config.energies) / PJ
