"""Simulator for polarization squeezing from counter-propagating pulses in a PCF Sagnac loop."""
from .errors import (
    ConfigError,
    GridMismatchError,
    GridTooSmallError,
    InputError,
    NumericalError,
    PolSqueezeError,
    SpectrumParseError,
    UnphysicalInputError,
    WraparoundError,
)
from .experiment import (
    ExperimentConfig,
    SweepRow,
    calibrate_kappa_g,
    load_config,
    rows_to_csv,
    run_sweep,
)
from .kernels import BACKEND
from .noise import (
    EfficiencyChain,
    QuadCovariance,
    SqueezingResult,
    add_phase_noise,
    apply_loss,
    combine_sagnac,
    extremal_variances,
    gawbs_noise,
    infer_lossless,
    kerr_covariance,
    nonlinear_phase,
)
from .pulse import (
    FiberParams,
    PulseEnvelope,
    TimeGrid,
    gamma_from_mode_area,
    make_sech_pulse,
    propagate,
    spectrum,
)
from .spectral import (
    OverlapReport,
    Spectrum,
    load_spectrometer_file,
    predicted_visibility,
    rms_width,
    spectral_overlap,
)
from .stokes import (
    NoiseTrace,
    StokesState,
    calibrate_qnl,
    dark_noise_correct,
    stokes_variance,
    sweep_hwp,
)

__version__ = "0.1.0"
