"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import noise
from .errors import InputError, NumericalError, UnphysicalInputError
from .experiment import (
    PJ,
    ExperimentConfig,
    calibrate_kappa_g,
    default_config_text,
    load_config,
    rows_to_csv,
    run_sweep,
)
from .pulse import make_sech_pulse, propagate, spectrum
from .spectral import (
    Spectrum,
    load_spectrometer_file,
    resample,
    rms_width,
    spectral_overlap,
    write_spectrometer_file,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def _config(path):
    return load_config(path) if path else ExperimentConfig()


def cmd_sweep(args):
    config = _config(args.config)
    rows = run_sweep(config, workers=args.workers)
    text = rows_to_csv(rows, args.out)
    if args.out is None:
        sys.stdout.write(text)
    failed = [r for r in rows if r.error is not None]
    for row in failed:
        print(f"error at {row.energy_pJ:g} pJ: {row.error}", file=sys.stderr)
    return EXIT_NUMERICAL if failed else EXIT_OK


def cmd_overlap(args):
    sp = load_spectrometer_file(args.file_p)
    ss = load_spectrometer_file(args.file_s)
    if not sp.same_grid(ss):
        # files from one spectrometer normally share a grid; otherwise use the common band
        lo, hi = max(sp.omega[0], ss.omega[0]), min(sp.omega[-1], ss.omega[-1])
        if not hi > lo:
            raise InputError("spectra do not overlap in frequency")
        grid = np.linspace(lo, hi, max(len(sp), len(ss)))
        sp, ss = resample(sp, grid), resample(ss, grid)
    report = spectral_overlap(sp, ss)
    print(f"v_max = {report.v_max:.4f}")
    return EXIT_OK


def cmd_infer(args):
    if not 0.0 < args.eta <= 1.0:
        raise InputError(f"efficiency must lie in (0, 1], got {args.eta}")
    v_sqz = float(noise.from_db(args.sqz))
    v_anti = float(noise.from_db(args.antisqz))
    print(f"measured purity = {1 / (v_sqz * v_anti) ** 0.5:.4f}")
    # each quadrature is inferred on its own so one unphysical input does not hide the other
    inferred = {}
    failed = False
    for label, v in (("squeezing", v_sqz), ("anti-squeezing", v_anti)):
        try:
            inferred[label] = noise.infer_lossless(v, args.eta)
        except UnphysicalInputError as exc:
            print(f"error: inferred {label}: {exc}", file=sys.stderr)
            failed = True
        else:
            print(f"inferred {label} = {noise.to_db(inferred[label]):.2f} dB")
    if failed:
        return EXIT_INPUT
    purity = 1 / (inferred["squeezing"] * inferred["anti-squeezing"]) ** 0.5
    print(f"inferred purity = {purity:.4f}")
    return EXIT_OK


def cmd_propagate(args):
    config = _config(args.config)
    pulse = make_sech_pulse(args.energy_pj * PJ, config.pulse_fwhm, config.center_wavelength, config.grid)
    out = propagate(pulse, config.fiber, config.n_steps)
    sp_in, sp_out = spectrum(pulse), spectrum(out)
    keep = sp_out.omega > 0
    if not keep.all():
        # a fine time grid spans past zero absolute frequency; those far-wing bins carry no power
        dropped = sp_out.density[~keep].sum() / sp_out.density.sum()
        logging.getLogger(__name__).info("dropping %d bins below zero frequency (%.1e of the energy)",
                                         int((~keep).sum()), dropped)
        sp_file = Spectrum(sp_out.omega[keep], sp_out.density[keep])
    else:
        sp_file = sp_out
    write_spectrometer_file(sp_file, args.out, header=f"output spectrum, {args.energy_pj:g} pJ input")
    print(f"rms spectral broadening = {rms_width(sp_out) / rms_width(sp_in):.4f}")
    print(f"peak power out/in = {out.peak_power / pulse.peak_power:.4f}")
    return EXIT_OK


def cmd_calibrate(args):
    config = _config(args.config)
    cal = calibrate_kappa_g(config, target_db=args.target_db, workers=args.workers)
    print(f"kappa_g = {cal.kappa_g:.6g} 1/(J m)")
    print(f"best squeezing = {cal.best_sqz_db:.3f} dB at {cal.best_energy_pJ:g} pJ")
    print(f"n_ex at {cal.reference_energy_pJ:g} pJ = {cal.n_ex_reference:.4g} SNU")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="polsqueeze", description="Polarization squeezing in a PCF Sagnac loop."
    )
    parser.add_argument("--print-default-config", action="store_true",
                        help="print a configuration template with all defaults and exit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("sweep", help="energy sweep to CSV")
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("overlap", help="spectral overlap of two spectrometer files")
    p.add_argument("file_p")
    p.add_argument("file_s")
    p.set_defaults(func=cmd_overlap)

    p = sub.add_parser("infer", help="loss-corrected squeezing and purity")
    p.add_argument("--sqz", type=float, required=True, help="measured squeezing, dB")
    p.add_argument("--antisqz", type=float, required=True, help="measured anti-squeezing, dB")
    p.add_argument("--eta", type=float, required=True, help="total detection efficiency")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("propagate", help="propagate one pulse and write its output spectrum")
    p.add_argument("--energy-pj", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("calibrate", help="fit kappa_g to a target best squeezing")
    p.add_argument("--config")
    p.add_argument("--target-db", type=float, default=-3.9)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.print_default_config:
        sys.stdout.write(default_config_text())
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
