#!/usr/bin/env python3
"""Command-line front end: synthesize data, invert it, inspect test-disk spectra, sweep alpha"""
import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from config_schemas import ResultMessage, ResultStatus, RunConfig, RunSummary, build_run_config
from errors import DataFormatError, InputValidationError, NumericalError, WavenumberMismatchError
from models import Direction, IndicatorField, TestDisk
from output_utils import (
    create_error_summary,
    create_field_summary,
    create_run_summary,
    create_scheme_one_summary,
    detect_data_kind,
    format_summary,
    read_far_field,
    read_multistatic,
    write_far_field,
    write_field_csv,
    write_field_pgm,
    write_multistatic,
    write_profile,
    write_scheme_one,
    write_spectrum,
    write_sweep,
)
from services.forward import synthesize
from services.imaging import (
    alpha_sweep,
    classical_field,
    indicator_profile,
    normalize_field,
    profile_center,
    radius_threshold,
    scheme_one,
    scheme_two,
)
from services.model_factory import ModelFactory
from services.scene_parser import load_key_value_file
from services.spectral import spectral_system

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="onewave",
        description="One-wave factorization imaging for inverse acoustic scattering",
        allow_abbrev=False,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--config", help="flat key=value file; flags override its values")
    common.add_argument("--verbose", action="store_true", help="log solver statistics")
    common.add_argument("--k", type=float, help="wavenumber")
    common.add_argument("--ntheta", type=int, help="number of observation directions")
    common.add_argument("--out", help="output path")

    imaging = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    imaging.add_argument("--R", type=float, help="radius of the sampling circle")
    imaging.add_argument("--nz", type=int, help="number of sampling centres")
    imaging.add_argument("--M", type=int, help="number of test radii")
    imaging.add_argument("--N", type=int, help="series truncation")
    imaging.add_argument("--alpha", type=float, help="Tikhonov parameter")
    imaging.add_argument("--delta", type=float, help="threshold of scheme one")
    imaging.add_argument("--bc", choices=["soundsoft", "impedance"], help="test-disk boundary condition")
    imaging.add_argument("--eta", help="test-disk impedance, e.g. 0+1i")
    imaging.add_argument("--nx", dest="n_x", type=int, help="grid points along x")
    imaging.add_argument("--ny", dest="n_y", type=int, help="grid points along y")

    synth = commands.add_parser(
        "synthesize", parents=[common], allow_abbrev=False, help="far-field data of a scene file"
    )
    synth.add_argument("--scene", help="scene description file")
    synth.add_argument("--incident", type=float, help="incident angle in radians, wrapped into [0, 2pi)")
    synth.add_argument("--noise", type=float, help="relative noise level in [0, 1)")
    synth.add_argument("--seed", type=int, help="noise seed")
    synth.add_argument("--multistatic", action="store_true", default=None,
                       help="also write the multistatic matrix")

    invert = commands.add_parser(
        "invert", parents=[common, imaging], allow_abbrev=False, help="image from a data file"
    )
    invert.add_argument("--data", help="far-field or multistatic data file")
    invert.add_argument("--method", help="scheme1, scheme2, esm, classical or profile")
    invert.add_argument("--classical", choices=["quarterpower", "fsharp"], help="multi-wave variant")
    invert.add_argument("--center", help="profile centre 'x,y'")

    spectrum = commands.add_parser(
        "spectrum", parents=[common, imaging], allow_abbrev=False, help="test-disk eigenvalues"
    )
    spectrum.add_argument("--h", type=float, help="test-disk radius (default R)")

    sweep = commands.add_parser(
        "sweep", parents=[common, imaging], allow_abbrev=False, help="contrast against alpha"
    )
    sweep.add_argument("--data", help="far-field data file")
    sweep.add_argument("--scene", help="scene file giving the true support")
    sweep.add_argument("--alphas", help="comma-separated alpha values")
    sweep.add_argument("--method", help="scheme2 or esm")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    """Schema defaults < config file < command-line flags"""
    flags: Dict[str, Any] = {
        key: value for key, value in vars(args).items() if key not in ("command", "config", "verbose")
    }
    sources: List[Dict[str, Any]] = []
    if args.config:
        sources.append(load_key_value_file(args.config, lowercase_keys=False).entries)
    sources.append(flags)
    return build_run_config(args.command, *sources)


def multistatic_path(out_path: str) -> str:
    path = Path(out_path)
    return str(path.with_name(f"{path.stem}_multistatic.csv"))


def _write_field(out_path: str, field: IndicatorField, k: float) -> None:
    csv_path = Path(out_path)
    if csv_path.suffix == ".pgm":
        csv_path = csv_path.with_suffix(".csv")
    write_field_csv(str(csv_path), field, k)
    try:
        shown = normalize_field(field)
    except InputValidationError:
        logger.warning("Field is constant; image written as a flat maximum")
        shown = IndicatorField(xs=field.xs, ys=field.ys, values=field.values * 0.0 + 1.0)
    write_field_pgm(str(csv_path.with_suffix(".pgm")), shown)


def _check_wavenumber(data_k: float, cfg: RunConfig, path: str) -> None:
    if not math.isclose(data_k, cfg.imaging.k, rel_tol=1e-12):
        raise WavenumberMismatchError(f"{path} was synthesized at k = {data_k}, configured k = {cfg.imaging.k}")


def cmd_synthesize(cfg: RunConfig) -> RunSummary:
    model = ModelFactory.from_file(cfg.scene_path, mfs=cfg.mfs)
    k = cfg.imaging.k
    u = synthesize(model, k, cfg.n_theta, cfg.incident, cfg.noise, cfg.seed)
    write_far_field(cfg.out_path, u)
    data = {"scene": model.get_scene_type(), "k": k, "ntheta": cfg.n_theta, "out": cfg.out_path}
    if cfg.incident is not None and model.supports_incidence:
        data["incident"] = Direction(cfg.incident).theta
    message = ResultMessage.SYNTHESIS_DONE
    if cfg.multistatic:
        matrix_path = multistatic_path(cfg.out_path)
        write_multistatic(matrix_path, k, model.multistatic(k, cfg.n_theta))
        data["multistatic"] = matrix_path
        message = ResultMessage.MULTISTATIC_DONE
    return create_run_summary(message, data, model.flags)


def cmd_invert(cfg: RunConfig) -> RunSummary:
    kind = detect_data_kind(cfg.data_path)
    imaging = cfg.imaging

    if cfg.method == "classical":
        if kind != "multistatic":
            raise DataFormatError("The classical method needs a multistatic data file")
        k, matrix = read_multistatic(cfg.data_path)
        _check_wavenumber(k, cfg, cfg.data_path)
        field = classical_field(matrix, k, imaging.resolved_grid(), cfg.classical)
        _write_field(cfg.out_path, field, k)
        return create_field_summary(field, f"classical/{cfg.classical}")

    if kind != "farfield":
        raise DataFormatError(f"Method '{cfg.method}' needs a far-field data file")
    u = read_far_field(cfg.data_path)
    _check_wavenumber(u.k, cfg, cfg.data_path)

    if cfg.method == "scheme1":
        result = scheme_one(u, imaging)
        write_scheme_one(cfg.out_path, result)
        return create_scheme_one_summary(result)

    if cfg.method == "profile":
        center = profile_center(imaging, cfg.center)
        profile = indicator_profile(u, center, imaging)
        write_profile(cfg.out_path, profile)
        threshold = radius_threshold(u, center, imaging)
        return create_run_summary(
            ResultMessage.INVERSION_DONE,
            {"method": "profile", "center": list(center), "threshold_radius": threshold.radius},
            threshold.flags,
        )

    field = scheme_two(u, imaging, "esm" if cfg.method == "esm" else "regularized")
    _write_field(cfg.out_path, field, u.k)
    return create_field_summary(field, cfg.method)


def cmd_spectrum(cfg: RunConfig) -> RunSummary:
    imaging = cfg.imaging
    radius = cfg.radius if cfg.radius is not None else imaging.R
    spec = spectral_system(TestDisk((0.0, 0.0), radius, imaging.boundary), imaging.k, imaging.truncation)
    text = write_spectrum(cfg.out_path, spec)
    if cfg.out_path is None:
        print(text, end="")
    return create_run_summary(
        ResultMessage.SPECTRUM_DONE,
        {"h": radius, "bc": imaging.boundary.describe(), "N": imaging.truncation},
        spec.flags,
    )


def cmd_sweep(cfg: RunConfig) -> RunSummary:
    u = read_far_field(cfg.data_path)
    _check_wavenumber(u.k, cfg, cfg.data_path)
    model = ModelFactory.from_file(cfg.scene_path, mfs=cfg.mfs)
    method = "esm" if cfg.method == "esm" else "regularized"
    rows = alpha_sweep(u, cfg.imaging, cfg.alphas, model, method)
    text = write_sweep(cfg.out_path, rows)
    if cfg.out_path is None:
        print(text, end="")
    best_alpha, best = max(rows, key=lambda row: row[1].contrast)
    return create_run_summary(
        ResultMessage.SWEEP_DONE, {"best_alpha": best_alpha, "best_contrast": best.contrast}
    )


COMMAND_HANDLERS = {
    "synthesize": cmd_synthesize,
    "invert": cmd_invert,
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = load_config(args)
        summary = COMMAND_HANDLERS[cfg.command](cfg)
    except (InputValidationError, ValidationError) as e:
        print(format_summary(create_error_summary(str(e), ResultStatus.VALIDATION_ERROR)), file=sys.stderr)
        return 1
    except NumericalError as e:
        print(format_summary(create_error_summary(str(e), ResultStatus.NUMERICAL_ERROR)), file=sys.stderr)
        return e.exit_code
    if cfg.out_path is not None:
        print(format_summary(summary))
    else:
        print(format_summary(summary), file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
