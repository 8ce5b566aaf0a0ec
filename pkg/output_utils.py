"""Reading and writing of every file artifact, plus run summaries"""
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config_schemas import ResultMessage, ResultStatus, RunSummary
from errors import DataFormatError, InputValidationError
from models import (
    ContrastResult,
    DiskSpectrum,
    FarFieldPattern,
    IndicatorField,
    IndicatorProfile,
    SchemeOneResult,
    grid_angles,
)

FLOAT_FORMAT = "%.14e"
PGM_MAXVAL = 255
_HEADER = re.compile(r"^#\s*(\w+)\s+(.*)$")


def _write_table(path: str, frame: pd.DataFrame, header: Optional[str] = None) -> None:
    with open(path, "w", newline="") as handle:
        if header is not None:
            handle.write(header + "\n")
        frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def parse_header(line: str, kind: str) -> Dict[str, str]:
    """`# <kind> key=value ...` as a dict"""
    match = _HEADER.match(line.strip())
    if not match or match.group(1) != kind:
        raise DataFormatError(f"Expected a '# {kind} ...' header, got '{line.strip()}'")
    fields = {}
    for token in match.group(2).split():
        if "=" not in token:
            raise DataFormatError(f"Malformed header token '{token}'")
        key, value = token.split("=", 1)
        fields[key] = value
    return fields


def _read_table(path: str, kind: str, columns: Sequence[str]) -> Tuple[Dict[str, str], pd.DataFrame]:
    file_path = Path(path)
    if not file_path.is_file():
        raise InputValidationError(f"File not found: {path}")
    with open(file_path) as handle:
        header = parse_header(handle.readline(), kind)
    try:
        frame = pd.read_csv(file_path, skiprows=1)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataFormatError(f"Malformed {kind} table in {path}: {e}") from e
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise DataFormatError(f"{path}: missing columns {', '.join(missing)}")
    if frame[list(columns)].isna().any().any():
        raise DataFormatError(f"{path}: empty cells in {kind} table")
    return header, frame


def _header_number(header: Dict[str, str], key: str, cast, path: str):
    if key not in header:
        raise DataFormatError(f"{path}: header lacks '{key}'")
    try:
        return cast(header[key])
    except ValueError as e:
        raise DataFormatError(f"{path}: bad header value {key}={header[key]}") from e


def write_far_field(path: str, u: FarFieldPattern) -> None:
    frame = pd.DataFrame({"theta": u.thetas, "re": u.values.real, "im": u.values.imag})
    _write_table(path, frame, f"# farfield k={u.k:.15g} ntheta={u.n_theta}")


def read_far_field(path: str) -> FarFieldPattern:
    header, frame = _read_table(path, "farfield", ["theta", "re", "im"])
    k = _header_number(header, "k", float, path)
    n_theta = _header_number(header, "ntheta", int, path)
    if len(frame) != n_theta:
        raise DataFormatError(f"{path}: header says {n_theta} directions, found {len(frame)} rows")
    if not np.allclose(frame["theta"].to_numpy(dtype=float), grid_angles(n_theta), rtol=0.0, atol=1e-12):
        raise DataFormatError(f"{path}: directions are not the uniform grid 2 pi j/{n_theta}")
    values = frame["re"].to_numpy(dtype=float) + 1j * frame["im"].to_numpy(dtype=float)
    return FarFieldPattern(k, values)


def write_multistatic(path: str, k: float, matrix: np.ndarray) -> None:
    n = matrix.shape[0]
    p, q = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    frame = pd.DataFrame({
        "p": p.ravel(), "q": q.ravel(), "re": matrix.real.ravel(), "im": matrix.imag.ravel(),
    })
    _write_table(path, frame, f"# multistatic k={k:.15g} ntheta={n}")


def read_multistatic(path: str) -> Tuple[float, np.ndarray]:
    header, frame = _read_table(path, "multistatic", ["p", "q", "re", "im"])
    k = _header_number(header, "k", float, path)
    n = _header_number(header, "ntheta", int, path)
    if len(frame) != n * n:
        raise DataFormatError(f"{path}: expected {n * n} entries, found {len(frame)}")
    p = frame["p"].to_numpy(dtype=int)
    q = frame["q"].to_numpy(dtype=int)
    if p.min() < 0 or q.min() < 0 or p.max() >= n or q.max() >= n:
        raise DataFormatError(f"{path}: matrix index out of range")
    matrix = np.zeros((n, n), dtype=complex)
    matrix[p, q] = frame["re"].to_numpy(dtype=float) + 1j * frame["im"].to_numpy(dtype=float)
    return k, matrix


def detect_data_kind(path: str) -> str:
    """'farfield' or 'multistatic' from the first line of a data file"""
    file_path = Path(path)
    if not file_path.is_file():
        raise InputValidationError(f"File not found: {path}")
    with open(file_path) as handle:
        first = handle.readline()
    match = _HEADER.match(first.strip())
    if not match or match.group(1) not in ("farfield", "multistatic"):
        raise DataFormatError(f"{path}: unknown data header '{first.strip()}'")
    return match.group(1)


def write_spectrum(path: Optional[str], spec: DiskSpectrum) -> str:
    """CSV n,re,im,abs; written to path when given, always returned as text"""
    lam = spec.eigenvalues
    frame = pd.DataFrame({"n": spec.orders, "re": lam.real, "im": lam.imag, "abs": np.abs(lam)})
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    if path is not None:
        Path(path).write_text(text)
    return text


def write_field_csv(path: str, field: IndicatorField, k: float) -> None:
    points = field.points
    frame = pd.DataFrame({
        "x": points[..., 0].ravel(), "y": points[..., 1].ravel(), "value": field.values.ravel(),
    })
    _write_table(path, frame, f"# field k={k:.15g} nx={field.xs.size} ny={field.ys.size}")


def read_field_csv(path: str) -> IndicatorField:
    header, frame = _read_table(path, "field", ["x", "y", "value"])
    nx = _header_number(header, "nx", int, path)
    ny = _header_number(header, "ny", int, path)
    if len(frame) != nx * ny:
        raise DataFormatError(f"{path}: expected {nx * ny} rows, found {len(frame)}")
    xs = frame["x"].to_numpy(dtype=float)[:nx]
    ys = frame["y"].to_numpy(dtype=float)[::nx]
    return IndicatorField(xs=xs, ys=ys, values=frame["value"].to_numpy(dtype=float).reshape(ny, nx))


def pgm_text(levels: np.ndarray) -> str:
    """P2 image of integer levels (ny, nx); row 0 of the array is the bottom row"""
    rows = np.asarray(levels, dtype=int)[::-1]
    lines = ["P2", f"{rows.shape[1]} {rows.shape[0]}", str(PGM_MAXVAL)]
    lines.extend(" ".join(str(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_field_pgm(path: str, normalized: IndicatorField) -> None:
    """Gray levels of a field already normalized to [0, 1]"""
    levels = np.rint(np.clip(normalized.values, 0.0, 1.0) * PGM_MAXVAL)
    Path(path).write_text(pgm_text(levels))


def write_scheme_one(path: str, result: SchemeOneResult) -> str:
    """CSV n,zx,zy,h at path and the mask image next to it; returns the image path"""
    frame = pd.DataFrame({
        "n": np.arange(len(result.radii)),
        "zx": result.centers[:, 0],
        "zy": result.centers[:, 1],
        "h": result.radii,
    })
    _write_table(path, frame)
    mask_path = str(Path(path).with_suffix(".pgm"))
    Path(mask_path).write_text(pgm_text(np.where(result.mask, PGM_MAXVAL, 0)))
    return mask_path


def write_profile(path: str, profile: IndicatorProfile) -> None:
    _write_table(path, pd.DataFrame({"h": profile.radii, "value": profile.values}))


def write_sweep(path: Optional[str], rows: List[Tuple[float, ContrastResult]]) -> str:
    frame = pd.DataFrame({
        "alpha": [alpha for alpha, _ in rows],
        "interior_mean": [c.interior_mean for _, c in rows],
        "exterior_mean": [c.exterior_mean for _, c in rows],
        "contrast": [c.contrast for _, c in rows],
    })
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    if path is not None:
        Path(path).write_text(text)
    return text


def create_run_summary(message: str, data: Optional[Dict[str, Any]] = None,
                       flags: Optional[List[str]] = None) -> RunSummary:
    """Create a standard success summary"""
    return RunSummary(
        success=True, status=ResultStatus.SUCCESS, message=message, data=data, flags=list(flags or [])
    )


def create_error_summary(message: str, status: str) -> RunSummary:
    return RunSummary(success=False, status=status, message=message)


def create_field_summary(field: IndicatorField, method: str) -> RunSummary:
    values = field.values
    return create_run_summary(
        ResultMessage.INVERSION_DONE,
        {"method": method, "min": float(values.min()), "max": float(values.max()),
         "nx": int(field.xs.size), "ny": int(field.ys.size)},
        field.flags,
    )


def create_scheme_one_summary(result: SchemeOneResult) -> RunSummary:
    return create_run_summary(
        ResultMessage.INVERSION_DONE,
        {"method": "scheme1", "radii": [float(h) for h in result.radii],
         "mask_points": int(result.mask.sum())},
        result.flags,
    )


def format_summary(summary: RunSummary) -> str:
    """One line per entry for standard output"""
    lines = [f"{summary.status}: {summary.message}"]
    for key, value in (summary.data or {}).items():
        if isinstance(value, list):
            value = ", ".join(f"{v:.6g}" if isinstance(v, float) else str(v) for v in value)
        elif isinstance(value, float):
            value = f"{value:.6g}"
        lines.append(f"  {key}: {value}")
    if summary.flags:
        lines.append(f"  flags: {', '.join(summary.flags)}")
    return "\n".join(lines)
