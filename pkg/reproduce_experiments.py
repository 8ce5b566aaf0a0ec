#!/usr/bin/env python3
"""Re-run the reference imaging experiments and print a short report for each"""
import argparse
import logging
import time

import numpy as np

from config_schemas import (
    POINT_TARGETS,
    SQUARE_INCIDENT_ANGLE,
    SQUARE_SAMPLING_RADIUS,
    SQUARE_TEST_ETA,
    SQUARE_VERTICES,
    TRIANGLE_VERTICES,
    GridConfig,
    ImagingConfig,
    preset_alpha,
)
from errors import NumericalError
from models import BoundaryKind, PointScene, PolygonObstacleScene, PolygonSourceScene, SourceNormalization
from services.forward import model_for, synthesize
from services.imaging import interior_exterior_contrast, radius_threshold, scheme_one, scheme_two

N_THETA = 512


def banner(title):
    print(f"\n{'='*60}")
    print(title)
    print(f"{'='*60}")


def point_location(quick):
    """Scheme one radii for one, two and three point scatterers"""
    banner("POINT SCATTERERS: radius thresholds (k=6, R=4, N=60)")
    cfg = ImagingConfig(k=6.0, R=4.0, nz=8, M=160, N=60, grid=GridConfig.square(4.0, 48 if quick else 128))

    for name, targets in POINT_TARGETS.items():
        u = synthesize(PointScene(targets), cfg.k, N_THETA)
        start = time.perf_counter()
        result = scheme_one(u, cfg)
        elapsed = time.perf_counter() - start
        print(f"\n{name} target(s): {targets}")
        for center, h in zip(result.centers, result.radii):
            farthest = max(np.hypot(*(center - np.asarray(t))) for t in targets)
            print(f"  z=({center[0]:+.3f}, {center[1]:+.3f})  h={h:.3f}  farthest target at {farthest:.3f}")
        covered = all(result.mask[np.argmin(abs(result.ys - t[1])), np.argmin(abs(result.xs - t[0]))]
                      for t in targets)
        print(f"  targets inside intersection: {covered}  ({elapsed:.2f} s)")

    u = synthesize(PointScene(POINT_TARGETS["one"]), cfg.k, N_THETA)
    threshold = radius_threshold(u, (4.0, 0.0), cfg)
    print(f"\nDistance recovery, z=(4,0), target (-2,0): h = {threshold.radius:.3f} (true distance 6)")


def triangle_source(quick):
    """Scheme two contrast for the triangle source at several wavenumbers and radii"""
    banner("TRIANGLE SOURCE: scheme two contrast")
    scene = PolygonSourceScene(TRIANGLE_VERTICES, 1.0, SourceNormalization.STANDARD)
    model = model_for(scene)
    n = 48 if quick else 128
    for k in (1.5, 6.0, 12.0):
        for R in ((4.0,) if quick else (4.0, 6.0)):
            cfg = ImagingConfig(k=k, R=R, nz=32 if quick else 64, N=80, alpha=preset_alpha(k=k),
                                grid=GridConfig.square(4.0, n))
            u = synthesize(scene, k, N_THETA)
            start = time.perf_counter()
            result = interior_exterior_contrast(scheme_two(u, cfg), model)
            elapsed = time.perf_counter() - start
            print(f"  k={k:<5g} R={R:<4g} alpha={cfg.alpha:.0e}  interior={result.interior_mean:.3f}  "
                  f"exterior={result.exterior_mean:.3f}  contrast={result.contrast:+.3f}  ({elapsed:.1f} s)")


def square_obstacle(quick):
    """Scheme two contrast for the sound-soft square with noisy data"""
    banner("SOUND-SOFT SQUARE: scheme two with impedance test disks")
    scene = PolygonObstacleScene(SQUARE_VERTICES)
    model = model_for(scene)
    n = 48 if quick else 128
    try:
        clean = synthesize(model, 6.0, N_THETA, SQUARE_INCIDENT_ANGLE)
    except NumericalError as e:
        print(f"ERROR: forward solve rejected: {e}")
        return
    print(f"  forward boundary residual: {model.last_residual:.2e}")

    for noise in (0.0, 0.03, 0.08):
        u = synthesize(model, 6.0, N_THETA, SQUARE_INCIDENT_ANGLE, noise=noise, seed=1) if noise else clean
        cfg = ImagingConfig(k=6.0, R=SQUARE_SAMPLING_RADIUS, nz=32 if quick else 64, N=80,
                            alpha=preset_alpha(noise=noise), bc=BoundaryKind.IMPEDANCE,
                            eta_re=SQUARE_TEST_ETA.real, eta_im=SQUARE_TEST_ETA.imag,
                            grid=GridConfig.square(6.0, n))
        result = interior_exterior_contrast(scheme_two(u, cfg), model)
        print(f"  noise={noise:.0%}  alpha={cfg.alpha:.0e}  interior={result.interior_mean:.3f}  "
              f"exterior={result.exterior_mean:.3f}  contrast={result.contrast:+.3f}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="coarse grids and fewer centres")
    parser.add_argument("--only", choices=["points", "triangle", "square"], help="run a single family")
    args = parser.parse_args()
    logging.basicConfig(level=logging.ERROR)

    families = {"points": point_location, "triangle": triangle_source, "square": square_obstacle}
    for name, run in families.items():
        if args.only is None or args.only == name:
            run(args.quick)

    print(f"\n{'='*60}")
    print("EXPERIMENTS COMPLETE")
    print(f"{'='*60}")


if __name__ == "__main__":
    main()
