import math

import numpy as np
import pytest
from conftest import K, POINT_TARGET, SAMPLING_CENTER

import services.imaging as imaging
from config_schemas import Flag, GridConfig, ImagingConfig
from errors import InputValidationError, WavenumberMismatchError
from models import SENTINEL, BoundaryKind, DiskScene, FarFieldPattern, IndicatorField, PointScene, RegularizationParams, TestDisk
from services.disk_model import DiskModel
from services.forward import multistatic_matrix, synthesize
from services.imaging import (
    alpha_sweep,
    classical_field,
    folded_weights,
    indicator_profile,
    interior_exterior_contrast,
    normalize_field,
    profile_center,
    radius_threshold,
    reciprocal_series,
    sampling_centers,
    scheme_one,
    scheme_two,
    scheme_two_fields,
)
from services.indicators import regularized_indicator
from services.point_model import PointModel
from services.spectral import spectral_system

SMALL_GRID = GridConfig(x_min=-4.0, x_max=4.0, y_min=-4.0, y_max=4.0, n_x=24, n_y=20)


class TestSampling:
    def test_centres_on_circle(self, point_config):
        centers = sampling_centers(point_config)
        assert centers.shape == (8, 2)
        np.testing.assert_allclose(centers[0], [4.0, 0.0])
        np.testing.assert_allclose(np.hypot(centers[:, 0], centers[:, 1]), np.full(8, 4.0))
        np.testing.assert_allclose(centers[2], [0.0, 4.0], atol=1e-15)

    def test_profile_centre(self, point_config):
        assert profile_center(point_config) == (4.0, 0.0)
        assert profile_center(point_config, [1, 2]) == (1.0, 2.0)
        with pytest.raises(InputValidationError):
            profile_center(point_config, [1.0])


class TestProfile:
    def test_matches_regularized_indicator(self, point_far_field, point_config):
        profile = indicator_profile(point_far_field, SAMPLING_CENTER, point_config)
        reg = RegularizationParams(point_config.alpha, point_config.truncation)
        for m in (10, 80, 115, 140):
            spec = spectral_system(TestDisk(SAMPLING_CENTER, profile.radii[m], point_config.boundary), K, 60)
            expected = regularized_indicator(point_far_field, spec, reg).value
            assert profile.values[m] == pytest.approx(expected, rel=1e-9)

    def test_folded_weights(self, point_far_field):
        power = np.abs(imaging.inner_products(point_far_field, SAMPLING_CENTER, 5)) ** 2
        weights = folded_weights(point_far_field, SAMPLING_CENTER, 5)
        assert weights[0] == power[5]
        assert weights[3] == pytest.approx(power[8] + power[2])

    def test_reciprocal_series_drops_and_caps(self):
        lam = np.array([[1.0], [0.0]])
        values, dropped = reciprocal_series(lam, np.array([0.0, 1.0]), 1e-3)
        assert values[0] == SENTINEL
        assert dropped == 1

    def test_radius_increases_with_delta(self, point_far_field, point_config):
        radii = []
        for delta in (1e-6, 4e-4, 1.2e-2, 1.0):
            cfg = point_config.model_copy(update={"delta": delta})
            radii.append(radius_threshold(point_far_field, SAMPLING_CENTER, cfg).radius)
        assert radii == sorted(radii)

    def test_recovers_distance(self, point_far_field, point_config):
        result = radius_threshold(point_far_field, SAMPLING_CENTER, point_config)
        assert result.radius == pytest.approx(5.98, abs=0.15)
        assert result.flags == []

    def test_sound_soft_recovers_distance(self, point_far_field, point_config):
        cfg = point_config.model_copy(update={"bc": BoundaryKind.SOUND_SOFT})
        assert radius_threshold(point_far_field, SAMPLING_CENTER, cfg).radius == pytest.approx(5.98, abs=0.15)

    def test_small_delta_underestimates(self, point_far_field, point_config):
        cfg = point_config.model_copy(update={"delta": 4e-4})
        assert radius_threshold(point_far_field, SAMPLING_CENTER, cfg).radius == pytest.approx(5.5, abs=0.15)

    def test_out_of_range(self, point_far_field, point_config):
        cfg = point_config.model_copy(update={"delta": 1e250})
        result = radius_threshold(point_far_field, SAMPLING_CENTER, cfg)
        assert result.radius == 8.0
        assert Flag.OUT_OF_RANGE in result.flags

    def test_wavenumber_checked(self, point_far_field, point_config):
        with pytest.raises(WavenumberMismatchError):
            indicator_profile(point_far_field, SAMPLING_CENTER, point_config.model_copy(update={"k": 7.0}))


class TestSchemeOne:
    def test_mask_contains_target(self, point_far_field, point_config):
        cfg = point_config.model_copy(update={"grid": SMALL_GRID})
        result = scheme_one(point_far_field, cfg)
        assert result.mask.shape == (20, 24)
        assert result.radii.shape == (8,)
        distances = np.hypot(result.centers[:, 0] - POINT_TARGET[0], result.centers[:, 1] - POINT_TARGET[1])
        np.testing.assert_allclose(result.radii, distances, atol=0.3)
        far = np.hypot(*np.meshgrid(result.xs - POINT_TARGET[0], result.ys - POINT_TARGET[1])) > 2.0
        assert not result.mask[far].any()

    def test_more_centres_shrink_mask(self, point_far_field, point_config):
        coarse = scheme_one(point_far_field, point_config.model_copy(update={"grid": SMALL_GRID, "n_centers": 4}))
        fine = scheme_one(point_far_field, point_config.model_copy(update={"grid": SMALL_GRID, "n_centers": 8}))
        assert not np.any(fine.mask & ~coarse.mask)

    def test_symmetric_target_gives_equal_radii(self, point_config):
        u = synthesize(PointScene([(0.0, 0.0)]), K, 512)
        result = scheme_one(u, point_config.model_copy(update={"grid": SMALL_GRID}))
        step = 2.0 * point_config.R / point_config.n_radii
        assert np.ptp(result.radii) <= step + 1e-12
        np.testing.assert_allclose(result.radii, np.full(8, 4.0), atol=0.2)

    def test_radius_error_for_random_targets(self, point_config, rng):
        step = 2.0 * point_config.R / point_config.n_radii
        centers = sampling_centers(point_config)[::2]
        for _ in range(20):
            radius, angle = 1.5 * math.sqrt(rng.uniform()), rng.uniform(0, 2 * math.pi)
            target = (radius * math.cos(angle), radius * math.sin(angle))
            u = synthesize(PointScene([target]), K, 512)
            for center in centers:
                h = radius_threshold(u, center, point_config).radius
                assert abs(h - math.dist(center, target)) <= step + 0.15


@pytest.fixture(scope="module")
def triangle_free_config():
    return ImagingConfig(k=K, R=4.0, nz=16, M=160, N=60, alpha=1e-13, grid=SMALL_GRID)


class TestSchemeTwo:
    def test_point_target_is_darkest(self, point_far_field, triangle_free_config):
        field = scheme_two(point_far_field, triangle_free_config)
        assert field.values.shape == (20, 24)
        row, col = np.unravel_index(np.argmin(field.values), field.values.shape)
        assert math.hypot(field.xs[col] - POINT_TARGET[0], field.ys[row] - POINT_TARGET[1]) < 1.0

    def test_two_targets_darken_the_segment_between(self, triangle_free_config):
        u = synthesize(PointScene([(-2.0, 0.0), (2.0, 0.0)]), K, 512)
        field = normalize_field(scheme_two(u, triangle_free_config))
        x, y = np.meshgrid(field.xs, field.ys)
        on_segment = (np.abs(y) < 0.25) & (np.abs(x) <= 2.0)
        distance = np.hypot(np.maximum(np.abs(x) - 2.0, 0.0), y)
        assert on_segment.sum() >= 10
        assert field.values[on_segment].max() < np.median(field.values[distance > 1.5])

    def test_centre_order_irrelevant(self, point_far_field, triangle_free_config, monkeypatch):
        base = scheme_two(point_far_field, triangle_free_config)
        original = imaging.sampling_centers
        monkeypatch.setattr(imaging, "sampling_centers", lambda cfg: original(cfg)[::-1].copy())
        np.testing.assert_array_equal(scheme_two(point_far_field, triangle_free_config).values, base.values)

    def test_one_field_per_alpha(self, point_far_field, triangle_free_config):
        fields = scheme_two_fields(point_far_field, triangle_free_config, [1e-13, 1e-10])
        assert len(fields) == 2
        np.testing.assert_array_equal(fields[0].values, scheme_two(point_far_field, triangle_free_config).values)

    def test_esm_variant(self, point_far_field, triangle_free_config):
        field = scheme_two(point_far_field, triangle_free_config, method="esm")
        assert np.all(field.values > 0)

    def test_rejects_unknown_method(self, point_far_field, triangle_free_config):
        with pytest.raises(InputValidationError):
            scheme_two(point_far_field, triangle_free_config, method="music")

    def test_rejects_bad_alpha(self, point_far_field, triangle_free_config):
        with pytest.raises(InputValidationError):
            scheme_two_fields(point_far_field, triangle_free_config, [1e-13, 0.0])

    def test_empty_signal_saturates(self, triangle_free_config):
        field = scheme_two(FarFieldPattern(K, np.zeros(512)), triangle_free_config)
        assert np.all(field.values == SENTINEL)
        assert Flag.DEGENERATE_SIGNAL in field.flags


class TestNormalization:
    def test_affine_map(self):
        field = IndicatorField(xs=[0, 1], ys=[0, 1], values=[[2.0, 4.0], [6.0, SENTINEL]])
        np.testing.assert_allclose(normalize_field(field).values, [[0.0, 0.5], [1.0, 1.0]])

    def test_constant_field(self):
        field = IndicatorField(xs=[0, 1], ys=[0], values=[[3.0, 3.0]])
        with pytest.raises(InputValidationError):
            normalize_field(field)

    def test_contrast(self):
        field = IndicatorField(xs=[-1.5, 0.0, 1.5], ys=[0.0], values=[[1.0, 0.0, 3.0]])
        model = DiskModel(DiskScene((0.0, 0.0), 1.0))
        result = interior_exterior_contrast(field, model)
        assert result.interior_mean == 0.0
        assert result.exterior_mean == pytest.approx(2.0 / 3.0)
        assert result.contrast == pytest.approx(2.0 / 3.0)

    def test_contrast_needs_both_regions(self):
        field = IndicatorField(xs=[0.0, 0.5], ys=[0.0], values=[[1.0, 2.0]])
        with pytest.raises(InputValidationError):
            interior_exterior_contrast(field, PointModel(PointScene([(0.0, 0.0)])))


class TestAlphaSweep:
    def test_disk_contrast_per_alpha(self, triangle_free_config, impedance):
        scene = DiskScene((-1.0, 0.5), 1.5, impedance)
        u = synthesize(scene, K, 256, incident_theta=0.0)
        rows = alpha_sweep(u, triangle_free_config, [1e-13, 1e-10], DiskModel(scene))
        assert [alpha for alpha, _ in rows] == [1e-13, 1e-10]
        for _, result in rows:
            assert result.exterior_mean > result.interior_mean


class TestClassicalField:
    def test_disk_image(self, impedance):
        grid = GridConfig(x_min=-2.0, x_max=2.0, y_min=-2.0, y_max=2.0, n_x=21, n_y=21)
        matrix = multistatic_matrix(DiskScene((0.0, 0.0), 1.0, impedance), K, 64)
        field = classical_field(matrix, K, grid)
        radius = np.hypot(*np.meshgrid(grid.xs(), grid.ys()))
        top = field.values.max()
        inside = radius < 0.8
        outside = radius > 1.2
        assert np.all(field.values[inside] >= 0.05 * top)
        assert np.all(field.values[outside] < 0.05 * top)

    def test_fsharp_and_quarter_power_classify_alike(self, sound_soft):
        center = (0.6, -0.4)
        grid = GridConfig(x_min=-1.4, x_max=2.6, y_min=-2.4, y_max=1.6, n_x=21, n_y=21)
        matrix = multistatic_matrix(DiskScene(center, 1.0, sound_soft), K, 64)
        distance = np.hypot(*np.meshgrid(grid.xs() - center[0], grid.ys() - center[1]))
        away_from_boundary = np.abs(distance - 1.0) >= 0.25
        masks = []
        for method in ("quarterpower", "fsharp"):
            field = classical_field(matrix, K, grid, method)
            masks.append(field.values >= 0.05 * field.values.max())
        np.testing.assert_array_equal(masks[0][away_from_boundary], masks[1][away_from_boundary])
        np.testing.assert_array_equal(masks[0][away_from_boundary], (distance < 1.0)[away_from_boundary])
