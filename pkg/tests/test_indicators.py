import math

import numpy as np
import pytest
from conftest import K, SAMPLING_CENTER

from config_schemas import Flag
from errors import DimensionError, InputValidationError, WavenumberMismatchError
from models import SENTINEL, BoundaryCondition, DiskScene, FarFieldPattern, RegularizationParams, TestDisk
from services.forward import multistatic_matrix
from services.indicators import (
    ClassicalMethod,
    classical_indicator,
    classical_system,
    classical_values,
    disk_picard_series,
    esm_bound_constant,
    esm_indicator,
    one_wave_series,
    principal_part,
    regularized_indicator,
    series_growth_ratio,
    spectral_coefficients,
)
from services.spectral import spectral_system

REG = RegularizationParams(alpha=1e-13, truncation=60)


def spectrum_at(h, bc, truncation=60, center=SAMPLING_CENTER):
    return spectral_system(TestDisk(center, h, bc), K, truncation)


class TestOneWaveSeries:
    def test_coefficients_follow_jacobi_anger(self, point_far_field, sound_soft):
        weights = spectral_coefficients(point_far_field, spectrum_at(2.0, sound_soft, 10))
        assert weights.shape == (21,)
        np.testing.assert_allclose(weights, weights[::-1], rtol=1e-9)

    def test_diverges_when_disk_misses_target(self, point_far_field, sound_soft):
        assert series_growth_ratio(point_far_field, spectrum_at(5.4, sound_soft)) > 10.0

    def test_converges_when_disk_covers_target(self, point_far_field, impedance):
        assert series_growth_ratio(point_far_field, spectrum_at(6.6, impedance)) < 3.0

    def test_partial_sums_increase(self, point_far_field, impedance):
        spec = spectrum_at(5.0, impedance)
        sums = [one_wave_series(point_far_field, spec, n) for n in (10, 20, 40, 60)]
        assert sums == sorted(sums)
        assert one_wave_series(point_far_field, spec, 500) == sums[-1]

    def test_growth_ratio_of_empty_signal(self, impedance):
        silent = FarFieldPattern(K, np.zeros(64))
        assert series_growth_ratio(silent, spectrum_at(2.0, impedance, 20)) == 1.0


class TestRegularizedIndicator:
    @pytest.mark.parametrize("bc_name", ["sound_soft", "impedance"])
    def test_dichotomy(self, request, point_far_field, bc_name):
        bc = request.getfixturevalue(bc_name)
        outside = regularized_indicator(point_far_field, spectrum_at(5.4, bc), REG).value
        covering = regularized_indicator(point_far_field, spectrum_at(6.6, bc), REG).value
        assert covering > 100.0 * outside

    def test_phase_invariance(self, point_far_field, impedance):
        spec = spectrum_at(4.0, impedance)
        rotated = point_far_field.scaled(np.exp(0.7j))
        base = regularized_indicator(point_far_field, spec, REG).value
        assert regularized_indicator(rotated, spec, REG).value == pytest.approx(base, rel=1e-12)

    def test_scaling(self, point_far_field, impedance):
        spec = spectrum_at(4.0, impedance)
        base = regularized_indicator(point_far_field, spec, REG).value
        doubled = regularized_indicator(point_far_field.scaled(2.0), spec, REG).value
        assert doubled == pytest.approx(base / 4.0, rel=1e-12)

    def test_raw_series_reported(self, point_far_field, sound_soft):
        spec = spectrum_at(6.6, sound_soft)
        result = regularized_indicator(point_far_field, spec, REG)
        assert result.raw_series == pytest.approx(one_wave_series(point_far_field, spec), rel=1e-12)
        assert result.terms_used == 121

    def test_regularization_bounds_value(self, point_far_field, sound_soft):
        spec = spectrum_at(5.4, sound_soft)
        weak = regularized_indicator(point_far_field, spec, RegularizationParams(1e-13, 60)).value
        strong = regularized_indicator(point_far_field, spec, RegularizationParams(1e-3, 60)).value
        assert strong > weak

    def test_empty_signal_is_degenerate(self, impedance):
        silent = FarFieldPattern(K, np.zeros(512))
        result = regularized_indicator(silent, spectrum_at(3.0, impedance), REG)
        assert result.value == SENTINEL
        assert Flag.DEGENERATE_SIGNAL in result.flags

    def test_vanishing_eigenvalues_dropped(self, point_far_field, sound_soft):
        spec = spectral_system(TestDisk(SAMPLING_CENTER, 0.01, sound_soft), K, 150)
        result = regularized_indicator(point_far_field, spec, RegularizationParams(1e-13, 150))
        assert Flag.DROPPED_TERMS in result.flags
        assert result.terms_used < 301

    def test_wavenumber_mismatch(self, point_far_field, sound_soft):
        spec = spectral_system(TestDisk(SAMPLING_CENTER, 2.0, sound_soft), 7.0, 10)
        with pytest.raises(WavenumberMismatchError):
            regularized_indicator(point_far_field, spec, RegularizationParams(1e-13, 10))

    def test_alpha_must_be_positive(self):
        with pytest.raises(InputValidationError):
            RegularizationParams(alpha=0.0, truncation=10)


class TestEsm:
    @pytest.mark.parametrize("h", [3.0, 5.4, 6.6])
    def test_bounded_by_regularized_sum(self, point_far_field, impedance, h):
        spec = spectrum_at(h, impedance)
        esm = esm_indicator(point_far_field, spec, 1e-13)
        reciprocal = 1.0 / regularized_indicator(point_far_field, spec, REG).value
        assert esm <= esm_bound_constant(spec, 1e-13) * reciprocal * (1.0 + 1e-10)

    def test_bound_constant_positive(self, impedance):
        assert esm_bound_constant(spectrum_at(2.0, impedance), 1e-10) > 0

    def test_empty_spectrum_bound(self, sound_soft):
        spec = spectrum_at(2.0, sound_soft, 5)
        spec.eigenvalues = np.zeros_like(spec.eigenvalues)
        assert esm_bound_constant(spec, 1e-10) == 0.0

    def test_alpha_checked(self, point_far_field, impedance):
        with pytest.raises(InputValidationError):
            esm_indicator(point_far_field, spectrum_at(2.0, impedance), -1.0)


@pytest.fixture(scope="module")
def impedance_disk_matrix():
    return multistatic_matrix(DiskScene((0.0, 0.0), 1.0, BoundaryCondition.impedance(1j)), K, 64)


class TestClassicalIndicators:
    @pytest.mark.parametrize("method", list(ClassicalMethod))
    def test_matches_analytic_picard_series(self, impedance_disk_matrix, impedance, method):
        system = classical_system(impedance_disk_matrix, K, method)
        for r in np.linspace(0.0, 0.8, 10):
            for angle in (0.0, 1.3, 2.9, 4.4, 5.5):
                z = (r * math.cos(angle), r * math.sin(angle))
                discrete = classical_indicator(None, z, K, system=system)
                exact = disk_picard_series(z, K, 1.0, impedance, method)
                assert discrete == pytest.approx(exact, rel=0.05)

    @pytest.mark.parametrize("method", ["quarterpower", "fsharp"])
    def test_inside_dominates_outside(self, impedance_disk_matrix, method):
        system = classical_system(impedance_disk_matrix, K, method)
        values = classical_values(system, np.array([[0.5, 0.0], [0.0, -0.5], [1.5, 0.0], [0.0, 1.5]]))
        assert min(values[:2]) > 100.0 * max(values[2:])

    def test_system_metadata(self, impedance_disk_matrix):
        system = classical_system(impedance_disk_matrix, K)
        assert system.quadrature_weight == pytest.approx(2 * math.pi / 64)
        assert system.method == "quarterpower"
        assert system.dropped > 0
        assert np.all(system.values > 1e-14 * system.values.max())

    def test_fsharp_values_non_negative(self, impedance_disk_matrix):
        system = classical_system(impedance_disk_matrix, K, ClassicalMethod.FSHARP)
        assert np.all(system.values > 0)

    def test_values_shape(self, impedance_disk_matrix):
        system = classical_system(impedance_disk_matrix, K)
        assert classical_values(system, np.zeros((3, 4, 2))).shape == (3, 4)

    def test_zero_matrix_is_degenerate(self):
        system = classical_system(np.zeros((32, 32)), K)
        assert system.values.size == 0
        assert classical_indicator(None, (0.0, 0.0), K, system=system) == SENTINEL

    def test_square_matrix_required(self):
        with pytest.raises(DimensionError):
            classical_system(np.ones((4, 3)), K)


class TestPrincipalPart:
    def test_formula(self):
        value = principal_part((0.3, 0.4), K, 1.0)
        assert value == pytest.approx(-math.sqrt(K / (8 * math.pi ** 3)) * math.log(0.75))

    def test_vanishes_at_centre_and_grows(self):
        assert principal_part((0.0, 0.0), K, 2.0) == 0.0
        values = [principal_part((r, 0.0), K, 2.0) for r in (0.2, 0.8, 1.4, 1.9)]
        assert values == sorted(values)

    def test_outside_rejected(self):
        with pytest.raises(InputValidationError):
            principal_part((1.0, 0.0), K, 1.0)


OFFSET = (0.6, -0.4)


@pytest.fixture(scope="module")
def offset_impedance_matrix():
    return multistatic_matrix(DiskScene(OFFSET, 1.0, BoundaryCondition.impedance(1j)), K, 64)


@pytest.fixture(scope="module")
def offset_sound_soft_matrix():
    return multistatic_matrix(DiskScene(OFFSET, 1.0, BoundaryCondition.sound_soft()), K, 64)


def around_offset(r, angle):
    return (OFFSET[0] + r * math.cos(angle), OFFSET[1] + r * math.sin(angle))


class TestClassicalOffCentre:
    def test_scatterer_not_imaged_at_its_mirror_point(self, impedance):
        matrix = multistatic_matrix(DiskScene((2.0, 0.0), 0.5, impedance), K, 128)
        system = classical_system(matrix, K)
        true_centre = classical_indicator(None, (2.0, 0.0), K, system=system)
        mirror = classical_indicator(None, (-2.0, 0.0), K, system=system)
        assert true_centre > 100.0 * mirror

    def test_matches_picard_series_of_shifted_disk(self, offset_impedance_matrix, impedance):
        system = classical_system(offset_impedance_matrix, K)
        for r in (0.0, 0.3, 0.6):
            for angle in (0.4, 2.2, 4.0):
                z = around_offset(r, angle)
                exact = disk_picard_series((z[0] - OFFSET[0], z[1] - OFFSET[1]), K, 1.0, impedance)
                assert classical_indicator(None, z, K, system=system) == pytest.approx(exact, rel=0.05)

    @pytest.mark.parametrize("angle", [0.0, 1.1, 2.5, 3.9, 5.2])
    def test_sound_soft_inside_dominates_outside(self, offset_sound_soft_matrix, angle):
        system = classical_system(offset_sound_soft_matrix, K, ClassicalMethod.QUARTER_POWER)
        inside = classical_indicator(None, around_offset(0.5, angle), K, system=system)
        outside = classical_indicator(None, around_offset(1.5, angle), K, system=system)
        assert inside > 100.0 * outside
