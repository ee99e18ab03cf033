"""Source sampling, mixing, and the named presets."""
import numpy as np
import pytest

from unmix import DataError, DimensionError, SingularMatrixError
from unmix import SourceSpec, generate, mix, multi_information, preset, sample_sources
from unmix.synth import condition_number


class TestSourceSpec:
    def test_variances_closed_form(self):
        spec = SourceSpec((
            ("gaussian", 2.0),
            ("laplacian", 1.0),
            ("gaussian_mixture", 2.0, 0.5),
            ("uniform", 3.0),
        ))
        np.testing.assert_allclose(spec.variances(), [4.0, 2.0, 4.25, 3.0])

    def test_invalid_sigma(self):
        with pytest.raises(DataError):
            SourceSpec((("gaussian", 0.0),))

    def test_unknown_kind(self):
        with pytest.raises(DataError):
            SourceSpec((("cauchy", 1.0),))

    def test_wrong_arity(self):
        with pytest.raises(DataError):
            SourceSpec((("gaussian_mixture", 2.0),))


class TestSampleSources:
    def test_gaussian_statistics(self):
        spec = SourceSpec((("gaussian", 1.0), ("gaussian", 1.0)))
        s = sample_sources(spec, n=100_000, seed=3)
        assert abs(s[:, 0].mean()) < 0.01 and abs(s[:, 1].mean()) < 0.01
        assert s[:, 0].var() == pytest.approx(1.0, abs=0.02)
        assert s[:, 1].var() == pytest.approx(1.0, abs=0.02)
        cross = float(np.mean(s[:, 0] * s[:, 1]))
        assert abs(cross) < 0.01

    def test_mixture_variance_closed_form(self):
        spec = SourceSpec((("gaussian_mixture", 2.0, 0.5),))
        s = sample_sources(spec, n=100_000, seed=5)
        assert s[:, 0].var() == pytest.approx(4.25, rel=0.02)

    def test_uniform_and_laplacian_variances(self):
        spec = SourceSpec((("uniform", 1.0), ("laplacian", 1.0)))
        s = sample_sources(spec, n=100_000, seed=6)
        assert s[:, 0].var() == pytest.approx(1.0 / 3.0, rel=0.02)
        assert s[:, 1].var() == pytest.approx(2.0, rel=0.02)

    def test_same_seed_is_bit_exact(self):
        spec = SourceSpec((("laplacian", 1.0), ("gaussian", 1.0)))
        a = sample_sources(spec, n=1_000, seed=42)
        b = sample_sources(spec, n=1_000, seed=42)
        np.testing.assert_array_equal(a, b)

    def test_different_seeds_differ(self):
        spec = SourceSpec((("gaussian", 1.0),))
        a = sample_sources(spec, n=100, seed=0)
        b = sample_sources(spec, n=100, seed=1)
        assert not np.array_equal(a, b)


class TestMix:
    def test_identity(self):
        s = np.random.default_rng(0).normal(size=(50, 2))
        np.testing.assert_array_equal(mix(s, np.eye(2)), s)

    def test_columns_are_weighted_sums(self):
        s = np.random.default_rng(1).normal(size=(200, 2))
        a = np.array([[1.0, 0.3], [0.3, 1.0]])
        x = mix(s, a)
        np.testing.assert_allclose(x[:, 0], s[:, 0] + 0.3 * s[:, 1])
        np.testing.assert_allclose(x[:, 1], 0.3 * s[:, 0] + s[:, 1])

    def test_covariance_transforms_as_a_cov_at(self):
        rng = np.random.default_rng(2)
        s = rng.normal(size=(100_000, 2))
        a = np.array([[1.0, 0.4], [0.1, 0.8]])
        x = mix(s, a)
        cov_x = (x - x.mean(0)).T @ (x - x.mean(0)) / len(x)
        np.testing.assert_allclose(cov_x, a @ np.eye(2) @ a.T, atol=0.05)

    def test_exactly_linear(self):
        rng = np.random.default_rng(3)
        s1, s2 = rng.normal(size=(30, 2)), rng.normal(size=(30, 2))
        a = np.array([[1.0, 0.2], [0.5, 1.0]])
        alpha, beta = 2.0, -0.5
        np.testing.assert_allclose(
            mix(alpha * s1 + beta * s2, a),
            alpha * mix(s1, a) + beta * mix(s2, a),
            rtol=1e-12, atol=1e-14,
        )

    def test_singular_mixing_rejected(self):
        s = np.random.default_rng(0).normal(size=(50, 2))
        with pytest.raises(SingularMatrixError):
            mix(s, np.array([[1.0, 2.0], [2.0, 4.0]]))

    def test_non_square_rejected(self):
        s = np.random.default_rng(0).normal(size=(50, 2))
        with pytest.raises(DimensionError):
            mix(s, np.ones((3, 2)))


class TestPresets:
    def test_unknown_name(self):
        with pytest.raises(DataError, match="unknown preset"):
            preset("cocktail")

    def test_x_formation_columns_unit_length_non_orthogonal(self):
        spec, a = preset("x_formation")
        assert spec.dimensions == (("laplacian", 1.0), ("laplacian", 1.0))
        np.testing.assert_allclose(np.sqrt((a * a).sum(axis=0)), [1.0, 1.0])
        assert abs(float(a[:, 0] @ a[:, 1])) > 0.1  # ICs deliberately not orthogonal

    def test_gaussian_isotropic(self):
        spec, a = preset("gaussian_isotropic")
        assert spec.dimensions == (("gaussian", 1.0), ("gaussian", 1.0))
        np.testing.assert_array_equal(a, np.eye(2))

    def test_bimodal_mixing_geometry(self):
        # cov(x) must come out diagonal with distinct entries so whitening
        # leaves a pure 45-degree rotation
        spec, a = preset("bimodal_unimodal")
        cov = a @ np.diag(spec.variances()) @ a.T
        np.testing.assert_allclose(cov, np.diag([2.0, 0.5]), atol=1e-12)

    @pytest.mark.parametrize("name", ["x_formation", "bimodal_unimodal", "gaussian_isotropic"])
    def test_condition_numbers_modest(self, name):
        _, a = preset(name)
        assert condition_number(a) < 100.0

    @pytest.mark.parametrize("name", ["x_formation", "bimodal_unimodal", "gaussian_isotropic"])
    def test_sampled_sources_are_independent(self, name):
        spec, _ = preset(name)
        s = sample_sources(spec, n=20_000, seed=11)
        assert abs(multi_information(s, k=3).bits) <= 0.1


class TestGenerate:
    def test_observed_equals_sources_through_mixing(self):
        spec, a = preset("x_formation")
        ds = generate(spec, a, n=500, seed=9)
        np.testing.assert_array_equal(ds.observed, ds.sources @ a.T)
        assert ds.seed == 9
        assert ds.spec == spec
