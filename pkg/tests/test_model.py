import json

import numpy as np
import pytest
from hypothesis import given, settings
from scipy.integrate import quad

from fdilab import (
    ConfigError,
    DrudeBathRecipe,
    OscillatorBathModel,
    PositivityViolation,
    discretize_drude,
    model_from_dict,
    model_hash,
    model_to_dict,
    validate_model,
)
from fdilab.model import drude_ullersma_strength

from conftest import models


class TestValidateModel:
    def test_uncoupled_is_valid(self):
        assert validate_model(OscillatorBathModel(1.0)) == []

    def test_overcoupled_reports_violation(self):
        report = validate_model(OscillatorBathModel(1.0, [1.0], [1.01]))
        assert len(report) == 1
        assert report[0].name == "positive_definite"
        assert report[0].slack == pytest.approx(1 - 1.0201, abs=1e-12)

    def test_slack_of_valid_model(self, one_mode):
        assert validate_model(one_mode) == []
        assert 1.0 - one_mode.coupling_sum == pytest.approx(0.9375, abs=1e-15)

    @pytest.mark.parametrize(
        "kwargs, name",
        [
            (dict(omega0=0.0), "omega0_positive"),
            (dict(omega0=1.0, bath_omegas=[1.0, 2.0], bath_epsilons=[0.1]), "bath_lengths"),
            (dict(omega0=1.0, bath_omegas=[-1.0], bath_epsilons=[0.1]), "bath_omegas_positive"),
            (dict(omega0=1.0, bath_omegas=[1.0], bath_epsilons=[np.nan]), "couplings_finite"),
            (dict(omega0=1.0, hbar=0.0), "hbar_positive"),
        ],
    )
    def test_each_invariant_is_named(self, kwargs, name):
        names = [v.name for v in validate_model(OscillatorBathModel(**kwargs))]
        assert name in names

    def test_never_raises_on_garbage(self):
        class Junk:
            omega0 = "x"
            bath_omegas = bath_epsilons = []

        assert validate_model(Junk())[0].name == "types"

    @given(models())
    @settings(max_examples=40, deadline=None)
    def test_generated_models_are_valid(self, model):
        assert validate_model(model) == []
        assert np.all(np.linalg.eigvalsh(model.potential_matrix()) > 0)


class TestModelBasics:
    def test_arrays_are_read_only(self, three_mode):
        with pytest.raises(ValueError):
            three_mode.bath_omegas[0] = 5.0

    def test_potential_matrix_layout(self, three_mode):
        V = three_mode.potential_matrix()
        assert V[0, 0] == 1.0
        np.testing.assert_array_equal(np.diag(V)[1:], three_mode.bath_omegas**2)
        np.testing.assert_array_equal(V[0, 1:], three_mode.bath_epsilons)
        np.testing.assert_array_equal(V, V.T)

    def test_uncoupled_flags(self, uncoupled, three_mode):
        assert uncoupled.is_uncoupled and uncoupled.n_modes == 0
        assert not three_mode.is_uncoupled
        assert OscillatorBathModel(1.0, [1.0, 2.0], [0.0, 0.0]).is_uncoupled


class TestDrude:
    def test_zero_strength_gives_zero_couplings(self):
        model = discretize_drude(DrudeBathRecipe(0.0, 1.0, 10.0, 50))
        assert np.all(model.bath_epsilons == 0.0)

    def test_reference_recipe_matches_direct_sum(self):
        recipe = DrudeBathRecipe(0.1, 1.0, 10.0, 100)
        model = discretize_drude(recipe)
        assert validate_model(model) == []
        d = 10.0 / 100
        w = (np.arange(1, 101) - 0.5) * d
        direct = np.sum(drude_ullersma_strength(w, 0.1, 1.0) * d / w**2)
        assert model.coupling_sum == pytest.approx(direct, rel=1e-13)

    def test_refinement_converges(self):
        sums = [discretize_drude(DrudeBathRecipe(0.1, 1.0, 10.0, n)).coupling_sum for n in (400, 800)]
        assert abs(sums[1] - sums[0]) / sums[1] < 0.01
        exact = quad(lambda w: drude_ullersma_strength(w, 0.1, 1.0) / w**2, 0, 10)[0]
        assert sums[1] == pytest.approx(exact, rel=1e-4)

    def test_continuum_integral_closed_form(self):
        exact = (2 / np.pi) * 0.1 * 1.0 * np.arctan(10.0)
        integral = quad(lambda w: drude_ullersma_strength(w, 0.1, 1.0) / w**2, 0, 10)[0]
        assert integral == pytest.approx(exact, rel=1e-12)

    def test_weak_coupling_flag(self):
        assert DrudeBathRecipe(0.1, 1.0, 10.0, 10).weak_coupling_regime
        assert not DrudeBathRecipe(0.5, 1.0, 10.0, 10).weak_coupling_regime

    @pytest.mark.parametrize("args", [(-0.1, 1.0, 10.0, 10), (0.1, 0.0, 10.0, 10),
                                      (0.1, 1.0, -1.0, 10), (0.1, 1.0, 10.0, 0)])
    def test_bad_recipe(self, args):
        with pytest.raises(ValueError):
            DrudeBathRecipe(*args)

    def test_overstrong_recipe_rejected(self):
        with pytest.raises(PositivityViolation):
            discretize_drude(DrudeBathRecipe(5.0, 1.0, 10.0, 50), omega0=0.5)


class TestSerialization:
    def test_round_trip(self, three_mode):
        doc = json.loads(json.dumps(model_to_dict(three_mode)))
        again = model_from_dict(doc)
        np.testing.assert_array_equal(again.bath_omegas, three_mode.bath_omegas)
        assert model_hash(again) == model_hash(three_mode)

    def test_hash_distinguishes_models(self, three_mode, one_mode):
        assert model_hash(three_mode) != model_hash(one_mode)
        assert len(model_hash(one_mode)) == 12

    def test_drude_document(self):
        doc = {"omega0": 1.0, "drude": {"gamma": 0.1, "alpha": 1.0, "omega_max": 10.0, "n_modes": 20}}
        assert model_from_dict(doc).n_modes == 20

    @pytest.mark.parametrize(
        "doc",
        [
            {"omega0": 1.0, "colour": "red"},
            {"omega0": 1.0, "omegas": [1.0], "epsilons": [1.5]},
            {"omega0": 1.0, "omegas": [1.0], "epsilons": [0.1],
             "drude": {"gamma": 0.1, "alpha": 1, "omega_max": 1, "n_modes": 2}},
            {"omega0": 1.0, "drude": {"gamma": 0.1}},
            [1, 2],
        ],
    )
    def test_bad_documents(self, doc):
        with pytest.raises(ConfigError):
            model_from_dict(doc)
