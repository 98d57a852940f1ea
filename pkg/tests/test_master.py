import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdilab import (
    NonPositiveR2,
    OscillatorBathModel,
    PreconditionFailure,
    WState,
    appendix2_bracket,
    appendix2_construct,
    constant_master_model,
    decompose,
    evolve_moments,
    fd17_residual,
    ladder_coefficients,
    lindblad39_residual,
    master_moments,
    preset_state,
    propagator_at,
    reference_moments,
    reversible_moments,
    solve_w,
    ullersma_master_model,
    uncertainty43_residual,
    w_from_ullersma,
    xy_quantities,
)
from fdilab.master import first_exponent_coefficient

from conftest import models, random_model

ZERO_W = WState(0.0, 0.0, 0.0, 0.0, 0.0)


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


class TestSolveW:
    def test_no_sources_stays_zero(self):
        mm = constant_master_model(b11=0.5, b12=0.1, b22=0.5)
        for w in solve_w(mm, np.linspace(0, 5, 6)):
            assert np.all(w.as_array() == 0.0)

    def test_constant_diffusion_integrates_linearly(self):
        ws = solve_w(constant_master_model(k1=0.3, k2=0.7), np.linspace(0, 4, 5))
        for w in ws:
            np.testing.assert_allclose(w.as_array(), [0.3 * w.t, 0.7 * w.t, 0, 0], atol=1e-12)

    def test_imaginary_k3_drives_w4(self):
        (w0, w1) = solve_w(constant_master_model(k3=0.25j), [0.0, 2.0], hbar=0.5)
        assert w1.w4 == pytest.approx(-4 * 0.5 * 0.25 * 2.0, rel=1e-12)

    def test_grid_must_start_at_zero(self):
        with pytest.raises(ValueError):
            solve_w(constant_master_model(), [1.0, 2.0])

    def test_ullersma_coefficients_reproduce_mapping(self, three_mode):
        d = decompose(three_mode)
        grid = np.linspace(0, 6, 13)
        for T in (0.0, 1.0):
            solved = solve_w(ullersma_master_model(d, T), grid, rtol=1e-12, atol=1e-14)
            for w in solved[1:]:
                mapped = w_from_ullersma(d, T, w.t)
                for a, b in zip(w.as_array(), mapped.as_array()):
                    assert rel(a, b) <= 1e-7

    def test_ullersma_k2_vanishes(self, three_mode_decomp):
        mm = ullersma_master_model(three_mode_decomp, 0.7)
        for t in (0.5, 2.0, 8.0):
            assert abs(mm.k2(t)) <= 1e-10 * max(1.0, abs(mm.k1(t)))


class TestUllersmaMapping:
    def test_uncoupled_all_zero(self, uncoupled):
        w = w_from_ullersma(decompose(uncoupled), 2.0, 5.0)
        assert np.all(w.as_array() == 0.0)

    def test_origin_all_zero(self, three_mode_decomp):
        assert np.all(w_from_ullersma(three_mode_decomp, 1.0, 0.0).as_array() == 0.0)

    def test_rejects_negative_r2(self):
        model = OscillatorBathModel(1.0, [2.2082746300273812], [2.2079993250762553])
        d = decompose(model)
        t = next(t for t in np.linspace(0, 40, 4001) if propagator_at(d, t).R2 <= 0)
        with pytest.raises(NonPositiveR2):
            w_from_ullersma(d, 1.0, t)

    @given(models(n_max=8), st.sampled_from([0.0, 0.1, 1.0, 10.0]), st.floats(0.01, 20.0))
    @settings(max_examples=60, deadline=None)
    def test_fd17_equals_scaled_lindblad_residual(self, model, T, t):
        d = decompose(model)
        R2 = propagator_at(d, t).R2
        if R2 <= 0:
            return
        w = w_from_ullersma(d, T, t)
        lhs, rhs = fd17_residual(d, T, t), 4 * R2**2 * lindblad39_residual(w)
        fs = xy_quantities(d, T, t)
        assert abs(lhs - rhs) <= 1e-10 * max(fs.scale, abs(lhs))


class TestMoments:
    def test_zero_w_leaves_state(self, three_mode):
        s = preset_state("squeezed(0.4, 1.1)", three_mode)
        assert master_moments(ZERO_W, s) == s
        assert lindblad39_residual(ZERO_W) == 0.0
        assert uncertainty43_residual(ZERO_W, s, s) == 0.0

    def test_reversible_identity_without_hamiltonian(self, three_mode):
        s = preset_state("coherent(0.3, 0.4)", three_mode)
        out = reversible_moments(constant_master_model(), s, [0.0, 3.0])
        np.testing.assert_allclose(out[-1].as_array(), s.as_array(), atol=1e-14)

    def test_free_hamiltonian_rotates(self):
        model = OscillatorBathModel(1.0)
        s = preset_state("coherent(1.0, 0.0)", model)
        out = reversible_moments(constant_master_model(b11=0.5, b22=0.5), s, [0.0, math.pi / 2])
        assert out[-1].mean_q == pytest.approx(0.0, abs=1e-10)
        assert out[-1].mean_p == pytest.approx(-1.0, abs=1e-10)

    def test_ullersma_hamiltonian_generates_reference_map(self, three_mode):
        d = decompose(three_mode)
        s = preset_state("squeezed(0.7, 0.2)", three_mode)
        grid = np.linspace(0, 4, 5)
        rev = reversible_moments(ullersma_master_model(d, 1.0), s, grid)
        for t, r in zip(grid, rev):
            np.testing.assert_allclose(r.as_array()[2:], reference_moments(d, s, t).as_array()[2:], rtol=1e-8)

    @pytest.mark.parametrize("spec", ["ground", "coherent(1.0, -0.5)", "squeezed(0.8, 0.3)", "thermal(0.5)"])
    def test_cross_route_agreement(self, spec):
        model = OscillatorBathModel(1.0, [1.6], [0.5])
        d = decompose(model)
        s = preset_state(spec, model)
        for T in (0.0, 1.0):
            for t in (0.5, 3.0, 9.0):
                direct = evolve_moments(d, T, s, t)
                via = master_moments(w_from_ullersma(d, T, t), reference_moments(d, s, t))
                for a, b in zip(direct.as_array(), via.as_array()):
                    assert rel(a, b) <= 1e-8 or abs(a - b) <= 1e-14

    def test_relations_hold_on_random_models(self, rng):
        for _ in range(5):
            d = decompose(random_model(rng, n_max=8))
            s = preset_state("squeezed(0.5, 0.7)", d.model)
            for T in (0.0, 2.0):
                for t in (0.4, 2.5, 7.0):
                    if propagator_at(d, t).R2 <= 0:
                        continue
                    w = w_from_ullersma(d, T, t)
                    ref = reference_moments(d, s, t)
                    ev = evolve_moments(d, T, s, t)
                    scale = max(1.0, w.w1 * w.w2, (math.expm1(w.w4) / 4) ** 2)
                    assert lindblad39_residual(w) >= -1e-10 * scale
                    assert uncertainty43_residual(w, ref, ev) >= -1e-10 * max(1.0, ev.qq * ev.pp)


class TestLadder:
    def test_commutator_normalized(self, rng):
        checked = 0
        for _ in range(6):
            d = decompose(random_model(rng, n_max=6))
            for T in (0.0, 1.0):
                for t in (0.6, 2.0, 5.0):
                    try:
                        lc = ladder_coefficients(d, T, t)
                    except PreconditionFailure:
                        continue
                    assert lc.commutator() == pytest.approx(1.0, abs=1e-10)
                    checked += 1
        assert checked > 10

    def test_determinant_identity(self, three_mode_decomp):
        # a b - Re(c)^2 = lambda^2 (XY - X_dot^2/4), lambda = ln R^2 / (2 hbar^2 (1 - R^2))
        for T, t in ((0.0, 1.5), (1.0, 4.0), (3.0, 9.0)):
            lc = ladder_coefficients(three_mode_decomp, T, t)
            fs = xy_quantities(three_mode_decomp, T, t)
            lam = math.log(fs.R2) / (2 * (1 - fs.R2))
            assert lc.a * lc.b - lc.c.real**2 == pytest.approx(lam**2 * fs.covariance_gap, rel=1e-9)
            assert lc.c.imag == pytest.approx(-0.5 * math.log(fs.R2) / 2, rel=1e-12)

    def test_uncoupled_rejected(self, uncoupled):
        with pytest.raises(PreconditionFailure):
            ladder_coefficients(decompose(uncoupled), 1.0, 2.0)

    @given(st.floats(0.05, 0.999), st.floats(0.1, 3.0))
    def test_first_exponent_vanishes_when_d_is_zero(self, R2, hbar):
        root = 0.5 * hbar * (1 - R2)
        assert first_exponent_coefficient(R2, root**2, hbar) == pytest.approx(0.0, abs=1e-12)

    def test_first_exponent_negative_when_d_positive(self):
        assert first_exponent_coefficient(0.5, 1.0) < 0


class TestAppendix2:
    def test_reference_numbers(self):
        (w,) = appendix2_construct(lambda t: 1.0, 1.0, [1.0])
        assert w.w1 * w.w2 == pytest.approx((math.e**2 - 1) / 16, rel=1e-14)
        assert w.w1 * w.w2 == pytest.approx(0.399316, abs=1e-6)
        assert lindblad39_residual(w) == pytest.approx(-((math.e - 1) / 4) ** 2, rel=1e-13)
        assert lindblad39_residual(w) == pytest.approx(-0.184531, abs=1e-6)

    @pytest.mark.parametrize("split", [0.3, 1.0, 4.0])
    @pytest.mark.parametrize("sign", [1, -1])
    def test_construction_properties(self, split, sign):
        grid = np.linspace(0, 5, 26)
        ws = appendix2_construct(lambda t: 0.7 * t, split, grid, 1.0, sign)
        assert np.all(ws[0].as_array() == 0.0)
        for w in ws[1:]:
            assert lindblad39_residual(w) < 0
            assert abs(appendix2_bracket(w)) <= 1e-12 * max(1.0, w.w1 * w.w2)
            assert math.copysign(1, w.w3) == sign

    def test_uncertainty_product_survives(self):
        model = OscillatorBathModel(1.0)
        grid = np.linspace(0, 4, 21)
        for spec in ("ground", "squeezed(0.9, 0.0)", "squeezed(0.9, 1.5)"):
            rev = reversible_moments(constant_master_model(b11=0.5, b22=0.5), preset_state(spec, model), grid)
            for split in (0.5, 2.0):
                for w, r in zip(appendix2_construct(lambda t: t, split, grid), rev):
                    m = master_moments(w, r)
                    assert m.qq * m.pp - 0.25 >= -1e-10

    @pytest.mark.parametrize("kwargs", [dict(split=0.0), dict(split=1.0, w3_sign=0)])
    def test_bad_arguments(self, kwargs):
        with pytest.raises(ValueError):
            appendix2_construct(lambda t: t, t_grid=[0.0], **kwargs)
