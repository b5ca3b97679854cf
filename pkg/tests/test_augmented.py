import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jkdpoles import augmented as aug
from jkdpoles.fit_stieltjes import fit_stieltjes
from jkdpoles.material import BUILTIN, derived_constants, jkd_tortuosity
from jkdpoles.model import PoleResidueModel
from jkdpoles.sampling import RickerSource, make_grid

S1, S2 = BUILTIN["S1"], BUILTIN["S2"]


@pytest.fixture(scope="module")
def s2_model():
    return fit_stieltjes(S2, make_grid("log", 10), 10, 90, conditioning=False, rel_err=False)[0]


def _single(p, r, alpha=1.0):
    return PoleResidueModel(alpha_inf=alpha, poles=(p,), residues=(r,))


class TestCoefficients:
    def test_zero_residues(self):
        model = PoleResidueModel(alpha_inf=1.1, poles=(-1.0, -2.0), residues=(0.0, 0.0))
        c = aug.augmented_coefficients(model, S1)
        assert c.damping == S1.eta / S1.K0
        assert c.inertial == S1.rho_f * 1.1 / S1.phi

    def test_s1_identity(self):
        model, _ = fit_stieltjes(S1, make_grid("log", 14), 14, 140, conditioning=False, rel_err=False)
        c = aug.augmented_coefficients(model, S1)
        a = derived_constants(S1).a
        total = float(sum(model.residues))
        assert c.M == 14
        assert total > 0
        assert math.isclose(c.damping * S1.phi / S1.rho_f - a, total, rel_tol=1e-12)
        assert c.damping > S1.eta / S1.K0
        assert all(p < 0 and w > 0 for p, w in c.theta_couplings)


class TestStep:
    def test_constant_input(self):
        state = aug.ThetaState.zeros(1)
        n = 1000
        for _ in range(n):
            state = aug.step_theta(state, 1.0, 1.0, 1.0 / n, [-2.0])
        assert math.isclose(state.t, 1.0, rel_tol=1e-12)
        assert math.isclose(state.theta[0], 1 - math.exp(-2), rel_tol=1e-13)
        assert math.isclose(state.theta[0], 0.8647, abs_tol=1e-4)

    def test_zero_input(self):
        state = aug.ThetaState.zeros(3)
        for _ in range(10):
            state = aug.step_theta(state, 0.0, 0.0, 0.1, [-1.0, -10.0, -1e6])
        assert np.all(state.theta == 0)

    def test_vanishing_pole(self):
        state = aug.ThetaState.zeros(1)
        for q in np.linspace(0, 5, 20):
            state = aug.step_theta(state, q, q + 0.1, 0.1, [0.0])
        assert state.theta[0] == 0

    def test_dt_positive(self):
        with pytest.raises(ValueError):
            aug.step_theta(aug.ThetaState.zeros(1), 0.0, 0.0, 0.0, [-1.0])

    def test_exact_for_linear_input(self):
        # q(t) = t: Theta(t) = t - (1 - exp(p t))/(-p)
        p, dt, n = -3.0, 0.05, 40
        state = aug.ThetaState.zeros(1)
        for k in range(n):
            state = aug.step_theta(state, k * dt, (k + 1) * dt, dt, [p])
        t = n * dt
        assert math.isclose(state.theta[0], t - (1 - math.exp(p * t)) / -p, rel_tol=1e-13)

    def test_trajectory_matches_stepping(self, s2_model):
        q = aug.ricker_signal(RickerSource(1e5), 1e-8, 2e-5)
        t, theta = aug.theta_trajectory(q, s2_model.poles_array)
        right, left = q.one_sided()
        state = aug.ThetaState.zeros(s2_model.M)
        for k in range(q.n_steps):
            state = aug.step_theta(state, right[k], left[k + 1], q.dt, s2_model.poles_array)
        assert np.allclose(theta[-1], state.theta, rtol=1e-12, atol=1e-300)

    @given(st.floats(-1e8, -1e-3), st.integers(0, 2**32 - 1))
    def test_bounded_by_input(self, p, seed):
        rng = np.random.default_rng(seed)
        values = rng.uniform(-1, 1, 200)
        q = aug.ScalarSignal(lambda t: np.interp(t, np.arange(200) * 1e-3, values), 1e-3, 0.199)
        _, theta = aug.theta_trajectory(q, [p])
        assert np.max(np.abs(theta)) <= 1 + 1e-12


class TestSignal:
    def test_causality_enforced(self):
        with pytest.raises(ValueError):
            aug.ScalarSignal(lambda t: t, 1e-3, 1.0, t_on=-1.0)
        with pytest.raises(ValueError):
            aug.ScalarSignal(lambda t: t, 0.0, 1.0)

    def test_one_sided_limits_at_window_edges(self):
        src = RickerSource(1e5)
        q = aug.ricker_signal(src, 1e-6, 3e-5)
        right, left = q.one_sided()
        assert left[0] == 0 and math.isclose(right[0], 9.6925e-4, rel_tol=1e-4)
        k = 20
        assert right[k] == 0 and math.isclose(left[k], right[0], rel_tol=1e-9)


class TestOracle:
    def test_single_pole_constant(self):
        q = aug.constant_signal(1.0, 1e-3, 1.0)
        assert math.isclose(aug.convolution_oracle(q, [-2.0], [1.0], 1.0), 1 - math.exp(-2), rel_tol=1e-12)

    def test_linear_in_residues(self):
        q = aug.ricker_signal(RickerSource(1e5), 1e-8, 2e-5)
        a = aug.convolution_oracle(q, [-1e6, -3e7], [2.0, 5.0], 1.3e-5)
        b = aug.convolution_oracle(q, [-1e6, -3e7], [6.0, 15.0], 1.3e-5)
        assert math.isclose(b, 3 * a, rel_tol=1e-12)

    def test_ricker_s1_model(self):
        model, _ = fit_stieltjes(S1, make_grid("log", 10), 10, 90, conditioning=False, rel_err=False)
        q = aug.ricker_signal(RickerSource(1e5), 2.5e-10, 2e-5)
        rows = aug.kernel_verification(model, S1, q, sample_every=2000)
        assert rows[:, 3].max() / np.abs(rows[:, 2]).max() <= 1e-8

    def test_second_order_in_sampling(self, s2_model):
        errs = []
        for dt in (4e-9, 2e-9):
            q = aug.ricker_signal(RickerSource(1e5), dt, 2e-5)
            rows = aug.kernel_verification(s2_model, S2, q, sample_every=int(round(4e-7 / dt)))
            errs.append(rows[:, 3].max())
        assert 3.5 < errs[0] / errs[1] < 4.5


class TestMemoryTerm:
    def test_zero_input(self, s2_model):
        q = aug.constant_signal(0.0, 1e-8, 1e-6)
        _, values = aug.memory_term(q, s2_model, S2)
        assert np.all(values == 0)

    def test_single_pole_constant(self):
        p, r = -5e5, 3e5
        model = _single(p, r, alpha=S2.alpha_inf)
        q = aug.constant_signal(1.0, 1e-8, 1e-5)
        a = derived_constants(S2).a
        for t in (2e-6, 5e-6):
            assert math.isclose(aug.memory_term(q, model, S2, t), a + r * math.exp(p * t), rel_tol=1e-10)
        steady = aug.constant_signal(1.0, 1e-7, 1e-4)
        assert math.isclose(aug.memory_term(steady, model, S2, 1e-4), a, rel_tol=1e-12)

    def test_off_grid_time(self):
        q = aug.constant_signal(1.0, 1e-3, 1.0)
        with pytest.raises(ValueError):
            aug.memory_term(q, _single(-1.0, 1.0), S1, 0.0005)

    def test_transfer_ratio(self, s2_model):
        # windowed exp(-i omega t): memory / q' tends to the fitted tortuosity
        w, dt, T = 2e5, 1e-9, 6e-5
        parts = []
        for shape in (lambda t: np.cos(w * t), lambda t: np.sin(w * t)):
            q = aug.ScalarSignal(shape, dt, T)
            parts.append(aug.memory_term(q, s2_model, S2, T - 100 * dt))
        t = T - 100 * dt
        memory = parts[0] - 1j * parts[1]
        dq = -1j * w * np.exp(-1j * w * t)
        s = -1j * w
        fitted = s2_model(s) + derived_constants(S2).a / s
        assert abs(memory / dq - fitted) < 1e-5 * abs(fitted)
        assert abs(memory / dq - complex(jkd_tortuosity(S2, w))) < 1e-3 * abs(fitted)
