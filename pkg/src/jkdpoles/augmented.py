"""Coefficients of the augmented Biot-JKD system and the memory-term check.

The convolution ``(-p_k) exp(p_k t) * q`` is replaced by auxiliary variables
obeying ``dTheta_k/dt = p_k Theta_k - p_k q``. This module advances those ODEs
with an exact exponential step and compares them against direct quadrature of
the convolution.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from . import kernels
from .material import MaterialParams, derived_constants
from .model import PoleResidueModel
from .sampling import RickerSource, ricker_shape


@dataclass(frozen=True)
class AugmentedCoefficients:
    inertial: float
    damping: float
    theta_couplings: tuple

    @property
    def M(self):
        return len(self.theta_couplings)


def augmented_coefficients(model: PoleResidueModel, m: MaterialParams) -> AugmentedCoefficients:
    """Inertial term ``rho_f alpha_inf/phi``, damping ``eta/K0 + (rho_f/phi) sum r_k``
    and per-pole couplings ``(p_k, (rho_f/phi) r_k)``."""
    scale = m.rho_f / m.phi
    residues = model.residues_array
    return AugmentedCoefficients(
        inertial=scale * float(model.alpha_inf),
        damping=m.eta / m.K0 + scale * float(residues.sum()),
        theta_couplings=tuple((float(p), scale * float(r)) for p, r in zip(model.poles_array, residues)),
    )


@dataclass(frozen=True)
class ScalarSignal:
    """Causal input ``q(t) = shape(t)`` on ``[t_on, t_off]`` and zero elsewhere.

    ``q`` vanishes for ``t < 0`` (so ``q(0-) = 0``); jumps are allowed only at
    the window edges, where the time stepping uses one-sided limits.
    """

    shape: Callable
    dt: float
    duration: float
    t_on: float = 0.0
    t_off: float = math.inf

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.duration > 0:
            raise ValueError("duration must be positive")
        if self.t_on < 0:
            raise ValueError("signal must be causal: t_on >= 0 so that q(0-) = 0")
        if not self.t_off > self.t_on:
            raise ValueError("t_off must exceed t_on")

    @property
    def n_steps(self):
        return int(round(self.duration / self.dt))

    @property
    def times(self):
        return np.arange(self.n_steps + 1) * self.dt

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= self.t_on) & (t <= self.t_off)
        return np.where(inside, self.shape(t), 0.0)

    def one_sided(self):
        """Right and left limits of ``q`` at every grid time."""
        t = self.times
        tol = 1e-9 * self.dt
        val = np.asarray(self.shape(t), dtype=float) * np.ones_like(t)
        right = np.where((t >= self.t_on - tol) & (t < self.t_off - tol), val, 0.0)
        left = np.where((t > self.t_on + tol) & (t <= self.t_off + tol), val, 0.0)
        return right, left


def ricker_signal(src: RickerSource, dt, duration) -> ScalarSignal:
    return ScalarSignal(lambda t: ricker_shape(src, t), dt, duration, 0.0, 2 * src.t0)


def constant_signal(value, dt, duration) -> ScalarSignal:
    return ScalarSignal(lambda t: np.full(np.shape(t), float(value)), dt, duration)


@dataclass(frozen=True)
class ThetaState:
    theta: np.ndarray
    t: float = 0.0

    @classmethod
    def zeros(cls, M):
        return cls(np.zeros(M), 0.0)


def step_theta(state: ThetaState, q_now, q_next, dt, poles) -> ThetaState:
    """Advance every ``Theta_k`` by one exact exponential step, ``q`` linear on the step."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    E, A, B = kernels.step_coefficients(np.atleast_1d(poles), dt)
    theta = E * state.theta + A * q_now + B * (q_next - q_now)
    return ThetaState(theta, state.t + dt)


def theta_trajectory(q: ScalarSignal, poles):
    """``(times, Theta)`` with ``Theta[n, k]`` the k-th auxiliary variable at step n."""
    right, left = q.one_sided()
    return q.times, kernels.theta_trajectory(np.atleast_1d(poles), q.dt, right, left)


def weighted_theta_sum(q: ScalarSignal, model: PoleResidueModel, m: MaterialParams):
    """``sum_k (rho_f/phi) r_k Theta_k`` along the time grid."""
    t, theta = theta_trajectory(q, model.poles_array)
    return t, theta @ ((m.rho_f / m.phi) * model.residues_array)


def _kernel_convolution(q: ScalarSignal, p, t):
    # int_0^t exp(p tau) q(t - tau) d tau over the support of q
    lo = max(0.0, t - q.t_off)
    hi = t - q.t_on
    if hi <= lo:
        return 0.0
    # beyond 60/|p| the kernel is below exp(-60)
    if p < 0:
        hi = min(hi, lo + 60.0 / -p) if lo > 0 else min(hi, 60.0 / -p)
    f = lambda tau: math.exp(p * tau) * float(q.shape(t - tau))
    width = hi - lo
    pts = None
    if p < 0 and width * -p > 2:
        pts = [lo + k / -p for k in (0.5, 2, 8, 24) if lo + k / -p < hi]
    with warnings.catch_warnings():
        # near zero crossings of the integral the relative target is unreachable
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(f, lo, hi, points=pts, epsabs=0.0, epsrel=1e-13, limit=500)
    return val


def convolution_oracle(q: ScalarSignal, poles, residues, t):
    """``sum_k r_k (-p_k) int_0^t exp(p_k tau) q(t - tau) d tau`` by adaptive quadrature."""
    return sum(float(r) * -float(p) * _kernel_convolution(q, float(p), float(t)) for p, r in zip(poles, residues))


def memory_term(q: ScalarSignal, model: PoleResidueModel, m: MaterialParams, t=None):
    """Approximated memory term ``alpha_inf q' + (a + sum r) q - sum r_k Theta_k``.

    ``q'`` uses central differences at ``q.dt`` (one-sided at the ends). Returns
    the value at time ``t`` or, with ``t=None``, ``(times, values)`` along the grid.
    """
    a = derived_constants(m).a
    times, theta = theta_trajectory(q, model.poles_array)
    r = model.residues_array
    right, left = q.one_sided()
    qv = 0.5 * (right + left)
    dq = np.gradient(qv, q.dt)
    values = float(model.alpha_inf) * dq + (a + r.sum()) * qv - theta @ r
    if t is None:
        return times, values
    idx = int(round(t / q.dt))
    if not 0 <= idx < len(times) or abs(idx * q.dt - t) > 1e-9 * q.dt + 1e-15:
        raise ValueError(f"t={t!r} is not on the signal's time grid")
    return float(values[idx])


def kernel_verification(model: PoleResidueModel, m: MaterialParams, q: ScalarSignal, sample_every=100):
    """Rows ``(t, theta_sum, oracle, abs_diff)`` comparing ODE stepping with quadrature.

    ``theta_sum`` is ``sum (rho_f/phi) r_k Theta_k``; the oracle is scaled the
    same way. Every ``sample_every``-th grid time is checked.
    """
    t, ts = weighted_theta_sum(q, model, m)
    scale = m.rho_f / m.phi
    idx = np.arange(0, len(t), sample_every)
    oracle = np.array([scale * convolution_oracle(q, model.poles_array, model.residues_array, t[i]) for i in idx])
    return np.column_stack([t[idx], ts[idx], oracle, np.abs(ts[idx] - oracle)])
