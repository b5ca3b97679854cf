"""Double-precision hot loops: model evaluation and the auxiliary-ODE recursion.

Each kernel has a numba implementation and a pure-numpy one with identical
semantics. The public names dispatch on :data:`jkdpoles._accel.USE_NUMBA`.
"""

import numpy as np

from . import _accel


def step_coefficients(poles, dt):
    """Per-pole weights of the exact exponential step for piecewise-linear input.

    ``theta_next = E*theta + A*q_now + B*(q_next - q_now)`` with ``z = p*dt``,
    ``E = exp(z)``, ``A = 1 - exp(z)``, ``B = (1 + z - exp(z))/z``.
    """
    z = np.asarray(poles, dtype=float) * dt
    em1 = np.expm1(z)
    E = em1 + 1.0
    A = -em1
    B = np.empty_like(z)
    small = np.abs(z) < 1e-3
    zs = z[small]
    B[small] = -zs / 2 - zs**2 / 6 - zs**3 / 24 - zs**4 / 120
    zb = z[~small]
    B[~small] = (zb - em1[~small]) / zb
    return E, A, B


def theta_recursion_numpy(E, A, B, q_right, q_left):
    n = q_right.shape[0]
    out = np.zeros((n, E.shape[0]))
    theta = np.zeros(E.shape[0])
    for k in range(n - 1):
        q0 = q_right[k]
        theta = E * theta + A * q0 + B * (q_left[k + 1] - q0)
        out[k + 1] = theta
    return out


def _theta_recursion_loops(E, A, B, q_right, q_left):
    n = q_right.shape[0]
    m = E.shape[0]
    out = np.zeros((n, m))
    for j in range(m):
        th = 0.0
        e, a, b = E[j], A[j], B[j]
        for k in range(n - 1):
            q0 = q_right[k]
            th = e * th + a * q0 + b * (q_left[k + 1] - q0)
            out[k + 1, j] = th
    return out


def eval_model_numpy(alpha_inf, poles, residues, s):
    s = np.asarray(s, dtype=np.complex128)
    return alpha_inf + (residues[None, :] / (s.reshape(-1, 1) - poles[None, :])).sum(axis=1).reshape(s.shape)


def _eval_model_loops(alpha_inf, poles, residues, s):
    out = np.empty(s.shape[0], dtype=np.complex128)
    for i in range(s.shape[0]):
        acc = 0.0 + 0.0j
        for k in range(poles.shape[0]):
            acc += residues[k] / (s[i] - poles[k])
        out[i] = alpha_inf + acc
    return out


if _accel.USE_NUMBA:
    theta_recursion_numba = _accel.njit(_theta_recursion_loops)
    _eval_model_numba = _accel.njit(_eval_model_loops)

    def eval_model_numba(alpha_inf, poles, residues, s):
        s = np.asarray(s, dtype=np.complex128)
        flat = np.ascontiguousarray(s.ravel())
        return _eval_model_numba(float(alpha_inf), poles, residues, flat).reshape(s.shape)

    theta_recursion = theta_recursion_numba
    _eval_impl = eval_model_numba
else:
    theta_recursion_numba = None
    eval_model_numba = None
    theta_recursion = theta_recursion_numpy
    _eval_impl = eval_model_numpy


def eval_model(alpha_inf, poles, residues, s):
    """``alpha_inf + sum(r_k / (s - p_k))`` in double precision."""
    poles = np.ascontiguousarray(poles, dtype=float)
    residues = np.ascontiguousarray(residues, dtype=float)
    return _eval_impl(alpha_inf, poles, residues, s)


def theta_trajectory(poles, dt, q_right, q_left):
    """Auxiliary variables at every grid time for sampled one-sided input values."""
    E, A, B = step_coefficients(poles, dt)
    q_right = np.ascontiguousarray(q_right, dtype=float)
    q_left = np.ascontiguousarray(q_left, dtype=float)
    return theta_recursion(E, A, B, q_right, q_left)
