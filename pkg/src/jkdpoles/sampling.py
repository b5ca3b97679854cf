"""Interpolation nodes and the Ricker source that fixes the fitting band."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidRange
from .mpcore import as_precision

# Band used throughout: omega in [1e-3, 2e6] (s^-1).
DEFAULT_BAND = (1e-3, 2e6)
# Lower end that reproduces the published condition-number tables.
TABLE_BAND = (1e-2, 2e6)

SCHEMES = ("equal", "log")


@dataclass(frozen=True)
class SampleGrid:
    """Strictly increasing positive frequencies.

    ``omegas`` are doubles for convenience; :meth:`mp_omegas` regenerates the
    nodes from the endpoints at working precision so high-precision fits never
    inherit double rounding of interior nodes.
    """

    scheme: str
    M: int
    omega_min: float
    omega_max: float
    omegas: np.ndarray = field(repr=False, compare=False)

    def __len__(self):
        return self.M

    def mp_omegas(self, prec=None):
        prec = as_precision(prec)
        return _mp_nodes(self.scheme, self.M, repr(float(self.omega_min)), repr(float(self.omega_max)), prec.decimal_digits)

    def to_dict(self):
        return {"scheme": self.scheme, "M": self.M, "lo": self.omega_min, "hi": self.omega_max}


@lru_cache(maxsize=256)
def _mp_nodes(scheme, M, lo, hi, digits):
    prec = as_precision(digits)
    ctx = prec.ctx
    lo, hi = ctx.mpf(lo), ctx.mpf(hi)
    if scheme == "equal":
        nodes = [lo + (hi - lo) * k / (M - 1) for k in range(M)]
    else:
        ratio = hi / lo
        nodes = [lo * ratio ** (ctx.mpf(k) / (M - 1)) for k in range(M)]
    nodes[0], nodes[-1] = lo, hi
    return tuple(nodes)


def make_grid(scheme, M, omega_min=DEFAULT_BAND[0], omega_max=DEFAULT_BAND[1]) -> SampleGrid:
    """Equally spaced (``"equal"``) or geometric (``"log"``) nodes with exact endpoints."""
    if scheme not in SCHEMES:
        raise InvalidRange(f"unknown grid scheme {scheme!r}; expected one of {SCHEMES}")
    if int(M) != M or M < 2:
        raise InvalidRange(f"need at least 2 nodes, got M={M!r}")
    if not (0 < omega_min < omega_max) or not math.isfinite(omega_max):
        raise InvalidRange(f"need 0 < omega_min < omega_max, got ({omega_min!r}, {omega_max!r})")
    M = int(M)
    if scheme == "equal":
        omegas = np.linspace(omega_min, omega_max, M)
    else:
        omegas = np.geomspace(omega_min, omega_max, M)
    omegas[0], omegas[-1] = omega_min, omega_max
    if np.any(np.diff(omegas) <= 0):
        raise InvalidRange("nodes are not strictly increasing in double precision")
    omegas.setflags(write=False)
    return SampleGrid(scheme, M, float(omega_min), float(omega_max), omegas)


def parse_band(text):
    """``"lo:hi"`` to a float pair."""
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise InvalidRange(f"band must look like lo:hi, got {text!r}") from None
    if not 0 < lo < hi:
        raise InvalidRange(f"need 0 < lo < hi, got {text!r}")
    return lo, hi


@dataclass(frozen=True)
class RickerSource:
    f0: float = 1e5

    def __post_init__(self):
        if not self.f0 > 0:
            raise ValueError("f0 must be positive")

    @property
    def t0(self):
        return 1.0 / self.f0


def ricker_shape(src: RickerSource, t):
    """Untruncated Ricker formula (vectorized)."""
    t = np.asarray(t, dtype=float)
    arg = (math.pi * src.f0 * (t - src.t0)) ** 2
    return (2 * arg - 1) * np.exp(-arg)


def ricker(src: RickerSource, t):
    """Ricker pulse on ``[0, 2*t0]``, zero elsewhere.

    The window is taken as printed, so the pulse jumps by about 9.7e-4 at both
    ends of its support.
    """
    t_arr = np.asarray(t, dtype=float)
    inside = (t_arr >= 0) & (t_arr <= 2 * src.t0)
    out = np.where(inside, ricker_shape(src, t_arr), 0.0)
    return float(out) if np.ndim(t) == 0 else out


def _gauss_legendre_panels(a, b, panels, order):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def ricker_spectrum(src: RickerSource, omegas, panels=64, order=16):
    """Fourier transform ``F(omega) = int g(t) exp(-i omega t) dt`` of the truncated pulse.

    Composite Gauss-Legendre over the support ``[0, 2*t0]``.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    t, w = _gauss_legendre_panels(0.0, 2 * src.t0, panels, order)
    g = ricker_shape(src, t)
    phase = np.exp(-1j * np.outer(omegas, t))
    return phase @ (w * g)
