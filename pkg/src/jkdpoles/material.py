"""JKD tortuosity, its Stieltjes part D(s), and the poroelastic moduli.

All physical quantities are SI. The Laplace variable is ``s = -i*omega`` and
``omega`` is used as given (no Hz to rad/s conversion).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BranchCutEvaluation, DegenerateModulus, ParseError, UnknownMaterial
from .mpcore import as_precision


@dataclass(frozen=True)
class MaterialParams:
    """JKD parameters of one principal direction."""

    rho_f: float
    phi: float
    alpha_inf: float
    K0: float
    nu: float
    Lambda: float
    label: str = ""

    def __post_init__(self):
        for name in ("rho_f", "phi", "alpha_inf", "K0", "nu", "Lambda"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value!r}")
        if not self.phi < 1:
            raise ValueError(f"phi must lie in (0, 1), got {self.phi!r}")

    @property
    def eta(self):
        return self.rho_f * self.nu


@dataclass(frozen=True)
class DerivedConstants:
    eta: float
    a: float
    C1: float
    D_at_zero: float
    D_at_inf: float


@dataclass(frozen=True)
class ElasticFrame:
    """Drained stiffness (Voigt 6x6) with solid and fluid bulk moduli."""

    c: np.ndarray
    kappa_s: float
    kappa_f: float
    phi: float

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.shape != (6, 6):
            raise ValueError(f"c must be 6x6, got shape {c.shape}")
        if not np.array_equal(c, c.T):
            raise ValueError("drained stiffness c must be symmetric")
        if not (self.kappa_s > 0 and self.kappa_f > 0):
            raise ValueError("bulk moduli must be positive")
        object.__setattr__(self, "c", c)


# Table of Biot-JKD parameter sets (cancellous bone, epoxy-glass, sandstone).
_TABLE = {
    "S1": dict(rho_f=1000.0, phi=0.8, alpha_inf=1.1, K0=3e-8, Lambda=2.454e-5),
    "S2": dict(rho_f=1040.0, phi=0.2, alpha_inf=3.6, K0=1e-13, Lambda=3.790e-6),
    "S3": dict(rho_f=1040.0, phi=0.2, alpha_inf=2.0, K0=6e-13, Lambda=6.930e-6),
    "S4": dict(rho_f=1040.0, phi=0.2, alpha_inf=2.0, K0=6e-13, Lambda=2.190e-7),
    "S5": dict(rho_f=1040.0, phi=0.2, alpha_inf=3.6, K0=1e-13, Lambda=1.20e-7),
}

BUILTIN = {
    label: MaterialParams(nu=1e-3 / p["rho_f"], label=label, **p) for label, p in _TABLE.items()
}


def get_material(label, registry=None) -> MaterialParams:
    """Look up a material by label in ``registry`` (default: built-in S1..S5)."""
    table = dict(BUILTIN)
    if registry:
        table.update(registry)
    try:
        return table[label]
    except KeyError:
        known = ", ".join(sorted(table))
        raise UnknownMaterial(f"unknown material {label!r}; known materials: {known}") from None


_FIELDS = ("rho_f", "phi", "alpha_inf", "K0", "nu", "Lambda")
_NUMBER = re.compile(r"^\s*([-+0-9.eE]+)\s*(?:/\s*([-+0-9.eE]+))?\s*$")


def _parse_number(text, key, lineno):
    m = _NUMBER.match(text)
    if not m:
        raise ParseError(f"line {lineno}: cannot parse value for {key!r}: {text!r}")
    try:
        value = float(m.group(1))
        if m.group(2):
            value /= float(m.group(2))
    except ValueError:
        raise ParseError(f"line {lineno}: cannot parse value for {key!r}: {text!r}") from None
    return value


def parse_registry(text) -> dict:
    """Parse the flat ``key = value`` material format.

    Each ``label`` line starts a new record; ``#`` starts a comment. Values may
    be written as a quotient, e.g. ``nu = 1e-3/1040``.
    """
    records = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, value = (part.strip() for part in line.split("=", 1))
        elif ":" in line:
            key, value = (part.strip() for part in line.split(":", 1))
        else:
            raise ParseError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if key == "label":
            current = {"label": value, "_line": lineno}
            records.append(current)
            continue
        if current is None:
            raise ParseError(f"line {lineno}: {key!r} appears before any 'label'")
        if key not in _FIELDS:
            raise ParseError(f"line {lineno}: unknown key {key!r}")
        current[key] = _parse_number(value, key, lineno)
    out = {}
    for rec in records:
        missing = [f for f in _FIELDS if f not in rec]
        if missing:
            raise ParseError(f"material {rec['label']!r} (line {rec['_line']}) is missing {', '.join(missing)}")
        try:
            out[rec["label"]] = MaterialParams(**{f: rec[f] for f in _FIELDS}, label=rec["label"])
        except ValueError as exc:
            raise ParseError(f"material {rec['label']!r}: {exc}") from None
    return out


def load_registry(path) -> dict:
    return parse_registry(Path(path).read_text())


def format_registry(materials) -> str:
    lines = []
    for m in materials:
        lines.append(f"label = {m.label}")
        lines.extend(f"{f} = {getattr(m, f)!r}" for f in _FIELDS)
        lines.append("")
    return "\n".join(lines)


def derived_constants(m: MaterialParams) -> DerivedConstants:
    eta = m.rho_f * m.nu
    a = eta * m.phi / (m.rho_f * m.K0)
    C1 = 4 * m.alpha_inf**2 * m.K0**2 / (m.nu * m.phi**2 * m.Lambda**2)
    D0 = m.alpha_inf + 2 * (m.alpha_inf / m.Lambda) ** 2 * m.K0 / m.phi
    return DerivedConstants(eta=eta, a=a, C1=C1, D_at_zero=D0, D_at_inf=m.alpha_inf)


class _MPConstants:
    # material constants lifted into one precision context
    def __init__(self, m, prec):
        f = prec.mpf
        self.ctx = prec.ctx
        self.rho_f, self.phi, self.alpha_inf = f(m.rho_f), f(m.phi), f(m.alpha_inf)
        self.K0, self.nu, self.Lambda = f(m.K0), f(m.nu), f(m.Lambda)
        self.eta = self.rho_f * self.nu
        self.a = self.eta * self.phi / (self.rho_f * self.K0)
        self.C1 = 4 * self.alpha_inf**2 * self.K0**2 / (self.nu * self.phi**2 * self.Lambda**2)
        self.D0 = self.alpha_inf + 2 * (self.alpha_inf / self.Lambda) ** 2 * self.K0 / self.phi


def mp_constants(m, prec=None):
    """``a``, ``C1``, ``alpha_inf`` ... as mpmath numbers at ``prec``."""
    return _MPConstants(m, as_precision(prec))


def d_function(m: MaterialParams, s, prec=None):
    """Shifted tortuosity ``D(s) = alpha(s) - a/s``, analytic off ``(-inf, -1/C1]``."""
    prec = as_precision(prec)
    k = _MPConstants(m, prec)
    ctx = k.ctx
    s = prec.convert(s)
    if ctx.im(s) == 0 and ctx.re(s) * k.C1 <= -1:
        raise BranchCutEvaluation(f"s = {ctx.nstr(s, 8)} lies on the branch cut (-inf, -1/C1]")
    # a*(sqrt(1+x)-1)/s rationalized: no cancellation near s = 0, and the
    # removable singularity evaluates to D(0) = alpha_inf + a*C1/2 directly.
    return k.alpha_inf + k.a * k.C1 / (ctx.sqrt(1 + s * k.C1) + 1)


def d_tilde(m: MaterialParams, s, prec=None):
    """``D(s) - alpha_inf`` evaluated without the subtraction."""
    prec = as_precision(prec)
    k = _MPConstants(m, prec)
    s = prec.convert(s)
    if k.ctx.im(s) == 0 and k.ctx.re(s) * k.C1 <= -1:
        raise BranchCutEvaluation(f"s = {k.ctx.nstr(s, 8)} lies on the branch cut (-inf, -1/C1]")
    return k.a * k.C1 / (k.ctx.sqrt(1 + s * k.C1) + 1)


def jkd_tortuosity(m: MaterialParams, omega, prec=None):
    """JKD dynamic tortuosity ``T(omega)`` with the principal square root."""
    prec = as_precision(prec)
    k = _MPConstants(m, prec)
    ctx = k.ctx
    w = prec.mpf(omega)
    if not w > 0:
        raise ValueError("omega must be positive")
    j = ctx.mpc(0, 1)
    root = ctx.sqrt(1 - j * 4 * k.alpha_inf**2 * k.K0**2 * k.rho_f * w / (k.eta * k.Lambda**2 * k.phi**2))
    return k.alpha_inf * (1 - k.eta * k.phi / (j * w * k.alpha_inf * k.rho_f * k.K0) * root)


def low_freq_tortuosity(m: MaterialParams, omega, prec=None):
    """Low-frequency Biot tortuosity ``alpha_inf + (eta*phi/(K0*rho_f)) / (-i*omega)``."""
    prec = as_precision(prec)
    k = _MPConstants(m, prec)
    w = prec.mpf(omega)
    if not w > 0:
        raise ValueError("omega must be positive")
    return k.alpha_inf + k.a / k.ctx.mpc(0, -w)


def d_function_array(m: MaterialParams, s):
    """Double-precision ``D(s)`` for an array of complex ``s`` off the cut."""
    d = derived_constants(m)
    s = np.asarray(s, dtype=complex)
    return m.alpha_inf + d.a * d.C1 / (np.sqrt(1 + s * d.C1) + 1)


def undrained_moduli(f: ElasticFrame):
    """Undrained stiffness, Biot modulus ``M`` and coupling vector ``a``.

    Returns ``(c_u, M, a_vec)`` with ``c_u = c + M a a^T``.
    """
    c = f.c
    ks, kf = f.kappa_s, f.kappa_f
    a_vec = np.empty(6)
    for i in range(3):
        a_vec[i] = 1 - c[i, :3].sum() / (3 * ks)
    for i in range(3, 6):
        a_vec[i] = -c[:3, i].sum() / (3 * ks)
    kbar = (c[0, 0] + c[1, 1] + c[2, 2] + 2 * c[0, 1] + 2 * c[0, 2] + 2 * c[1, 2]) / 9
    denom = 1 - kbar / ks - f.phi * (1 - ks / kf)
    if not denom > 0:
        raise DegenerateModulus(f"Biot modulus denominator is {denom:.6g} <= 0")
    M = ks / denom
    c_u = c + M * np.outer(a_vec, a_vec)
    return c_u, M, a_vec


def kappa_bar(c):
    c = np.asarray(c, dtype=float)
    return (c[0, 0] + c[1, 1] + c[2, 2] + 2 * c[0, 1] + 2 * c[0, 2] + 2 * c[1, 2]) / 9
