"""Two-sided residue interpolation in the Stieltjes class.

With ``z = -1/s``, ``u_i = 1/s_i`` and ``v_i = D(s_i) - alpha_inf`` the data
define two Hermitian matrices ``S1`` and ``S2``. The generalized eigenpairs of
``S1 V = S2 V L`` (normalized by ``V* S2 V = I``) give the poles ``-L_kk`` and
residues ``|C_+ V[:, k]|^2``.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, replace

from .errors import DuplicateNode, NotPositiveDefinite
from .fit_pade import interpolation_samples, node_residuals, pole_support_warnings
from .material import MaterialParams, mp_constants
from .model import FitReport, PoleResidueModel
from .mpcore import as_precision, generalized_hermitian_eig
from .report import condition_report, rel_err_profile, summarize_rel_err
from .sampling import SampleGrid

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class InterpolationData:
    s: tuple
    u: tuple
    v: tuple
    z: tuple

    def __len__(self):
        return len(self.s)


@dataclass(frozen=True)
class StieltjesPencil:
    S1: list
    S2: list
    C_plus: tuple


def interpolation_data(samples, prec=None) -> InterpolationData:
    """Build ``(s, u, v, z)`` from ``(s_i, D(s_i) - alpha_inf)`` pairs."""
    prec = as_precision(prec)
    s = tuple(prec.mpc(x) for x, _ in samples)
    v = tuple(prec.mpc(y) for _, y in samples)
    if any(x == 0 for x in s):
        raise DuplicateNode("node s = 0 is not allowed")
    return InterpolationData(s=s, u=tuple(1 / x for x in s), v=v, z=tuple(-1 / x for x in s))


def build_interpolation_data(m: MaterialParams, grid: SampleGrid, digits=None) -> InterpolationData:
    prec = as_precision(digits)
    return interpolation_data(interpolation_samples(m, grid, prec), prec)


def assemble_s1_s2(data: InterpolationData, prec=None) -> StieltjesPencil:
    """Hermitian ``S1``, ``S2`` in the s-variable form.

    ``(S1)_ij = (-s_j v_j + conj(s_i v_i)) / (conj(s_i) - s_j)``,
    ``(S2)_ij = (-v_j + conj(v_i)) / (s_j - conj(s_i))``.
    The lower triangle is mirrored from the upper one so both are exactly
    Hermitian as stored.
    """
    prec = as_precision(prec)
    ctx = prec.ctx
    conj = ctx.conj
    s, v = data.s, data.v
    n = len(s)
    for i in range(n):
        for j in range(i):
            if s[i] == s[j] or s[i] == conj(s[j]):
                raise DuplicateNode(f"nodes {j} and {i} coincide (or are conjugate)")
        if ctx.im(s[i]) == 0:
            raise DuplicateNode(f"node {i} is real; the construction needs non-real nodes")
    S1 = [[None] * n for _ in range(n)]
    S2 = [[None] * n for _ in range(n)]
    sv = [a * b for a, b in zip(s, v)]
    for i in range(n):
        si_c, vi_c, svi_c = conj(s[i]), conj(v[i]), conj(sv[i])
        for j in range(i, n):
            e1 = (-sv[j] + svi_c) / (si_c - s[j])
            e2 = (-v[j] + vi_c) / (s[j] - si_c)
            if i == j:
                e1, e2 = ctx.re(e1), ctx.re(e2)
            S1[i][j], S2[i][j] = e1, e2
            S1[j][i], S2[j][i] = conj(e1), conj(e2)
    return StieltjesPencil(S1=S1, S2=S2, C_plus=tuple(v))


def assemble_s1_s2_theorem(data: InterpolationData, prec=None) -> StieltjesPencil:
    """Same pencil from the z-variable formulas with ``u``, ``v``, ``z``.

    ``(S1)_ij = (conj(u_i) v_j - conj(v_i) u_j) / (z_j - conj(z_i))`` and
    ``(S2)_ij = (z_j conj(u_i) v_j - conj(z_i) conj(v_i) u_j) / (z_j - conj(z_i))``.
    Kept as an independent route for cross-checking :func:`assemble_s1_s2`.
    """
    prec = as_precision(prec)
    conj = prec.ctx.conj
    u, v, z = data.u, data.v, data.z
    n = len(u)
    S1 = [[(conj(u[i]) * v[j] - conj(v[i]) * u[j]) / (z[j] - conj(z[i])) for j in range(n)] for i in range(n)]
    S2 = [
        [(z[j] * conj(u[i]) * v[j] - conj(z[i]) * conj(v[i]) * u[j]) / (z[j] - conj(z[i])) for j in range(n)]
        for i in range(n)
    ]
    return StieltjesPencil(S1=S1, S2=S2, C_plus=tuple(v))


def extract_poles_residues(pencil: StieltjesPencil, alpha_inf, prec=None) -> PoleResidueModel:
    """Poles ``-L_kk`` and residues ``|C_+ V[:, k]|^2`` from ``S1 V = S2 V L``."""
    prec = as_precision(prec)
    ctx = prec.ctx
    try:
        L, V = generalized_hermitian_eig(pencil.S1, pencil.S2, prec)
    except NotPositiveDefinite as exc:
        raise NotPositiveDefinite(
            f"S2 is not numerically positive definite ({exc}); the data are not resolvable "
            f"as a Stieltjes function at {prec.decimal_digits} digits",
            pivot=exc.pivot,
        ) from None
    n = len(L)
    c = [prec.mpc(x) for x in pencil.C_plus]
    poles, residues = [], []
    for k in range(n):
        proj = ctx.fsum(c[j] * V[j][k] for j in range(n))
        poles.append(-L[k])
        residues.append(ctx.re(proj) ** 2 + ctx.im(proj) ** 2)
    return PoleResidueModel(alpha_inf=prec.convert(alpha_inf), poles=tuple(poles), residues=tuple(residues))


def model_from_samples(samples, alpha_inf=0, prec=None) -> PoleResidueModel:
    """Approach 2 on raw ``(s_k, D(s_k) - alpha_inf)`` pairs (no material needed)."""
    prec = as_precision(prec)
    pencil = assemble_s1_s2(interpolation_data(samples, prec), prec)
    bare = extract_poles_residues(pencil, alpha_inf, prec)
    return replace(bare, digits=prec.decimal_digits, approach="stieltjes")


def fit_stieltjes(m: MaterialParams, grid: SampleGrid, M=None, digits=None, *, conditioning=True, rel_err=True):
    """Fit ``D(s) ~ alpha_inf + sum r_k/(s - p_k)`` by two-sided residue interpolation.

    Returns ``(model, report)``; the report carries the condition numbers of
    ``S1`` and ``S2`` when ``conditioning`` is set.
    """
    prec = as_precision(digits)
    M = grid.M if M is None else M
    if M != grid.M:
        raise ValueError(f"grid has {grid.M} nodes but M={M}")
    start = time.perf_counter()
    samples = interpolation_samples(m, grid, prec)
    data = interpolation_data(samples, prec)
    pencil = assemble_s1_s2(data, prec)
    alpha = mp_constants(m, prec).alpha_inf
    bare = extract_poles_residues(pencil, alpha, prec)
    model = PoleResidueModel(
        alpha_inf=alpha,
        poles=bare.poles,
        residues=bare.residues,
        material_label=m.label,
        grid=grid.to_dict(),
        digits=prec.decimal_digits,
        approach="stieltjes",
    )
    report = FitReport(digits=prec.decimal_digits)
    report.node_residuals = node_residuals(model, samples, alpha, prec)
    bad = model.stieltjes_violations()
    if bad:
        report.warnings.append(f"{len(bad)} pole/residue pairs violate r>0, p<0")
    report.warnings.extend(pole_support_warnings(model, m, prec))
    if conditioning:
        report.cond_log10 = condition_report({"S1": pencil.S1, "S2": pencil.S2}, prec)
    report.wall_time = time.perf_counter() - start
    if rel_err:
        _, err = rel_err_profile(m, model)
        report.max_rel_err, report.median_rel_err = summarize_rel_err(err)
    for msg in report.warnings:
        log.warning("%s (material %s)", msg, m.label)
    return model, report
