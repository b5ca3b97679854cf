"""Rational interpolation of ``D - alpha_inf`` and its partial-fraction form.

The (M-1)/M rational function with denominator constant term 1 is fitted to
``M`` nodes ``s_k = -i*omega_k``. Requiring real coefficients makes the
conjugate nodes interpolated as well, so the complex M x 2M system becomes the
real 2M x 2M system ``[Re A; Im A] x = [Re d; Im d]``.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, replace

from .errors import ComplexPole, DegenerateLeadingCoefficient, DuplicateNode, RepeatedPole
from .material import MaterialParams, d_tilde, mp_constants
from .model import FitReport, PoleResidueModel
from .mpcore import as_precision, poly_eval, poly_roots, solve_linear
from .report import condition_report, rel_err_profile, summarize_rel_err
from .sampling import SampleGrid

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RationalCoeffs:
    """Numerator ``a_0..a_{M-1}`` and denominator ``b_1..b_M`` (``b_0 = 1``)."""

    a: tuple
    b: tuple

    @property
    def numerator(self):
        return list(self.a)

    @property
    def denominator(self):
        one = self.b[0] * 0 + 1 if self.b else 1
        return [one] + list(self.b)

    def __call__(self, s):
        num, _ = poly_eval(self.numerator, s)
        den, _ = poly_eval(self.denominator, s)
        return num / den


def _check_nodes(nodes, prec):
    ctx = prec.ctx
    for i in range(len(nodes)):
        for j in range(i):
            if nodes[i] == nodes[j] or nodes[i] == ctx.conj(nodes[j]):
                raise DuplicateNode(f"nodes {j} and {i} coincide (or are conjugate)")


def assemble_system(samples, M=None, prec=None):
    """Complex ``M x 2M`` matrix ``A`` and right-hand side ``d``.

    ``samples`` holds pairs ``(s_k, D(s_k) - alpha_inf)``. Row ``k`` is
    ``[1, s, ..., s^(M-1), -d s, ..., -d s^M]`` with ``d = D(s_k) - alpha_inf``.
    """
    prec = as_precision(prec)
    nodes = [prec.mpc(s) for s, _ in samples]
    vals = [prec.mpc(v) for _, v in samples]
    M = len(nodes) if M is None else M
    if len(nodes) != M:
        raise ValueError(f"got {len(nodes)} samples for M={M}")
    _check_nodes(nodes, prec)
    A = []
    for s, d in zip(nodes, vals):
        powers = [prec.mpc(1)]
        for _ in range(M):
            powers.append(powers[-1] * s)
        A.append(powers[:M] + [-d * powers[j] for j in range(1, M + 1)])
    return A, vals


def stacked_real(A, prec=None):
    """``[Re A; Im A]``."""
    ctx = as_precision(prec).ctx
    return [[ctx.re(v) for v in row] for row in A] + [[ctx.im(v) for v in row] for row in A]


def column_scaled(B, prec=None):
    """Scale every column of ``B`` to unit 2-norm; returns ``(scaled, norms)``."""
    ctx = as_precision(prec).ctx
    cols = len(B[0])
    norms = [ctx.sqrt(ctx.fsum(abs(row[j]) ** 2 for row in B)) for j in range(cols)]
    return [[row[j] / norms[j] for j in range(cols)] for row in B], norms


def solve_coefficients(A, d, prec=None) -> RationalCoeffs:
    """Solve the real stacked system (with column equilibration) for the coefficients."""
    prec = as_precision(prec)
    ctx = prec.ctx
    M = len(A)
    B, norms = column_scaled(stacked_real(A, prec), prec)
    rhs = [ctx.re(v) for v in d] + [ctx.im(v) for v in d]
    y = solve_linear(B, rhs, prec)
    x = [yi / n for yi, n in zip(y, norms)]
    return RationalCoeffs(a=tuple(x[:M]), b=tuple(x[M:]))


def partial_fractions(rc: RationalCoeffs, prec=None) -> PoleResidueModel:
    """Poles and residues of ``num/den``; ``alpha_inf`` is left at zero."""
    prec = as_precision(prec)
    ctx = prec.ctx
    den = rc.denominator
    num = rc.numerator
    if den[-1] == 0:
        raise DegenerateLeadingCoefficient("leading denominator coefficient b_M vanished")
    roots = poly_roots(den, prec)
    half = ctx.mpf(10) ** (-(prec.decimal_digits // 2))
    for r in roots:
        if abs(ctx.im(r)) > half * abs(r):
            raise ComplexPole(
                f"denominator root {ctx.nstr(r, 10)} is not real; the data are not resolved "
                f"at {prec.decimal_digits} digits (raise the precision above the log10 condition number)"
            )
    poles = [ctx.re(r) for r in roots]
    for i in range(len(poles)):
        for j in range(i):
            if abs(poles[i] - poles[j]) <= half * max(abs(poles[i]), abs(poles[j])):
                raise RepeatedPole(f"poles {j} and {i} coincide to {prec.decimal_digits // 2} digits")
    residues = []
    for p in poles:
        n, _ = poly_eval(num, p)
        _, dd = poly_eval(den, p)
        residues.append(ctx.re(n / dd))
    return PoleResidueModel(alpha_inf=ctx.mpf(0), poles=tuple(poles), residues=tuple(residues))


def model_from_samples(samples, alpha_inf=0, prec=None) -> PoleResidueModel:
    """Approach 1 on raw ``(s_k, D(s_k) - alpha_inf)`` pairs (no material needed)."""
    prec = as_precision(prec)
    A, d = assemble_system(samples, None, prec)
    bare = partial_fractions(solve_coefficients(A, d, prec), prec)
    return replace(bare, alpha_inf=prec.convert(alpha_inf), digits=prec.decimal_digits, approach="pade")


def interpolation_samples(m: MaterialParams, grid: SampleGrid, prec=None):
    """``(s_k, D(s_k) - alpha_inf)`` at ``s_k = -i*omega_k`` in working precision."""
    prec = as_precision(prec)
    ctx = prec.ctx
    out = []
    for w in grid.mp_omegas(prec):
        s = ctx.mpc(0, -w)
        out.append((s, d_tilde(m, s, prec)))
    return out


def node_residuals(model: PoleResidueModel, samples, alpha_inf, prec):
    """Relative interpolation error at each node, evaluated at working precision."""
    out = []
    for s, dt in samples:
        exact = dt + alpha_inf
        out.append(float(abs(model.evaluate_mp(s, prec) - exact) / abs(exact)))
    return out


def pole_support_warnings(model: PoleResidueModel, m: MaterialParams, prec=None):
    """Messages for poles to the right of ``-1/C1`` (beyond a 1% tolerance)."""
    k = mp_constants(m, prec)
    bound = -(1 - k.ctx.mpf("0.01")) / k.C1
    return [
        f"pole {k.ctx.nstr(p, 8)} lies right of -1/C1 = {k.ctx.nstr(-1 / k.C1, 8)}"
        for p in model.poles
        if p > bound
    ]


def fit_pade(m: MaterialParams, grid: SampleGrid, M=None, digits=None, *, conditioning=True, rel_err=True):
    """Fit ``D(s) ~ alpha_inf + sum r_k/(s - p_k)`` by rational interpolation.

    Returns ``(model, report)``. ``conditioning`` adds the log10 condition
    numbers of ``A`` and of ``B`` (the column-normalized stacked real matrix)
    to the report; ``rel_err`` adds the dense-band error summary.
    """
    prec = as_precision(digits)
    M = grid.M if M is None else M
    if M != grid.M:
        raise ValueError(f"grid has {grid.M} nodes but M={M}")
    start = time.perf_counter()
    samples = interpolation_samples(m, grid, prec)
    A, d = assemble_system(samples, M, prec)
    rc = solve_coefficients(A, d, prec)
    bare = partial_fractions(rc, prec)
    alpha = mp_constants(m, prec).alpha_inf
    model = replace(
        bare,
        alpha_inf=alpha,
        material_label=m.label,
        grid=grid.to_dict(),
        digits=prec.decimal_digits,
        approach="pade",
    )
    report = FitReport(digits=prec.decimal_digits)
    report.node_residuals = node_residuals(model, samples, alpha, prec)
    bad = model.stieltjes_violations()
    if bad:
        report.warnings.append(f"{len(bad)} pole/residue pairs violate r>0, p<0")
    report.warnings.extend(pole_support_warnings(model, m, prec))
    if conditioning:
        B, _ = column_scaled(stacked_real(A, prec), prec)
        report.cond_log10 = condition_report({"A": A, "B": B}, prec)
    report.wall_time = time.perf_counter() - start
    if rel_err:
        _, err = rel_err_profile(m, model)
        report.max_rel_err, report.median_rel_err = summarize_rel_err(err)
    for msg in report.warnings:
        log.warning("%s (material %s)", msg, m.label)
    return model, report
