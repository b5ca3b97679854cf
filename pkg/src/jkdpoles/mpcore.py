"""Configurable-precision scalars and the dense kernels every fitter needs.

Matrices are plain lists of rows whose entries are mpmath numbers belonging to
the context of a :class:`Precision`. Each precision level owns its own
``mpmath.MPContext`` so fits at different precisions can run concurrently
without touching the global ``mpmath.mp`` state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .errors import (
    DegenerateLeadingCoefficient,
    NotHermitian,
    NotPositiveDefinite,
    SingularMatrix,
)

DEFAULT_DIGITS = 90
MIN_DIGITS = 30
GUARD_DIGITS = 5


@lru_cache(maxsize=None)
def _context(digits):
    ctx = mpmath.MPContext()
    ctx.dps = digits
    return ctx


@dataclass(frozen=True)
class Precision:
    """Number of significant decimal digits of the working format."""

    decimal_digits: int = DEFAULT_DIGITS

    def __post_init__(self):
        d = self.decimal_digits
        if isinstance(d, bool) or int(d) != d or d < MIN_DIGITS:
            raise ValueError(f"decimal_digits must be an integer >= {MIN_DIGITS}, got {d!r}")

    @property
    def ctx(self):
        return _context(int(self.decimal_digits))

    @property
    def eps(self):
        return self.ctx.mpf(10) ** (-int(self.decimal_digits))

    @property
    def singular_tol(self):
        """Relative pivot threshold below which a matrix counts as singular."""
        return self.ctx.mpf(10) ** (GUARD_DIGITS - int(self.decimal_digits))

    def mpf(self, x):
        return self.ctx.mpf(_exact(x))

    def mpc(self, x, y=None):
        if y is not None:
            return self.ctx.mpc(_exact(x), _exact(y))
        if hasattr(x, "_mpc_"):
            return self.ctx.mpc(x)
        if isinstance(x, (complex, np.complexfloating)):
            return self.ctx.mpc(_exact(x.real), _exact(x.imag))
        return self.ctx.mpc(_exact(x))

    def convert(self, x):
        """Bring a scalar into this context, keeping reals real."""
        if hasattr(x, "_mpc_") or isinstance(x, (complex, np.complexfloating)):
            return self.mpc(x)
        return self.mpf(x)


def as_precision(p) -> Precision:
    """Accept a :class:`Precision`, an integer digit count or ``None`` (default)."""
    if p is None:
        return Precision()
    if isinstance(p, Precision):
        return p
    return Precision(int(p))


def _exact(x):
    # Floats go through their shortest repr so 3e-08 becomes the decimal 3e-08,
    # not the nearest binary double.
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, np.integer):
        return int(x)
    return x


def to_rows(A, prec):
    """Copy a matrix-like object into a list of rows in ``prec``'s context."""
    if hasattr(A, "rows") and hasattr(A, "cols") and not isinstance(A, (list, tuple)):
        return [[prec.convert(A[i, j]) for j in range(A.cols)] for i in range(A.rows)]
    return [[prec.convert(v) for v in row] for row in A]


def to_vector(b, prec):
    return [prec.convert(v) for v in b]


def _is_complex(x):
    return hasattr(x, "_mpc_")


def _abs2(x):
    if _is_complex(x):
        return x.real * x.real + x.imag * x.imag
    return x * x


def identity(n, prec):
    one, zero = prec.mpf(1), prec.mpf(0)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def conj_transpose(A, prec):
    conj = prec.ctx.conj
    return [[conj(A[i][j]) for i in range(len(A))] for j in range(len(A[0]))]


def matmul(A, B, prec):
    fsum = prec.ctx.fsum
    Bt = list(zip(*B))
    return [[fsum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A, x, prec):
    fsum = prec.ctx.fsum
    return [fsum(a * b for a, b in zip(row, x)) for row in A]


def frobenius(A, prec):
    return prec.ctx.sqrt(prec.ctx.fsum(_abs2(v) for row in A for v in row))


def solve_linear(A, b, prec=None):
    """Solve ``A x = b`` by Gaussian elimination with partial pivoting.

    Raises
    ------
    SingularMatrix
        When a pivot falls below ``10**(5 - digits)`` relative to the infinity
        norm of its original row.
    """
    prec = as_precision(prec)
    ctx = prec.ctx
    A = to_rows(A, prec)
    b = to_vector(b, prec)
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("solve_linear needs a square matrix")
    if len(b) != n:
        raise ValueError(f"right-hand side has length {len(b)}, expected {n}")
    tol = prec.singular_tol
    norms = [max((abs(v) for v in row), default=ctx.mpf(0)) for row in A]
    M = [row[:] + [bi] for row, bi in zip(A, b)]
    order = list(range(n))
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(M[i][k]))
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
            order[k], order[piv] = order[piv], order[k]
        pivot = M[k][k]
        if norms[order[k]] == 0 or abs(pivot) <= tol * norms[order[k]]:
            raise SingularMatrix(f"pivot {k} is negligible at {prec.decimal_digits} digits")
        rowk = M[k]
        for i in range(k + 1, n):
            f = M[i][k] / pivot
            if f:
                rowi = M[i]
                for j in range(k + 1, n + 1):
                    rowi[j] -= f * rowk[j]
                rowi[k] = 0
    x = [None] * n
    for i in range(n - 1, -1, -1):
        row = M[i]
        acc = row[n]
        for j in range(i + 1, n):
            acc -= row[j] * x[j]
        x[i] = acc / row[i]
    return x


def cholesky(H, prec=None):
    """Lower-triangular ``L`` with ``H = L L*`` for Hermitian positive definite ``H``."""
    prec = as_precision(prec)
    ctx = prec.ctx
    H = to_rows(H, prec)
    n = len(H)
    conj = ctx.conj
    L = [[ctx.mpf(0)] * n for _ in range(n)]
    for j in range(n):
        Lj = L[j]
        d = H[j][j] - ctx.fsum(_abs2(Lj[k]) for k in range(j))
        d = ctx.re(d)
        if d <= 0:
            raise NotPositiveDefinite(f"nonpositive pivot at index {j}", pivot=j)
        djj = ctx.sqrt(d)
        Lj[j] = djj
        for i in range(j + 1, n):
            Li = L[i]
            s = H[i][j] - ctx.fsum(Li[k] * conj(Lj[k]) for k in range(j))
            Li[j] = s / djj
    return L


def _check_hermitian(H, prec):
    ctx = prec.ctx
    scale = max((abs(v) for row in H for v in row), default=ctx.mpf(0))
    tol = prec.singular_tol * scale
    n = len(H)
    for i in range(n):
        if len(H[i]) != n:
            raise NotHermitian("matrix is not square")
        for j in range(i, n):
            if abs(H[i][j] - ctx.conj(H[j][i])) > tol:
                raise NotHermitian(f"entry ({i},{j}) breaks Hermitian symmetry")


def _symmetrize(H, prec):
    ctx = prec.ctx
    n = len(H)
    half = ctx.mpf(1) / 2
    A = [[None] * n for _ in range(n)]
    for i in range(n):
        A[i][i] = ctx.re(H[i][i])
        for j in range(i + 1, n):
            v = (H[i][j] + ctx.conj(H[j][i])) * half
            A[i][j] = v
            A[j][i] = ctx.conj(v)
    return A


def _jacobi_eig(A, prec, max_sweeps=80):
    # Cyclic Jacobi. Each rotation is a phase fix that makes a_pq real followed
    # by the classical real rotation; A is overwritten.
    ctx = prec.ctx
    n = len(A)
    conj, sqrt = ctx.conj, ctx.sqrt
    V = identity(n, prec)
    eps = prec.eps
    one = ctx.mpf(1)
    total = frobenius(A, prec)
    if total == 0:
        return [ctx.mpf(0)] * n, V
    for _ in range(max_sweeps):
        off = ctx.fsum(_abs2(A[i][j]) for i in range(n) for j in range(n) if i != j)
        if sqrt(off) <= eps * total:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p][q]
                mag = abs(apq)
                if mag == 0:
                    continue
                app, aqq = ctx.re(A[p][p]), ctx.re(A[q][q])
                if mag <= eps * eps * (abs(app) + abs(aqq)):
                    A[p][q] = A[q][p] = 0 * apq
                    continue
                u = conj(apq) / mag
                tau = (aqq - app) / (2 * mag)
                t = one / (abs(tau) + sqrt(1 + tau * tau))
                if tau < 0:
                    t = -t
                c = one / sqrt(1 + t * t)
                s = t * c
                su = s * u
                cu = c * u
                sub, cub = conj(su), conj(cu)
                for k in range(n):
                    row = A[k]
                    akp, akq = row[p], row[q]
                    row[p] = akp * c - akq * su
                    row[q] = akp * s + akq * cu
                rp, rq = A[p], A[q]
                for k in range(n):
                    apk, aqk = rp[k], rq[k]
                    rp[k] = c * apk - sub * aqk
                    rq[k] = s * apk + cub * aqk
                A[p][p] = ctx.re(A[p][p])
                A[q][q] = ctx.re(A[q][q])
                A[p][q] = A[q][p] = 0 * apq
                for row in V:
                    vkp, vkq = row[p], row[q]
                    row[p] = vkp * c - vkq * su
                    row[q] = vkp * s + vkq * cu
    evals = [ctx.re(A[i][i]) for i in range(n)]
    order = sorted(range(n), key=lambda i: evals[i])
    evals = [evals[i] for i in order]
    V = [[row[i] for i in order] for row in V]
    return evals, V


def hermitian_eig(H, prec=None):
    """Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix.

    Returns ``(d, X)`` with ``H = X diag(d) X*``; ``X`` is a list of rows whose
    columns are the eigenvectors.
    """
    prec = as_precision(prec)
    H = to_rows(H, prec)
    _check_hermitian(H, prec)
    return _jacobi_eig(_symmetrize(H, prec), prec)


def _forward_sub(L, B, prec):
    # Solve L X = B for lower-triangular L; B is a list of rows.
    n = len(L)
    m = len(B[0])
    X = [[None] * m for _ in range(n)]
    for c in range(m):
        for i in range(n):
            acc = B[i][c]
            Li = L[i]
            for k in range(i):
                acc -= Li[k] * X[k][c]
            X[i][c] = acc / Li[i]
    return X


def _backward_sub_conj(L, B, prec):
    # Solve L* X = B for lower-triangular L.
    conj = prec.ctx.conj
    n = len(L)
    m = len(B[0])
    X = [[None] * m for _ in range(n)]
    for c in range(m):
        for i in range(n - 1, -1, -1):
            acc = B[i][c]
            for k in range(i + 1, n):
                acc -= conj(L[k][i]) * X[k][c]
            X[i][c] = acc / conj(L[i][i])
    return X


def generalized_hermitian_eig(S1, S2, prec=None):
    """Solve ``S1 V = S2 V diag(L)`` for Hermitian ``S1`` and positive definite ``S2``.

    Reduces through the Cholesky factor ``S2 = C C*`` to the standard problem
    for ``C^{-1} S1 C^{-*}``. The returned eigenvectors satisfy
    ``V* S2 V = I`` and ``V* S1 V = diag(L)``; ``L`` is ascending.
    """
    prec = as_precision(prec)
    S1 = to_rows(S1, prec)
    S2 = to_rows(S2, prec)
    _check_hermitian(S1, prec)
    _check_hermitian(S2, prec)
    C = cholesky(_symmetrize(S2, prec), prec)
    W = _forward_sub(C, _symmetrize(S1, prec), prec)
    K = _forward_sub(C, conj_transpose(W, prec), prec)
    L, Y = _jacobi_eig(_symmetrize(K, prec), prec)
    V = _backward_sub_conj(C, Y, prec)
    return L, V


def poly_eval(coeffs, x, prec=None):
    """Horner evaluation of ``sum(coeffs[k] * x**k)``, plus its derivative."""
    p = 0 * x
    dp = 0 * x
    for c in reversed(coeffs):
        dp = dp * x + p
        p = p * x + c
    return p, dp


def poly_from_roots(roots, prec=None, leading=1):
    """Ascending coefficients of ``leading * prod(s - r)``."""
    prec = as_precision(prec)
    coeffs = [prec.convert(leading)]
    for r in roots:
        r = prec.convert(r)
        new = [0 * r] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            new[k + 1] += c
            new[k] -= c * r
        coeffs = new
    return coeffs


def poly_roots(coeffs, prec=None, max_iter=400):
    """All roots of ``sum(coeffs[k] * s**k)``.

    Seeds come from the double-precision companion matrix of a rescaled
    polynomial; they are then refined simultaneously by Newton steps with
    implicit deflation against the other roots (Ehrlich-Aberth), which keeps
    two seeds from collapsing onto the same root.
    """
    prec = as_precision(prec)
    ctx = prec.ctx
    c = [prec.mpc(v) for v in coeffs]
    if len(c) > 1 and c[-1] == 0:
        raise DegenerateLeadingCoefficient("leading coefficient is zero")
    n = len(c) - 1
    if n < 1:
        if c and c[0] == 0:
            raise DegenerateLeadingCoefficient("zero polynomial")
        return []
    nz = 0
    while c[nz] == 0:
        nz += 1
    core = c[nz:]
    m = len(core) - 1
    roots = [ctx.mpc(0)] * nz
    if m == 0:
        return roots
    # rescale s = sigma * t so the companion matrix is balanced in double
    log_sigma = (ctx.log(abs(core[0])) - ctx.log(abs(core[-1]))) / m
    sigma = ctx.exp(log_sigma)
    scaled = [core[k] * sigma**k for k in range(m + 1)]
    big = max(abs(v) for v in scaled)
    dbl = np.array([complex(v / big) for v in reversed(scaled)])
    seeds = np.roots(dbl)
    z = [ctx.mpc(complex(t)) * sigma for t in seeds]
    z = _separate(z, ctx)
    tol = ctx.mpf(10) ** (3 - prec.decimal_digits)
    for _ in range(max_iter):
        worst = ctx.mpf(0)
        for i in range(m):
            zi = z[i]
            p, dp = poly_eval(core, zi)
            if p == 0:
                continue
            ratio = p / dp if dp != 0 else p
            acc = ctx.fsum(1 / (zi - z[j]) for j in range(m) if j != i)
            w = ratio / (1 - ratio * acc)
            z[i] = zi - w
            rel = abs(w) / max(abs(z[i]), prec.eps)
            if rel > worst:
                worst = rel
        if worst <= tol:
            break
    # two plain Newton polish steps at full precision
    for _ in range(2):
        for i in range(m):
            p, dp = poly_eval(core, z[i])
            if dp != 0:
                z[i] -= p / dp
    return roots + z


def _separate(z, ctx):
    # nudge coincident double-precision seeds apart
    out = []
    for zi in z:
        while any(zi == w for w in out):
            zi = zi * (1 + ctx.mpf(2) ** -20) + ctx.mpc(0, 2**-30)
        out.append(zi)
    return out


def singular_values(A, prec=None, max_sweeps=80):
    """Singular values (descending) by one-sided Jacobi rotations."""
    prec = as_precision(prec)
    ctx = prec.ctx
    A = to_rows(A, prec)
    rows, cols = len(A), len(A[0])
    if rows >= cols:
        C = [[A[i][j] for i in range(rows)] for j in range(cols)]
    else:
        C = [[ctx.conj(v) for v in row] for row in A]
    n = len(C)
    conj, sqrt, fsum = ctx.conj, ctx.sqrt, ctx.fsum
    eps = prec.eps
    one = ctx.mpf(1)
    for _ in range(max_sweeps):
        rotated = False
        norms = [fsum(_abs2(v) for v in col) for col in C]
        for i in range(n - 1):
            for j in range(i + 1, n):
                ci, cj = C[i], C[j]
                alpha, beta = norms[i], norms[j]
                gamma = fsum(conj(a) * b for a, b in zip(ci, cj))
                mag = abs(gamma)
                if mag == 0 or mag <= eps * sqrt(alpha * beta):
                    continue
                rotated = True
                u = conj(gamma) / mag
                tau = (beta - alpha) / (2 * mag)
                t = one / (abs(tau) + sqrt(1 + tau * tau))
                if tau < 0:
                    t = -t
                c = one / sqrt(1 + t * t)
                s = t * c
                su, cu = s * u, c * u
                C[i] = [c * a - su * b for a, b in zip(ci, cj)]
                C[j] = [s * a + cu * b for a, b in zip(ci, cj)]
                norms[i] = fsum(_abs2(v) for v in C[i])
                norms[j] = fsum(_abs2(v) for v in C[j])
        if not rotated:
            break
    sv = [sqrt(fsum(_abs2(v) for v in col)) for col in C]
    return sorted(sv, reverse=True)


def cond2_log10(A, prec=None):
    """``log10(sigma_max / sigma_min)``; ``inf`` for a singular matrix."""
    prec = as_precision(prec)
    sv = singular_values(A, prec)
    if not sv or sv[0] == 0:
        raise ValueError("cond2_log10 of a zero matrix is undefined")
    if sv[-1] == 0:
        return math.inf
    return float(prec.ctx.log10(sv[0] / sv[-1]))
