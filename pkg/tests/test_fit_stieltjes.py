import numpy as np
import pytest
from conftest import max_rel, random_model, synthetic_samples
from hypothesis import given
from hypothesis import strategies as st

from jkdpoles import fit_pade as fp
from jkdpoles import fit_stieltjes as fs
from jkdpoles.errors import DuplicateNode, NotPositiveDefinite
from jkdpoles.material import BUILTIN, d_function
from jkdpoles.mpcore import as_precision, cond2_log10, conj_transpose, frobenius, generalized_hermitian_eig, matmul
from jkdpoles.sampling import TABLE_BAND, make_grid

P = as_precision(90)
ctx = P.ctx
S1, S2 = BUILTIN["S1"], BUILTIN["S2"]


def _diff(A, B):
    return frobenius([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)], P)


class TestInterpolationData:
    def test_unit_frequency(self):
        d = fs.interpolation_data([(P.mpc(0, -1), P.mpc(1))], P)
        assert d.s[0] == ctx.mpc(0, -1)
        assert d.u[0] == ctx.mpc(0, 1)
        # z = -1/s lies in the lower half-plane for omega > 0
        assert d.z[0] == ctx.mpc(0, -1)

    def test_conjugate_node_value(self):
        s = P.mpc(0, -1e3)
        v = d_function(S2, s, P) - P.mpf(3.6)
        vc = d_function(S2, ctx.conj(s), P) - P.mpf(3.6)
        assert abs(vc - ctx.conj(v)) < ctx.mpf(10) ** -80

    def test_matches_d_function(self):
        grid = make_grid("log", 7, 1e1, 1e5)
        data = fs.build_interpolation_data(S2, grid, 90)
        for s, v in zip(data.s, data.v):
            assert abs(v - (d_function(S2, s, P) - P.mpf(3.6))) < ctx.mpf(10) ** -80 * abs(v)

    def test_zero_node(self):
        with pytest.raises(DuplicateNode):
            fs.interpolation_data([(P.mpc(0), P.mpc(1))], P)


class TestAssemble:
    def test_single_pole_closed_form(self):
        s = P.mpc(0, -1)
        v = 3 / (s + 2)
        assert abs(v - ctx.mpc("1.2", "0.6")) < P.eps * 10
        pencil = fs.assemble_s1_s2(fs.interpolation_data([(s, v)], P), P)
        assert abs(pencil.S1[0][0] - ctx.mpf("1.2")) < P.eps * 10
        assert abs(pencil.S2[0][0] - ctx.mpf("0.6")) < P.eps * 10

    def test_hermitian_as_stored(self):
        pencil = fs.assemble_s1_s2(fs.build_interpolation_data(S1, make_grid("log", 6), 90), P)
        for M in (pencil.S1, pencil.S2):
            assert all(M[i][j] == ctx.conj(M[j][i]) for i in range(6) for j in range(6))

    def test_agrees_with_z_variable_form(self):
        data = fs.build_interpolation_data(S1, make_grid("log", 6), 90)
        a = fs.assemble_s1_s2(data, P)
        b = fs.assemble_s1_s2_theorem(data, P)
        assert _diff(a.S1, b.S1) < ctx.mpf(10) ** -80 * frobenius(a.S1, P)
        assert _diff(a.S2, b.S2) < ctx.mpf(10) ** -80 * frobenius(a.S2, P)

    def test_real_or_repeated_node(self):
        with pytest.raises(DuplicateNode):
            fs.assemble_s1_s2(fs.interpolation_data([(P.mpc(-1), P.mpc(1))], P), P)
        s = P.mpc(0, -1)
        with pytest.raises(DuplicateNode):
            fs.assemble_s1_s2(fs.interpolation_data([(s, P.mpc(1)), (ctx.conj(s), P.mpc(1))], P), P)

    def test_cond_s1_matrix_m8_equal(self):
        hp = as_precision(120)
        data = fs.build_interpolation_data(S1, make_grid("equal", 8, *TABLE_BAND), 120)
        pencil = fs.assemble_s1_s2(data, hp)
        assert abs(cond2_log10(pencil.S1, hp) - 13.3237) < 0.01


class TestExtract:
    def test_single_pole(self):
        s = P.mpc(0, -1)
        pencil = fs.assemble_s1_s2(fs.interpolation_data([(s, 3 / (s + 2))], P), P)
        model = fs.extract_poles_residues(pencil, 1, P)
        assert abs(model.poles[0] + 2) < ctx.mpf(10) ** -85
        assert abs(model.residues[0] - 3) < ctx.mpf(10) ** -85
        assert abs(abs(ctx.mpc("1.2", "0.6")) ** 2 / ctx.mpf("0.6") - 3) < P.eps * 10

    def test_diagonal_sanity(self):
        one, zero = P.mpf(1), P.mpf(0)
        S1m = [[P.mpf(4), zero, zero], [zero, P.mpf(9), zero], [zero, zero, P.mpf(25)]]
        eye = [[one if i == j else zero for j in range(3)] for i in range(3)]
        model = fs.extract_poles_residues(fs.StieltjesPencil(S1m, eye, (one, zero, zero)), 0, P)
        assert [float(p) for p in model.poles] == [-4.0, -9.0, -25.0]
        assert [float(r) for r in model.residues] == [1.0, 0.0, 0.0]

    def test_not_positive_definite(self):
        samples = synthetic_samples([-1, -30], [2, 5], P, M=4)
        with pytest.raises(NotPositiveDefinite, match="not resolvable"):
            fs.model_from_samples(samples, 1, P)


class TestFitStieltjes:
    def test_s1_m8_equal_report(self):
        model, report = fs.fit_stieltjes(S1, make_grid("equal", 8, *TABLE_BAND), 8, 90)
        assert set(report.cond_log10) == {"S1", "S2"}
        assert abs(report.cond_log10["S1"] - 13.3237) < 0.01
        assert all(r > 0 for r in model.residues)
        assert max(report.node_residuals) <= 10 ** -(90 / 3)

    @pytest.mark.parametrize("label", sorted(BUILTIN))
    @pytest.mark.parametrize("scheme", ["equal", "log"])
    def test_positive_residues(self, label, scheme):
        model, report = fs.fit_stieltjes(BUILTIN[label], make_grid(scheme, 8), 8, 90, conditioning=False, rel_err=False)
        assert all(r > 0 for r in model.residues) and all(p < 0 for p in model.poles)
        assert max(report.node_residuals) <= 1e-30

    def test_simultaneous_diagonalization(self):
        pencil = fs.assemble_s1_s2(fs.build_interpolation_data(S1, make_grid("log", 8), 90), P)
        L, V = generalized_hermitian_eig(pencil.S1, pencil.S2, P)
        Vh = conj_transpose(V, P)
        eye = [[1 if i == j else 0 for j in range(8)] for i in range(8)]
        D = [[L[i] if i == j else 0 for j in range(8)] for i in range(8)]
        tol = ctx.mpf(10) ** -45 * 8
        assert _diff(matmul(matmul(Vh, pencil.S2, P), V, P), eye) <= tol
        assert _diff(matmul(matmul(Vh, pencil.S1, P), V, P), D) <= tol

    def test_pole_support(self):
        model, report = fs.fit_stieltjes(S1, make_grid("log", 10), 10, 90, conditioning=False, rel_err=False)
        c1 = 4 * 1.1**2 * 3e-8**2 / (1e-6 * 0.8**2 * 2.454e-5**2)
        assert all(float(p) <= -1 / c1 * (1 - 1e-2) for p in model.poles)
        assert not any("right of" in w for w in report.warnings)

    def test_agrees_with_pade(self):
        grid = make_grid("log", 10)
        a, _ = fs.fit_stieltjes(S1, grid, 10, 120, conditioning=False, rel_err=False)
        b, _ = fp.fit_pade(S1, grid, 10, 120, conditioning=False, rel_err=False)
        assert max_rel(a.poles, b.poles) < ctx.mpf(10) ** -40
        assert max_rel(a.residues, b.residues) < ctx.mpf(10) ** -40


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_exact_recovery_property(M, seed):
    alpha, poles, residues = random_model(np.random.default_rng(seed), M, P)
    model = fs.model_from_samples(synthetic_samples(poles, residues, P), alpha, P)
    order = sorted(range(M), key=lambda k: abs(poles[k]))
    assert max_rel(model.poles, [poles[k] for k in order]) < ctx.mpf(10) ** -30
    assert max_rel(model.residues, [residues[k] for k in order]) < ctx.mpf(10) ** -30


def test_agreement_tightens_with_digits():
    grid = make_grid("log", 8)
    gaps = []
    for digits in (40, 80):
        a, _ = fs.fit_stieltjes(S1, grid, 8, digits, conditioning=False, rel_err=False)
        b, _ = fp.fit_pade(S1, grid, 8, digits, conditioning=False, rel_err=False)
        gaps.append(max_rel(a.poles, b.poles) + max_rel(a.residues, b.residues))
    assert gaps[1] < gaps[0]
