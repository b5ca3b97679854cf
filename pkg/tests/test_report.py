import json
import math

import numpy as np
import pytest

from jkdpoles import __version__
from jkdpoles.errors import ParseError, SchemaMismatch
from jkdpoles.fit_pade import fit_pade
from jkdpoles.fit_stieltjes import fit_stieltjes
from jkdpoles.material import BUILTIN
from jkdpoles.model import PoleResidueModel
from jkdpoles.mpcore import as_precision
from jkdpoles.report import (
    SCHEMA_VERSION,
    condition_report,
    dense_band,
    export_model,
    import_model,
    model_from_dict,
    model_to_dict,
    rel_err_profile,
    summarize_rel_err,
    table_conditions,
)
from jkdpoles.sampling import TABLE_BAND, make_grid

S1 = BUILTIN["S1"]


@pytest.fixture(scope="module")
def fitted():
    return fit_pade(S1, make_grid("log", 10), 10, 90)


def test_dense_band():
    w = dense_band()
    assert len(w) == 1000 and w[0] == 1e-3 and math.isclose(w[-1], 2e6)


class TestRelErr:
    def test_against_own_generator(self, fitted):
        model, _ = fitted
        _, exact = rel_err_profile(None, model, target=model, rounded=False)
        assert np.all(exact == 0)
        hp = model.evaluate_mp
        w = dense_band(n=200)
        target = lambda s: np.array([complex(hp(complex(v), 90)) for v in s])
        _, err = rel_err_profile(None, model, w, target=target)
        assert err.max() <= 1e-14

    def test_equal_grid_peak_and_ordering(self):
        out = {}
        for scheme in ("equal", "log"):
            model, _ = fit_pade(S1, make_grid(scheme, 10), 10, 90, conditioning=False, rel_err=False)
            out[scheme] = rel_err_profile(S1, model)
        w, e = out["equal"]
        assert out["log"][1].max() < e.max()
        # the peak sits well inside the first equal-grid gap
        assert w[np.argmax(e)] < make_grid("equal", 10).omegas[1] / 100

    def test_summary(self):
        assert summarize_rel_err(np.array([0.0, 1.0, 3.0])) == (3.0, 1.0)


class TestConditionReport:
    def test_identity(self):
        P = as_precision(40)
        eye = [[P.mpf(int(i == j)) for j in range(3)] for i in range(3)]
        assert condition_report({"I": eye}, P) == {"I": 0.0}

    def test_row_permutation_invariant(self):
        P = as_precision(60)
        rng = np.random.default_rng(1)
        A = [[P.mpc(complex(v)) for v in row] for row in rng.normal(size=(4, 8)) + 1j * rng.normal(size=(4, 8))]
        a = condition_report({"A": A}, P)["A"]
        b = condition_report({"A": A[::-1]}, P)["A"]
        assert math.isclose(a, b, abs_tol=1e-40)

    def test_table_entries_s1(self):
        c = table_conditions(S1, 8, "log", TABLE_BAND, 120)
        assert set(c) == {"A", "B", "S1", "S2"}
        assert abs(c["S1"] - 4.3014) < 0.01
        assert abs(c["A"] - 49.2328) < 0.01
        assert abs(c["B"] - 31.4021) < 0.01

    def test_fit_reports_only_own_matrices(self, fitted):
        _, rep = fitted
        assert set(rep.cond_log10) == {"A", "B"}
        _, rep2 = fit_stieltjes(S1, make_grid("log", 8), 8, 90, rel_err=False)
        assert set(rep2.cond_log10) == {"S1", "S2"}


class TestModelFile:
    def test_round_trip(self, fitted, tmp_path):
        model, rep = fitted
        path = tmp_path / "m.json"
        export_model(model, path, rep.to_dict())
        mf = import_model(path)
        assert mf.model.rounded() == model.rounded()
        assert mf.schema_version == SCHEMA_VERSION and mf.tool_version == __version__
        assert mf.diagnostics["cond_log10"].keys() == {"A", "B"}
        doc = json.loads(path.read_text())
        assert doc["grid"] == {"scheme": "log", "M": 10, "lo": 1e-3, "hi": 2e6}
        assert {"schema_version", "material", "approach", "digits", "alpha_inf", "poles", "residues"} <= set(doc)

    def test_full_precision(self, fitted, tmp_path):
        model, _ = fitted
        path = tmp_path / "m.json"
        export_model(model, path, full_precision=True)
        mf = import_model(path)
        ctx = as_precision(90).ctx
        for a, b in zip(mf.model.poles, model.poles):
            assert abs(a - b) <= ctx.mpf(10) ** -88 * abs(b)
        assert abs(mf.model.alpha_inf - model.alpha_inf) <= ctx.mpf(10) ** -88

    @pytest.mark.parametrize("field", ["poles", "schema_version", "material", "grid"])
    def test_missing_field(self, fitted, field):
        doc = model_to_dict(fitted[0])
        del doc[field]
        with pytest.raises(ParseError, match=field):
            model_from_dict(doc)

    def test_schema_mismatch(self, fitted):
        doc = model_to_dict(fitted[0])
        doc["schema_version"] = 99
        with pytest.raises(SchemaMismatch):
            model_from_dict(doc)

    def test_bad_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            import_model(path)

    def test_length_mismatch(self, fitted):
        doc = model_to_dict(fitted[0])
        doc["residues"] = doc["residues"][:-1]
        with pytest.raises(ParseError):
            model_from_dict(doc)


class TestModel:
    def test_sorted_by_magnitude(self):
        m = PoleResidueModel(1.0, (-5.0, -1.0, -3.0), (5.0, 1.0, 3.0))
        assert m.poles == (-1.0, -3.0, -5.0) and m.residues == (1.0, 3.0, 5.0)

    def test_value_at_zero_and_violations(self):
        m = PoleResidueModel(1.0, (-2.0, 1.0), (4.0, -1.0))
        assert m.value_at_zero(40) == 1 + 4 / 2 + (-1) / (-1)
        assert m.stieltjes_violations() == [0]  # sorted: pole 1.0 comes first

    def test_length_check(self):
        with pytest.raises(ValueError):
            PoleResidueModel(1.0, (-1.0,), ())
