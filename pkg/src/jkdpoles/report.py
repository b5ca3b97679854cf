"""Relative-error profiles, condition numbers and model files."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ParseError, SchemaMismatch
from .material import MaterialParams, d_function_array
from .mpcore import as_precision, cond2_log10
from .model import PoleResidueModel
from .sampling import DEFAULT_BAND

SCHEMA_VERSION = 1
DENSE_POINTS = 1000


def dense_band(band=DEFAULT_BAND, n=DENSE_POINTS):
    """Log-spaced evaluation frequencies across ``band``."""
    return np.geomspace(band[0], band[1], n)


def rel_err_profile(m: MaterialParams | None, model: PoleResidueModel, omegas=None, *, target=None, rounded=True):
    """``|D(s) - D_est(s)| / |D(s)|`` at ``s = -i*omega``.

    The model is rounded to 64-bit floats first unless ``rounded=False``.
    ``target`` overrides the reference function (a callable of ``s``); by
    default it is the double-precision ``D`` of material ``m``.

    Returns ``(omegas, rel_err)``.
    """
    omegas = dense_band() if omegas is None else np.asarray(omegas, dtype=float)
    s = -1j * omegas
    if target is None:
        exact = d_function_array(m, s)
    else:
        exact = np.asarray(target(s), dtype=complex)
    approx = (model.rounded() if rounded else model)(s)
    return omegas, np.abs(exact - approx) / np.abs(exact)


def summarize_rel_err(rel_err):
    return float(np.max(rel_err)), float(np.median(rel_err))


def condition_report(matrices: dict, prec=None) -> dict:
    """``log10`` 2-norm condition number of every matrix in ``matrices``."""
    prec = as_precision(prec)
    return {name: cond2_log10(mat, prec) for name, mat in matrices.items()}


TABLE_MATRICES = ("A", "B", "S1", "S2")
TABLE_COLUMNS = ((8, "equal"), (8, "log"), (14, "equal"), (14, "log"))


def table_conditions(m: MaterialParams, M, scheme, band, digits=200) -> dict:
    """``log10`` conditions of ``A``, ``B``, ``S1``, ``S2`` for one grid.

    Only the matrices are assembled; no poles are extracted, so this works
    even where the fit itself would need more digits.
    """
    from .fit_pade import assemble_system, column_scaled, interpolation_samples, stacked_real
    from .fit_stieltjes import assemble_s1_s2, interpolation_data
    from .sampling import make_grid

    prec = as_precision(digits)
    grid = make_grid(scheme, M, *band)
    samples = interpolation_samples(m, grid, prec)
    A, _ = assemble_system(samples, M, prec)
    B, _ = column_scaled(stacked_real(A, prec), prec)
    pencil = assemble_s1_s2(interpolation_data(samples, prec), prec)
    return condition_report({"A": A, "B": B, "S1": pencil.S1, "S2": pencil.S2}, prec)


@dataclass
class ModelFile:
    model: PoleResidueModel
    approach: str = ""
    diagnostics: dict = field(default_factory=dict)
    tool_version: str = __version__
    schema_version: int = SCHEMA_VERSION


_REQUIRED = ("schema_version", "material", "approach", "grid", "digits", "alpha_inf", "poles", "residues")


def model_to_dict(model: PoleResidueModel, diagnostics=None, full_precision=False):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "material": model.material_label,
        "approach": model.approach,
        "grid": dict(model.grid) if model.grid else None,
        "digits": model.digits,
        "alpha_inf": float(model.alpha_inf),
        "poles": [float(p) for p in model.poles],
        "residues": [float(r) for r in model.residues],
        "diagnostics": _clean_diagnostics(diagnostics or {}),
    }
    if full_precision:
        digits = model.digits or 17
        doc["exact"] = {
            "alpha_inf": _decimal(model.alpha_inf, digits),
            "poles": [_decimal(p, digits) for p in model.poles],
            "residues": [_decimal(r, digits) for r in model.residues],
        }
    return doc


def _clean_diagnostics(diag):
    keep = {}
    if "cond_log10" in diag:
        keep["cond_log10"] = {k: float(v) for k, v in diag["cond_log10"].items()}
    for key in ("max_rel_err", "median_rel_err"):
        if diag.get(key) is not None:
            keep[key] = float(diag[key])
    return keep


def _decimal(x, digits):
    if hasattr(x, "_mpf_"):
        import mpmath

        return mpmath.nstr(x, digits, strip_zeros=False, min_fixed=1, max_fixed=0)
    return repr(float(x))


def model_from_dict(doc) -> ModelFile:
    if not isinstance(doc, dict):
        raise ParseError("model file must contain a JSON object")
    for key in _REQUIRED:
        if key not in doc:
            raise ParseError(f"model file is missing field {key!r}")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise SchemaMismatch(f"schema_version {doc['schema_version']!r} is not supported (expected {SCHEMA_VERSION})")
    if len(doc["poles"]) != len(doc["residues"]):
        raise ParseError("poles and residues have different lengths")
    digits = doc["digits"]
    exact = doc.get("exact")
    try:
        if exact:
            prec = as_precision(max(int(digits or 0), 30))
            alpha = prec.mpf(exact["alpha_inf"])
            poles = [prec.mpf(v) for v in exact["poles"]]
            residues = [prec.mpf(v) for v in exact["residues"]]
        else:
            alpha = float(doc["alpha_inf"])
            poles = [float(v) for v in doc["poles"]]
            residues = [float(v) for v in doc["residues"]]
    except (TypeError, ValueError, KeyError) as exc:
        raise ParseError(f"bad numeric field: {exc}") from None
    model = PoleResidueModel(
        alpha_inf=alpha,
        poles=tuple(poles),
        residues=tuple(residues),
        material_label=doc["material"],
        grid=doc["grid"],
        digits=digits,
        approach=doc["approach"],
    )
    return ModelFile(
        model=model,
        approach=doc["approach"],
        diagnostics=doc.get("diagnostics", {}),
        tool_version=doc.get("tool_version", ""),
        schema_version=doc["schema_version"],
    )


def export_model(model: PoleResidueModel, path, diagnostics=None, full_precision=False):
    doc = model_to_dict(model, diagnostics, full_precision)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
    return doc


def import_model(path) -> ModelFile:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None
    return model_from_dict(doc)
