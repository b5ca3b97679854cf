"""Pole-residue model and fit report shared by both fitting approaches."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .mpcore import as_precision


@dataclass(frozen=True)
class PoleResidueModel:
    """``alpha_inf + sum_k r_k / (s - p_k)``.

    Poles and residues are stored as given (mpmath numbers straight out of a
    fit, or floats) and kept sorted by ascending ``|p_k|``.
    """

    alpha_inf: object
    poles: tuple
    residues: tuple
    material_label: str = ""
    grid: dict | None = None
    digits: int | None = None
    approach: str = ""

    def __post_init__(self):
        poles, residues = tuple(self.poles), tuple(self.residues)
        if len(poles) != len(residues):
            raise ValueError(f"{len(poles)} poles but {len(residues)} residues")
        order = sorted(range(len(poles)), key=lambda k: abs(poles[k]))
        object.__setattr__(self, "poles", tuple(poles[k] for k in order))
        object.__setattr__(self, "residues", tuple(residues[k] for k in order))

    @property
    def M(self):
        return len(self.poles)

    @property
    def poles_array(self):
        return np.array([float(p) for p in self.poles])

    @property
    def residues_array(self):
        return np.array([float(r) for r in self.residues])

    def rounded(self) -> "PoleResidueModel":
        """Copy with every parameter rounded to a 64-bit float."""
        return replace(
            self,
            alpha_inf=float(self.alpha_inf),
            poles=tuple(float(p) for p in self.poles),
            residues=tuple(float(r) for r in self.residues),
        )

    def __call__(self, s):
        """Evaluate in double precision (vectorized over ``s``)."""
        return kernels.eval_model(float(self.alpha_inf), self.poles_array, self.residues_array, s)

    def evaluate_mp(self, s, prec=None):
        prec = as_precision(prec)
        s = prec.convert(s)
        acc = prec.convert(self.alpha_inf)
        for p, r in zip(self.poles, self.residues):
            acc += prec.convert(r) / (s - prec.convert(p))
        return acc

    def value_at_zero(self, prec=None):
        """``D_est(0) = alpha_inf + sum(r_k / -p_k)``."""
        return self.evaluate_mp(0, prec)

    def stieltjes_violations(self):
        """Indices whose residue is not positive or whose pole is not negative."""
        return [k for k, (p, r) in enumerate(zip(self.poles, self.residues)) if not (r > 0 and p < 0)]


@dataclass
class FitReport:
    cond_log10: dict = field(default_factory=dict)
    node_residuals: list = field(default_factory=list)
    max_rel_err: float | None = None
    median_rel_err: float | None = None
    digits: int | None = None
    wall_time: float | None = None
    warnings: list = field(default_factory=list)

    def to_dict(self):
        return {
            "cond_log10": dict(self.cond_log10),
            "node_residuals": [float(v) for v in self.node_residuals],
            "max_rel_err": self.max_rel_err,
            "median_rel_err": self.median_rel_err,
            "digits": self.digits,
            "wall_time": self.wall_time,
            "warnings": list(self.warnings),
        }
