import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from jkdpoles.mpcore import as_precision
from jkdpoles.sampling import DEFAULT_BAND, make_grid

settings.register_profile(
    "default",
    max_examples=int(os.environ.get("HYPOTHESIS_MAX_EXAMPLES", 25)),
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def synthetic_samples(poles, residues, prec, M=None, band=DEFAULT_BAND):
    """``(s, sum r/(s - p))`` at the log-grid nodes ``s = -i*omega``.

    A single node sits at the geometric mean of the band.
    """
    prec = as_precision(prec)
    ctx = prec.ctx
    M = len(poles) if M is None else M
    if M == 1:
        omegas = [ctx.sqrt(prec.mpf(band[0]) * prec.mpf(band[1]))]
    else:
        omegas = make_grid("log", M, *band).mp_omegas(prec)
    out = []
    for w in omegas:
        s = ctx.mpc(0, -w)
        out.append((s, ctx.fsum(prec.mpf(r) / (s - prec.mpf(p)) for p, r in zip(poles, residues))))
    return out


def random_model(rng, M, prec):
    """Distinct log-uniform poles in [-1e6, -1e-3], residues in (0, 1e3], alpha in [1, 5]."""
    prec = as_precision(prec)
    while True:
        lp = np.sort(rng.uniform(-3, 6, M))
        if M == 1 or np.min(np.diff(lp)) > 0:
            break
    poles = [-(prec.mpf(10) ** prec.mpf(float(x))) for x in lp]
    residues = [prec.mpf(float(1e3 - rng.uniform(0, 1e3))) for _ in range(M)]
    alpha = prec.mpf(float(rng.uniform(1, 5)))
    return alpha, poles, residues


def max_rel(a, b):
    return max(abs((x - y) / y) for x, y in zip(a, b))


@pytest.fixture
def prec90():
    return as_precision(90)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
