import os
import subprocess
import sys

import numpy as np
import pytest

from loewner_qc import _core, _fallback
from loewner_qc import drivers as D

HORIZONS = (10.0, 20.0, 40.0, 80.0)

try:
    from loewner_qc import _kernels
except ImportError:  # extension not built
    _kernels = None

needs_compiled = pytest.mark.skipif(_kernels is None, reason="compiled kernel not built")

CASES = [
    D.constant_power(0.7, 1.0, 1),
    D.constant_power(0.5, 0.0, 3),
    D.extremal_a3(0.3),
    D.extremal_a3(0.8, -1),
    D.blaschke(0.5, 0.7, [0.3, -0.2j]),
    D.blaschke(0.6, 0.0, [0.0, 0.5]),
]


def _points():
    rng = np.random.default_rng(7)
    z = np.sqrt(rng.uniform(0, 1, 12)) * np.exp(2j * np.pi * rng.uniform(0, 1, 12))
    z = np.concatenate([z, np.exp(1j * np.array([0.0, 1.0, np.pi]))])
    t = np.concatenate([np.zeros(6), rng.uniform(0, 2, 9)])
    return t, z


@needs_compiled
@pytest.mark.parametrize("d", CASES, ids=lambda d: f"{d.family.value}-{d.k}")
def test_backends_agree(d):
    t, z = _points()
    spec = d.kernel_spec()
    a, sa, na = _fallback.chain_limits(spec, t, z, HORIZONS, 1e-12, 1e-14, 1e-10)
    b, sb, nb = _kernels.chain_limits(spec, t, z, HORIZONS, 1e-12, 1e-14, 1e-10)
    assert np.array_equal(sa, sb)
    assert np.all(sa == _fallback.OK)
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(a))
    assert np.max(np.abs(na - nb)) <= 2


@needs_compiled
def test_compiled_backend_selected_by_default():
    if os.environ.get("LOEWNER_QC_PURE") == "1":
        pytest.skip("pure backend forced by environment")
    assert _core.BACKEND == "compiled"


def test_env_var_forces_fallback():
    code = "from loewner_qc import _core; print(_core.BACKEND)"
    env = dict(os.environ, LOEWNER_QC_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"


def test_fallback_reports_nonconvergence():
    spec = D.constant_power(0.5).kernel_spec()
    # horizons too short and tolerance too tight for a Cauchy match
    vals, status, _ = _fallback.chain_limits(spec, [0.0], [0.5], (0.5, 1.0), 1e-12, 1e-14, 1e-14)
    assert status[0] == _fallback.NOT_CONVERGED
