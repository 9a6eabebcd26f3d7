import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from bitension import kernels
from bitension.kernels import _pykernel

compiled_only = pytest.mark.skipif("compiled" not in kernels.BACKENDS,
                                   reason="compiled extension not built")


def random_jets(rng, n):
    p = [rng.normal(size=n) for _ in range(5)]
    s = [rng.uniform(0.2, 2.0, n)] + [rng.normal(size=n) for _ in range(3)]
    lam = [rng.uniform(0.2, 2.0, n)] + [rng.normal(size=n) for _ in range(3)]
    return p, s, lam


def close(a, b, mags):
    return np.all(np.abs(np.asarray(a) - np.asarray(b)) <= 1e-12 * (1 + np.asarray(mags)))


def test_backend_names():
    assert "python" in kernels.BACKENDS
    assert kernels.BACKEND in kernels.BACKENDS


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.tension([np.ones(2)] * 3, [np.ones(2)] * 2, [np.ones(2)] * 2, 0, 1, backend="gpu")


@compiled_only
@pytest.mark.parametrize("c", [0.0, 0.7])
def test_compiled_matches_python(rng, c):
    p, s, lam = random_jets(rng, 257)
    py = kernels.residual_simplified(p, s, lam, c, 1.3, backend="python")
    cy = kernels.residual_simplified(p, s, lam, c, 1.3, backend="compiled")
    for a, b, mag in zip(py[:4], cy[:4], py[4:] + py[6:]):
        assert close(a, b, mag)
    for a, b in zip(py[4:], cy[4:]):
        np.testing.assert_allclose(a, b, rtol=1e-12)
    t_py = kernels.residual_termsum(p, s, lam, c, 1.3, backend="python")
    t_cy = kernels.residual_termsum(p, s, lam, c, 1.3, backend="compiled")
    for a, b, mag in zip(t_py, t_cy, py[6:]):
        assert close(a, b, mag)
    x_py = kernels.tension(p, s, lam, c, 1.3, backend="python")
    x_cy = kernels.tension(p, s, lam, c, 1.3, backend="compiled")
    for a, b in zip(x_py, x_cy):
        np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13)


@compiled_only
@given(a=st.floats(-3, 3), k=st.floats(-3, 3), a1=st.floats(-4, 4),
       r=arrays(np.float64, 16, elements=st.floats(0.0, 3.2)))
def test_obstruction_backends_agree(a, k, a1, r):
    py = kernels.obstruction(a, k, a1, r, backend="python")
    cy = kernels.obstruction(a, k, a1, r, backend="compiled")
    scale = 1 + abs(a) ** 5 * (1 + k ** 4)
    for u, v in zip(py, cy):
        assert np.all(np.abs(u - v) <= 1e-12 * scale)


@compiled_only
def test_zero_target_warp_with_c_zero(rng):
    # λ = 0 on the profile is harmless when c = 0: every 1/λ multiplies c
    p, s, lam = random_jets(rng, 8)
    lam[0][3] = 0.0
    for be in kernels.BACKENDS:
        out = kernels.residual_simplified(p, s, lam, 0.0, 1.0, backend=be)
        assert all(np.all(np.isfinite(o)) for o in out)
        assert not np.any(out[1]) and not np.any(out[3])


def test_broadcast_and_shape():
    p = [np.full((2, 3), v) for v in (0.5, 1.0, 0.0, 0.0, 0.0)]
    s = [np.full((2, 3), v) for v in (1.0, 0.0, 0.0, 0.0)]
    lam = [np.full((2, 3), v) for v in (0.8, 0.6, -0.8, -0.6)]
    out = kernels.residual_simplified(p, s, lam, 0.0, 1.0)
    assert all(o.shape == (2, 3) for o in out)


def test_termsum_terms_sum_to_route(rng):
    p, s, lam = random_jets(rng, 33)
    c = 0.4
    terms = _pykernel.termsum_terms(*p, *s, *lam, c, 1.1)
    r1, r2 = _pykernel.residual_termsum(*p, *s, *lam, c, 1.1)
    assert len(terms) == 12
    one = sum(v for name, v in terms.items() if name.endswith("1"))
    two = sum(v for name, v in terms.items() if name.endswith("2"))
    np.testing.assert_allclose(one, r1, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(c * two, r2, rtol=1e-12, atol=1e-12)


def test_environment_forces_python_backend():
    code = "import bitension.kernels as k; print(k.BACKEND)"
    run = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env=dict(os.environ, BITENSION_BACKEND="python"), check=True)
    assert run.stdout.strip() == "python"


@compiled_only
def test_compiled_is_the_default():
    env = {k: v for k, v in os.environ.items() if k != "BITENSION_BACKEND"}
    code = "import bitension.kernels as k; print(k.BACKEND)"
    run = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env=env, check=True)
    assert run.stdout.strip() == "compiled"
