import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reppricing import kernels

compiled = kernels.compiled_backend
python = kernels.python_backend
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


@needs_compiled
@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4]), st.integers(1, 60), st.integers(0, 60))
def test_allocate_sales_parity(seed, sellers, rounds, n):
    rng = np.random.default_rng(seed)
    reps = np.sort(rng.uniform(0.1, 0.95, sellers))
    u = 2.0
    # coarse prices make exact utility ties common
    prices = np.round(rng.uniform(0.5, 2.0, (rounds, sellers)), 1)
    draws = rng.random((rounds, n))
    n_uninf = int(rng.integers(0, n + 1))
    a = compiled.allocate_sales(prices, reps, u, n_uninf, draws, 1e-12)
    b = python.allocate_sales(prices, reps, u, n_uninf, draws, 1e-12)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])


@needs_compiled
@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pure_payoffs_parity(seed):
    rng = np.random.default_rng(seed)
    own = np.round(rng.uniform(1.0, 1.6, 30), 2)
    rival = np.round(rng.uniform(1.0, 1.8, 40), 2)
    args = (0.8, 0.9, 2.0, 1.0, 1.4, 100.0, 1e-12)
    np.testing.assert_allclose(compiled.pure_payoffs(own, rival, *args),
                               python.pure_payoffs(own, rival, *args), rtol=0, atol=1e-12)


def test_pure_payoffs_cases():
    out = python.pure_payoffs([1.5], [1.6, 1.7, 1.8], 0.8, 0.9, 2.0, 1.0, 1.4, 100, 1e-12)
    # L at 1.5 vs H: parity price 1.7; below wins, at ties, above loses
    np.testing.assert_allclose(out[0], [0.5 * 35, 0.5 * 50, 0.5 * 65])


def test_forced_python_backend():
    env = dict(os.environ, REPPRICING_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from reppricing import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
