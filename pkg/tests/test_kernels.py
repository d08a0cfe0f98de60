import os
import subprocess
import sys

import numpy as np
import pytest

from sbcn_opt import kernels


def test_forced_fallback():
    env = dict(os.environ, SBCN_OPT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from sbcn_opt import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_unknown_backend():
    with pytest.raises(ValueError, match="not available"):
        kernels.get_backend("fortran")


@pytest.mark.parametrize("name", sorted(kernels.BACKENDS))
def test_kernel_contract(name):
    mod = kernels.get_backend(name)
    # 0 -> 1 (w=1), 1 -> 0 (w=3), 1 -> 1 (w=2): in-edges of 0: {1}, of 1: {0, 1}
    indptr = np.array([0, 1, 3])
    pred = np.array([1, 0, 1])
    weight = np.array([3.0, 1.0, 2.0])
    F, B, R = mod.karp_fill(2, 0, indptr, pred, weight)
    assert R.dtype == bool and R.tolist() == [[True, False], [False, True], [True, True]]
    assert F[2].tolist() == [4.0, 3.0]
    assert B[2].tolist() == [1, 1]
    mu, v, k = mod.karp_min_mean(F, R, np.array([0, 1]), 1e-9)
    assert (mu, v) == (2.0, 0)
    mu, v, k = mod.karp_min_mean(F, R, np.array([1, 0]), 1e-9)
    assert (mu, v, k) == (2.0, 1, 1)
