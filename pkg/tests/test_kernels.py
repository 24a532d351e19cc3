import os
import subprocess
import sys

import numpy as np
import pytest

from flatklein import kernels
from flatklein.analysis.checks import stratified_samples

requires_compiled = pytest.mark.skipif("cython" not in kernels.available_backends(),
                                       reason="compiled kernels are not built")


def test_backend_reported():
    assert kernels.BACKEND in kernels.available_backends()
    assert kernels.get_backend("python") is kernels._kernels_py
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@requires_compiled
def test_backends_agree(atlas_n):
    rng = np.random.default_rng(3)
    u, v, _, _ = stratified_samples(atlas_n, 4000, rng)
    k_c, up_c = atlas_n.locate(u, v, backend="cython")
    k_p, up_p = atlas_n.locate(u, v, backend="python")
    np.testing.assert_array_equal(k_c, k_p)
    np.testing.assert_array_equal(up_c, up_p)
    np.testing.assert_allclose(atlas_n.evaluate(u, v, k_c, up_c, backend="cython"),
                               atlas_n.evaluate(u, v, k_p, up_p, backend="python"), atol=1e-14)
    np.testing.assert_allclose(atlas_n.jacobian(u, v, k_c, up_c, backend="cython"),
                               atlas_n.jacobian(u, v, k_p, up_p, backend="python"), atol=1e-14)


def test_environment_forces_fallback():
    env = dict(os.environ, FLATKLEIN_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from flatklein import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
