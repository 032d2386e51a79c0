import os
import subprocess
import sys

import numpy as np
import pytest

from hodgesolve import generators, kernels
from hodgesolve.chain_ops import FillPlan, Squeezer
from hodgesolve.collapse import CollapsingSequence
from hodgesolve.embedding import build_T
from hodgesolve.graph_solver import SpanningForest

needs_compiled = pytest.mark.skipif("compiled" not in kernels.available(), reason="extension not built")


@pytest.fixture
def backend():
    prev = kernels.current()
    yield kernels.use
    kernels.use(prev)


def _run_all(cx, seed):
    fill = FillPlan(cx, CollapsingSequence.from_refs(cx.collapses))
    sq = Squeezer(cx, build_T(cx, verify=False))
    f = SpanningForest(cx.boundary_matrix(1))
    rng = np.random.default_rng(seed)
    g = cx.boundary_matrix(2) @ rng.integers(-3, 4, (cx.count(2), 3))
    x2 = rng.integers(-3, 4, (cx.count(2), 3))
    xf = rng.standard_normal((cx.count(2), 2))
    y1 = rng.standard_normal(cx.count(1))
    d0 = cx.boundary_matrix(1) @ rng.integers(-3, 4, cx.count(1))
    return [fill.apply(g), fill.adjoint(xf), sq.apply(x2), sq.apply(xf), sq.adjoint(xf),
            f.solve(d0), f.solve_T(y1)]


@needs_compiled
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_backend_parity(backend, seed):
    cx = generators.grid_ball(4, np.random.default_rng(seed))
    generators.set_K(cx, generators.plane_region(cx, 2, holes=[(2, 2)]))
    backend("compiled")
    a = _run_all(cx, seed)
    backend("python")
    b = _run_all(cx, seed)
    for u, v in zip(a, b):
        assert u.dtype == v.dtype
        if np.issubdtype(u.dtype, np.integer):
            assert np.array_equal(u, v)
        else:
            assert np.allclose(u, v, rtol=1e-13, atol=1e-13)


def test_env_forces_python():
    env = dict(os.environ, HODGESOLVE_KERNELS="python")
    out = subprocess.run([sys.executable, "-c", "from hodgesolve import kernels; print(kernels.current())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.use("fortran")


def test_integer_inputs_stay_integer():
    assert kernels.work_dtype(np.array([1, 2])) == np.int64
    assert kernels.work_dtype(np.array([1.0])) == np.float64
