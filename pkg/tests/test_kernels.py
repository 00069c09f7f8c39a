"""Backend agreement: the compiled kernels must match the fallback bitwise."""

import numpy as np
import pytest

from shiftlab._core import _kernels_py

compiled = pytest.importorskip("shiftlab._core._kernels")

KERNELS = ("qr_star_pass", "phi_star_apply", "rq_star_pass", "rq_conjugate")


def random_inputs(rng):
    n = int(rng.integers(2, 9))
    d = rng.normal(size=n)
    e = rng.normal(size=n - 1)
    s = float(rng.normal())
    return d, e, s


@pytest.mark.parametrize("name", KERNELS)
def test_bitwise_parity(name):
    rng = np.random.default_rng(123)
    agreed = 0
    for _ in range(200):
        d, e, s = random_inputs(rng)
        try:
            got = getattr(compiled, name)(d, e, s, 1e-13)
            fell_through = False
        except ValueError as exc:
            with pytest.raises(ValueError) as other:
                getattr(_kernels_py, name)(d, e, s, 1e-13)
            assert other.value.args == exc.args
            fell_through = True
        if fell_through:
            continue
        want = getattr(_kernels_py, name)(d, e, s, 1e-13)
        for a, b in zip(got, want):
            if isinstance(a, bool):
                assert a == b
            else:
                assert np.array_equal(np.asarray(a), np.asarray(b))
        agreed += 1
    assert agreed > 100


def test_backend_reports_name():
    from shiftlab._core import BACKEND

    assert BACKEND in ("cython", "python")
    assert compiled.BACKEND == "cython"
    assert _kernels_py.BACKEND == "python"


def test_pure_python_env_override():
    import subprocess
    import sys

    out = subprocess.run(
        [sys.executable, "-c", "from shiftlab._core import BACKEND; print(BACKEND)"],
        env={"SHIFTLAB_PURE_PYTHON": "1", "PATH": "/usr/bin:/bin"},
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == "python"
