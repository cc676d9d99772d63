"""Backend selection via the DEFCG_BACKEND environment variable."""

import os
import subprocess
import sys

import pytest

import defcg._kernels as kernels

SNIPPET = "import defcg; print(defcg.BACKEND)"


def run_with_backend(value):
    env = dict(os.environ)
    if value is None:
        env.pop("DEFCG_BACKEND", None)
    else:
        env["DEFCG_BACKEND"] = value
    return subprocess.run(
        [sys.executable, "-c", SNIPPET], env=env, capture_output=True, text=True
    )


def test_numpy_forced():
    proc = run_with_backend("numpy")
    assert proc.returncode == 0
    assert proc.stdout.strip() == "numpy"


def test_default_prefers_compiled_when_available():
    try:
        kernels.load_backend("compiled")
    except ImportError:
        pytest.skip("compiled core not built")
    proc = run_with_backend(None)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "compiled"


def test_unknown_backend_fails_import():
    proc = run_with_backend("fortran")
    assert proc.returncode != 0
    assert "unknown DEFCG_BACKEND" in proc.stderr
