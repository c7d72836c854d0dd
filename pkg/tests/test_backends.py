"""Direct agreement tests between the two enumeration backends.

Both ``_kernels.numba_backend`` and ``_kernels.numpy_backend`` implement
``closure_count`` (bitmap BFS over twisted products) and ``count_matching``
(exhaustive predicate counting over parity patterns).  These tests call the
two modules side by side on identical inputs, so any divergence in the hot
loops is caught independently of which backend the package selected.
"""

import os
import subprocess
import sys

import numpy as np
import pytest

pytest.importorskip("numba")

from arborgroups import _kernels
from arborgroups._kernels import numpy_backend
from arborgroups._kernels import numba_backend
from arborgroups.automorphisms import node_count
from arborgroups.counting import _MODE_CODE, _mask_arrays
from arborgroups.functionals import Portrait, predicate_spec
from arborgroups.generators import pink_generators


def both_closures(gens, nbits, budget):
    packed = np.array(gens, dtype=np.uint64)
    a = numba_backend.closure_count(packed, nbits, budget)
    b = numpy_backend.closure_count(packed, nbits, budget)
    return (int(a[0]), bool(a[1])), (int(b[0]), bool(b[1]))


def test_closure_agreement_on_generator_sets():
    for portrait, depth in [
        (Portrait(3, 1), 3),
        (Portrait(3, 1), 4),
        (Portrait(3, 2), 4),
        (Portrait(4, 2), 4),
    ]:
        gens = [g.bits for g in pink_generators(portrait, depth).generators]
        (ca, ta), (cb, tb) = both_closures(gens, node_count(depth), 1 << 22)
        assert (ca, ta) == (cb, tb)
        assert not ta


def test_closure_agreement_on_arbitrary_masks():
    rng = np.random.default_rng(20260815)
    nbits = node_count(4)  # 15
    for _ in range(5):
        gens = [int(v) for v in rng.integers(0, 1 << nbits, size=3)]
        (ca, ta), (cb, tb) = both_closures(gens, nbits, 1 << 16)
        assert (ca, ta) == (cb, tb)


def test_closure_budget_truncation_matches():
    gens = [g.bits for g in pink_generators(Portrait(3, 1), 4).generators]
    # full order is 2^10; a budget of 100 must truncate in both backends
    (ca, ta), (cb, tb) = both_closures(gens, node_count(4), 100)
    assert ta and tb
    assert ca == cb == 100


def test_count_matching_agreement_and_shards():
    for portrait, n, variant in [
        (Portrait(3, 2), 4, "tMp"),
        (Portrait(3, 2), 4, "tBp"),
        (Portrait(3, 1), 4, "tMp"),
        (Portrait(4, 2), 4, "Mp"),
    ]:
        spec = predicate_spec(portrait, n, variant)
        p, rl, rqa, rqb = _mask_arrays(spec)
        pm, rm = _MODE_CODE[spec.p_mode], _MODE_CODE[spec.r_mode]
        nbits = node_count(n)
        total = 1 << nbits
        full_nb = int(numba_backend.count_matching(nbits, p, pm, rl, rqa, rqb, rm, 0, total))
        full_np = int(numpy_backend.count_matching(nbits, p, pm, rl, rqa, rqb, rm, 0, total))
        assert full_nb == full_np
        # sharded sums reproduce the full count in both backends
        cuts = [0, total // 3, total // 2, total]
        shards_nb = sum(
            int(numba_backend.count_matching(nbits, p, pm, rl, rqa, rqb, rm, lo, hi))
            for lo, hi in zip(cuts, cuts[1:])
        )
        shards_np = sum(
            int(numpy_backend.count_matching(nbits, p, pm, rl, rqa, rqb, rm, lo, hi))
            for lo, hi in zip(cuts, cuts[1:])
        )
        assert shards_nb == full_nb
        assert shards_np == full_nb


def test_selected_backend_is_numba_here():
    # numba imports in this environment, so the default selection is numba
    # unless the env var forces numpy
    if os.environ.get("ARBOR_BACKEND", "") in ("", "numba"):
        assert _kernels.BACKEND_NAME == "numba"


def test_env_var_forces_numpy_backend():
    code = (
        "from arborgroups import _kernels; "
        "assert _kernels.BACKEND_NAME == 'numpy', _kernels.BACKEND_NAME; "
        "import arborgroups._kernels.numpy_backend as nb; "
        "assert _kernels.closure_count is nb.closure_count"
    )
    env = dict(os.environ, ARBOR_BACKEND="numpy")
    proc = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr


def test_env_var_rejects_unknown_backend():
    code = "import arborgroups._kernels"
    env = dict(os.environ, ARBOR_BACKEND="fortran")
    proc = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert proc.returncode != 0
    assert "ARBOR_BACKEND" in proc.stderr
