from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from procontracts import kernels
from procontracts.kernels import _pykernels
from procontracts.lang import DomainConfig
from procontracts.relation import Denotation, pack_bool

BACKENDS = [_pykernels] + ([kernels.compiled()] if kernels.compiled() else [])


def _bool_compose(a, b):
    return (a.astype(np.int64) @ b.astype(np.int64)) > 0


@st.composite
def matrices(draw, max_n=130):
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    density = draw(st.sampled_from([0.0, 0.02, 0.1, 0.5, 1.0]))
    rng = np.random.default_rng(seed)
    return rng.random((n, n)) < density, rng.random((n, n)) < density


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
@given(matrices())
def test_compose_matches_boolean_product(backend, pair):
    a, b = pair
    n = a.shape[0]
    got = backend.compose(pack_bool(a), pack_bool(b))
    assert np.array_equal(_pykernels.unpack(got, n), _bool_compose(a, b))


@given(matrices(max_n=70))
def test_backends_agree(pair):
    a, b = (pack_bool(m) for m in pair)
    outs = [k.compose(a, b) for k in BACKENDS]
    assert all(np.array_equal(outs[0], o) for o in outs)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_while_lfp_countdown(backend):
    n = 70
    step = np.zeros((n, n), bool)
    step[np.arange(1, n), np.arange(0, n - 1)] = True
    exit_rows = np.zeros((n, n), bool)
    exit_rows[0, 0] = True
    r, it = backend.while_lfp(pack_bool(exit_rows), pack_bool(step), n + 1)
    expected = np.zeros((n, n), bool)
    expected[:, 0] = True
    assert np.array_equal(_pykernels.unpack(r, n), expected)
    assert it <= n + 1


@given(matrices(max_n=40))
def test_while_lfp_backends_agree(pair):
    exit_rows, step = (pack_bool(m) for m in pair)
    n = pair[0].shape[0]
    outs = [k.while_lfp(exit_rows, step, n * n + 1) for k in BACKENDS]
    assert all(np.array_equal(outs[0][0], o[0]) for o in outs)


def test_active_backend_reported():
    assert kernels.BACKEND in ("cython", "numpy")
    assert kernels.compose is not None


def test_denotation_then_uses_kernel():
    d = DomainConfig(0, 3, ("x",))
    inc = Denotation.from_successors(d, np.array([1, 2, 3, -1]))
    two = inc.then(inc)
    assert two.pairs() == [(0, 2), (1, 3)]
    assert Denotation.identity(d).then(inc) == inc
