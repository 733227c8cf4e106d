"""Half-maps, word matrices, inversion."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bcnf import NonInvertibleMap, Params
from bcnf.core import (all_shift_matrices, apply_following, apply_map,
                       half_matrix, invert_map, word_matrices)

finite = st.floats(-3.0, 3.0, allow_nan=False)
nonzero = st.floats(0.2, 3.0).flatmap(lambda d: st.sampled_from([d, -d]))
words = st.text(alphabet="LR", min_size=1, max_size=10)


def params_st():
    return st.builds(Params, tau_L=finite, delta_L=nonzero,
                     tau_R=finite, delta_R=nonzero, mu=finite)


def test_from_dict_exact_strings():
    a = Params.from_dict({"tau_L": "-55/117", "delta_L": "4/9",
                          "tau_R": "-2.5", "delta_R": "3/2", "mu": 1})
    assert a.tau_R == -2.5 and a.delta_R == 1.5
    assert a.tau_L == -55.0 / 117.0 and a.delta_L == 4.0 / 9.0
    # decimal text and the equivalent fraction produce the same double
    b = Params.from_dict({"tau_L": "-55/117", "delta_L": "4/9",
                          "tau_R": "-5/2", "delta_R": "1.5", "mu": "1"})
    assert a == b


@pytest.mark.parametrize("d", [
    {"tau_L": 0, "delta_L": 1, "tau_R": 0, "delta_R": 1},  # missing mu
    {"tau_L": 0, "delta_L": 1, "tau_R": 0, "delta_R": 1, "mu": 1, "nu": 2},
    {"tau_L": "x", "delta_L": 1, "tau_R": 0, "delta_R": 1, "mu": 1},
    {"tau_L": float("nan"), "delta_L": 1, "tau_R": 0, "delta_R": 1, "mu": 1},
])
def test_from_dict_rejects(d):
    with pytest.raises(ValueError):
        Params.from_dict(d)


def test_half_matrix_shape(pF):
    AL = half_matrix(pF, "L")
    assert AL[0, 1] == 1.0 and AL[1, 1] == 0.0
    assert np.trace(AL) == pF.tau_L and np.linalg.det(AL) == pytest.approx(pF.delta_L)
    with pytest.raises(ValueError):
        half_matrix(pF, "Q")


def test_map_continuous_on_switching_line(pF):
    # both affine pieces give the same image at x = 0
    for y in (-2.0, 0.0, 3.5):
        zR = np.array([[pF.tau_R, 1], [-pF.delta_R, 0]]) @ [0, y] + [pF.mu, 0]
        zL = np.array([[pF.tau_L, 1], [-pF.delta_L, 0]]) @ [0, y] + [pF.mu, 0]
        assert zR == pytest.approx(zL)
        assert apply_map(pF, (0.0, y)) == pytest.approx(zR)


def test_apply_following_matches_word_matrices(pF):
    z = np.array([0.3, -0.8])
    orbit = apply_following(pF, "RLLRR", z)
    assert len(orbit) == 6
    M, P = word_matrices(pF, "RLLRR")
    assert M @ z + P @ [pF.mu, 0] == pytest.approx(np.asarray(orbit[-1]))


@given(params_st(), words, words)
@settings(max_examples=60)
def test_word_matrix_composition(p, u, v):
    Mu, Pu = word_matrices(p, u)
    Mv, Pv = word_matrices(p, v)
    M, P = word_matrices(p, u + v)
    scale = max(1.0, np.abs(M).max(), np.abs(P).max())
    assert np.abs(M - Mv @ Mu).max() <= 1e-12 * scale
    assert np.abs(P - (Mv @ Pu + Pv)).max() <= 1e-12 * scale


@given(params_st(), words)
@settings(max_examples=60)
def test_all_shift_matrices_match_direct(p, w):
    fast = all_shift_matrices(p, w)
    assert len(fast) == len(w)
    tr0 = np.trace(fast[0][0])
    for i, (M, P) in enumerate(fast):
        Md, Pd = word_matrices(p, w[i:] + w[:i])
        assert np.abs(M - Md).max() <= 1e-10 * max(1.0, np.abs(Md).max())
        assert np.abs(P - Pd).max() <= 1e-10 * max(1.0, np.abs(Pd).max())
        # trace is a conjugacy invariant of the rotation class
        assert np.trace(M) == pytest.approx(tr0, rel=1e-10, abs=1e-12)


def test_invert_roundtrip(pF):
    rng = np.random.default_rng(7)
    for z in rng.uniform(-4, 4, size=(50, 2)):
        w = apply_map(pF, z)
        assert invert_map(pF, w) == pytest.approx(tuple(z), abs=1e-10)


def test_invert_requires_invertibility():
    p = Params(0.5, 0.0, -0.5, 1.0, 1.0)
    with pytest.raises(NonInvertibleMap):
        invert_map(p, (0.3, 0.2))
