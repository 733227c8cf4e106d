"""Saddle frames, the delta constraint, and the coexistence designer."""
import numpy as np
import pytest

from bcnf import FrameError, Params
from bcnf.design import (closed_family_RLR, conjugate_affine, delta_L_of,
                         design_frame, hat_y, residuals, saddle_frame,
                         solve_codim3, theorem1_check)

SQ10 = np.sqrt(10.0)


def test_saddle_frame_rlr(pF):
    fr = saddle_frame(pF, "RLR")
    assert fr.origin == pytest.approx((9 / 7, -4 / 7), rel=1e-13)
    assert fr.lambda1 == pytest.approx(6 / 13, rel=1e-13)
    assert fr.lambda2 == pytest.approx(13 / 6, rel=1e-13)
    assert abs(fr.lambda1 * fr.lambda2 - 1.0) <= 1e-14
    # unstable direction (3, 1)/sqrt(10)
    z2 = np.abs(np.asarray(fr.zeta2))
    assert z2 == pytest.approx([3 / SQ10, 1 / SQ10], rel=1e-12)


def test_frame_roundtrip(pF):
    fr = saddle_frame(pF, "RLR")
    rng = np.random.default_rng(3)
    for z in rng.uniform(-2, 2, size=(20, 2)):
        assert np.asarray(fr.to_xy(fr.to_uv(z))) == pytest.approx(z, abs=1e-12)
    assert fr.to_uv(fr.origin) == pytest.approx([0.0, 0.0], abs=1e-13)


def test_frame_requires_real_saddle():
    p = Params(0.1, 0.9, 0.1, 0.9, 1.0)  # complex pair on RL
    with pytest.raises(FrameError):
        saddle_frame(p, "RL")


def test_conjugated_return_map_is_diagonal(pF):
    fr = design_frame(pF, "RLR", "LR")
    g = conjugate_affine(pF, "RLR", fr)
    assert g.linear == pytest.approx(np.diag([6 / 13, 13 / 6]), abs=1e-12)
    assert g.offset == pytest.approx([0.0, 0.0], abs=1e-12)


def test_delta_constraint():
    # det M = 1 forces delta_L^nL * delta_R^nR = 1
    assert delta_L_of(1.5, "RLR") == pytest.approx(4 / 9, rel=1e-15)
    assert delta_L_of(2.0, "RLLR") == pytest.approx(0.5, rel=1e-14)


def test_closed_family_hits_param_f(pF):
    q = closed_family_RLR(1.5)
    assert q == pytest.approx(pF, rel=1e-15)
    assert residuals(q, "RLR", "LR").norm <= 1e-12


def test_hat_y_values(pI, pC):
    assert hat_y(pI, "RLLR", "LLR") == pytest.approx(-3.0, rel=1e-9)
    assert hat_y(pC, "RLRLR", "LR") == pytest.approx(-1.0, rel=1e-9)


def test_solver_refines_both_examples(pI, pC):
    assert pI.tau_L == 0.5 and pC.tau_L == -0.7
    assert pI.tau_R == pytest.approx(-1.139755486, abs=1e-6)
    assert pI.delta_R == pytest.approx(1.378851759, abs=1e-6)
    assert pC.tau_R == pytest.approx(-3.308423793481703, rel=1e-9)
    assert pC.delta_R == pytest.approx(1.6598706773042975, rel=1e-9)
    assert residuals(pI, "RLLR", "LLR").norm <= 1e-10
    assert residuals(pC, "RLRLR", "LR").norm <= 1e-10


def test_solver_accepts_dict_fixed():
    a = solve_codim3("RLR", "LR", fixed=("delta_R", 1.5), guess=(-0.5, -2.4))
    b = solve_codim3("RLR", "LR", fixed={"name": "delta_R", "value": 1.5},
                     guess=(-0.5, -2.4))
    assert a == b


def test_solver_rejects_undefined_alpha():
    with pytest.raises(ValueError):
        solve_codim3("RL", "LR", fixed=("tau_L", 0.5), guess=(-1.0, 1.5))


def test_frame_diagnostics_small(pF):
    rep = theorem1_check(pF, "RLR", "LR", k_max=4)
    assert abs(rep.gamma22) <= 1e-12
    assert abs(rep.sigma2) <= 1e-12
    assert rep.eq15_max_rel_err <= 1e-10
    assert len(rep.anchor_dist) == 4 and len(rep.decay_ratios) == 3
