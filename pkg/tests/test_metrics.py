"""Tests for scalar diagnostics and the closed-form recovery bounds."""

import math

import numpy as np
import pytest

from mdsense import (
    BoundInputs,
    ParameterOutOfRangeError,
    ShapeMismatchError,
    ZeroMatrixError,
    effective_rank,
    frobenius_norm,
    nuclear_norm,
    recon_error,
    spectral_norm,
    theorem3_bound,
    theorem4_bound,
)


# ---------------------------------------------------------------------------
# norms


def test_norm_triple_identity():
    I = np.eye(3)
    assert nuclear_norm(I) == pytest.approx(3.0)
    assert frobenius_norm(I) == pytest.approx(math.sqrt(3.0))
    assert spectral_norm(I) == pytest.approx(1.0)


def test_norm_triple_rank_one():
    u = np.array([[0.6], [0.8]])
    v = np.array([[1.0, 0.0, 0.0]])
    X = u @ v
    assert nuclear_norm(X) == pytest.approx(1.0)
    assert frobenius_norm(X) == pytest.approx(1.0)
    assert spectral_norm(X) == pytest.approx(1.0)


def test_norm_ordering_and_frobenius_entries():
    rng = np.random.default_rng(0)
    for _ in range(20):
        X = rng.standard_normal((4, 6))
        nuc, fro, spec = nuclear_norm(X), frobenius_norm(X), spectral_norm(X)
        assert spec <= fro + 1e-12 and fro <= nuc + 1e-12
        assert fro**2 == pytest.approx(float(np.sum(X**2)), rel=1e-12)


def test_norms_on_rectangular_diagonal():
    X = np.zeros((2, 4))
    X[0, 0], X[1, 1] = 3.0, 4.0
    assert nuclear_norm(X) == pytest.approx(7.0)
    assert frobenius_norm(X) == pytest.approx(5.0)
    assert spectral_norm(X) == pytest.approx(4.0)


# ---------------------------------------------------------------------------
# effective rank


def test_effective_rank_extremes():
    assert effective_rank(np.eye(5)) == pytest.approx(5.0)
    assert effective_rank(np.outer([1, 2], [3, 4])) == pytest.approx(1.0)
    assert effective_rank(np.diag([2.0, 2.0, 0.0])) == pytest.approx(2.0)


def test_effective_rank_scale_invariant():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((5, 5))
    base = effective_rank(X)
    for c in (1e-6, 0.5, 3.0, 1e8):
        assert effective_rank(c * X) == pytest.approx(base, rel=1e-10)


def test_effective_rank_between_one_and_dimension():
    rng = np.random.default_rng(2)
    for _ in range(20):
        X = rng.standard_normal((3, 7))
        er = effective_rank(X)
        assert 1.0 - 1e-12 <= er <= 3.0 + 1e-12


def test_effective_rank_rejects_zero():
    with pytest.raises(ZeroMatrixError):
        effective_rank(np.zeros((3, 3)))


# ---------------------------------------------------------------------------
# reconstruction error


def test_recon_error_examples():
    X = np.eye(2)
    assert recon_error(X, X) == 0.0
    Y = np.zeros((2, 2))
    assert recon_error(X, Y) == pytest.approx(math.sqrt(2.0))
    with pytest.raises(ShapeMismatchError):
        recon_error(np.zeros((2, 3)), np.zeros((3, 2)))


# ---------------------------------------------------------------------------
# RIP recovery bound


def psd_inputs(**kw):
    base = dict(nuclear_star=1.0, n=50, nprime=50, r=5, delta=0.1, alpha=1e-10)
    base.update(kw)
    return BoundInputs(**base)


def test_bound_value_matches_spreadsheet_recompute_psd():
    """Pinned composite value, rebuilt from scratch piece by piece."""
    out = theorem3_bound(psd_inputs(), psd_form=True)
    c_delta = 0.5 * (1.0 - math.sqrt(2.0 / 3.0) - 0.1 * (1.0 + math.sqrt(2.0 / 3.0)))
    assert c_delta == pytest.approx(9.2688049e-4, abs=1e-10)
    ratio = (math.log(1e10) - 1.0) / math.log(50.0) - 1.0
    delta_alpha = 1.0 / ratio
    assert delta_alpha == pytest.approx(0.2159689, abs=1e-7)
    hand = delta_alpha / (c_delta * math.sqrt(15.0))
    assert out.valid
    assert out.value == pytest.approx(hand, rel=1e-12)
    assert out.value == pytest.approx(60.16193445203009, rel=1e-9)


def test_bound_value_matches_spreadsheet_recompute_rect():
    b = BoundInputs(nuclear_star=1.0, n=40, nprime=60, r=3, delta=0.05, beta=1e-8)
    out = theorem3_bound(b, psd_form=False)
    log_ratio = math.log(1e8) - 1.0
    coef = 1.0 / (log_ratio / math.log(1.05 * 40) - 1.0)
    term = coef + (1.0 + coef) * 40 * 1e-8 / log_ratio
    c_delta = 0.5 * (1.0 - math.sqrt(2.0 / 3.0) - 0.05 * (1.0 + math.sqrt(2.0 / 3.0)))
    assert out.value == pytest.approx(term / (c_delta * 3.0), rel=1e-12)
    assert out.value == pytest.approx(1.9649368606288264, rel=1e-9)


def test_bound_shrinks_with_the_initialization_scale():
    values = [
        theorem3_bound(psd_inputs(alpha=a), psd_form=True).value
        for a in (1e-4, 1e-6, 1e-8, 1e-10, 1e-12)
    ]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_bound_infinite_for_width_one():
    b = BoundInputs(nuclear_star=1.0, n=1, nprime=1, r=1, delta=0.1, alpha=0.1)
    out = theorem3_bound(b, psd_form=True)
    assert out.value == math.inf and not out.valid


def test_bound_blows_up_near_the_admissible_edge():
    limit = 1.0 / (math.e * 50)
    out = theorem3_bound(psd_inputs(alpha=(1.0 - 1e-12) * limit), psd_form=True)
    assert out.value > 1e9


def test_bound_rejects_scale_beyond_the_edge():
    limit = 1.0 / (math.e * 50)
    with pytest.raises(ParameterOutOfRangeError):
        theorem3_bound(psd_inputs(alpha=1.001 * limit), psd_form=True)


def test_bound_infinite_when_rip_constant_too_large():
    out = theorem3_bound(psd_inputs(delta=0.5), psd_form=True)
    assert out.value == math.inf and not out.valid


def test_bound_input_validation():
    with pytest.raises(ParameterOutOfRangeError):
        theorem3_bound(psd_inputs(nuclear_star=0.0), psd_form=True)
    with pytest.raises(ParameterOutOfRangeError):
        theorem3_bound(psd_inputs(alpha=None), psd_form=True)
    with pytest.raises(ParameterOutOfRangeError):
        theorem3_bound(psd_inputs(delta=1.0), psd_form=True)
    with pytest.raises(ParameterOutOfRangeError):
        theorem3_bound(psd_inputs(alpha=-1e-8), psd_form=True)


# ---------------------------------------------------------------------------
# completion guarantee


def test_completion_sample_requirement_pinned():
    b = psd_inputs(alpha=1e-8, m=1000)
    out = theorem4_bound(b, psd_form=True)
    hand = math.ceil(32.0 * 1.1 * 5 * 100 * math.log(100.0) ** 2)
    assert out.sample_requirement == hand == 373254
    assert not out.m_sufficient
    more = theorem4_bound(psd_inputs(alpha=1e-8, m=373254), psd_form=True)
    assert more.m_sufficient


def test_completion_probability_clamped_when_vacuous():
    out = theorem4_bound(psd_inputs(alpha=1e-8, m=1000), psd_form=True)
    assert out.probability == 0.0 and not out.valid


def test_completion_guarantee_holds_at_larger_oversampling():
    b = BoundInputs(nuclear_star=1.0, n=500, nprime=500, r=2, alpha=1e-8,
                    m=10**7, c=3.0)
    out = theorem4_bound(b, psd_form=True)
    assert out.valid and out.m_sufficient
    assert out.probability == pytest.approx(0.999888202059737, rel=1e-9)
    assert out.sample_requirement == 9161680


def test_completion_value_approaches_constant_multiple():
    """The finite-sample amplifier decays to 1 as m grows."""
    big = theorem4_bound(psd_inputs(alpha=1e-8, m=10**18), psd_form=True)
    term = 1.0 / ((math.log(1e8) - 1.0) / math.log(50.0) - 1.0)
    assert big.value == pytest.approx(6.0 * term, rel=1e-5)
    small = theorem4_bound(psd_inputs(alpha=1e-8, m=100), psd_form=True)
    assert small.value > big.value


def test_completion_value_pinned():
    out = theorem4_bound(psd_inputs(alpha=1e-8, m=100000), psd_form=True)
    assert out.value == pytest.approx(5.988570636184726, rel=1e-9)


def test_completion_input_validation():
    with pytest.raises(ParameterOutOfRangeError):
        theorem4_bound(psd_inputs(alpha=1e-8, m=1000, c=1.0), psd_form=True)
    with pytest.raises(ParameterOutOfRangeError):
        theorem4_bound(psd_inputs(alpha=1e-8, m=0), psd_form=True)
    with pytest.raises(ParameterOutOfRangeError):
        theorem4_bound(psd_inputs(alpha=1e-8, m=1000, mu0=0.0), psd_form=True)
