import math

import numpy as np
import pytest

from startele.channels import (
    PARAMETRIC,
    ChannelSpec,
    Family,
    build_channel,
    classify_star,
    spin_flip,
    superpose_equal,
)
from startele.tensor import PureState

R2 = math.sqrt(2)


def state(family, n=1.0, gamma=0.0, delta=0.0):
    return build_channel(ChannelSpec(family, n, gamma, delta)).state


def test_catalog_has_twelve_families():
    assert len(Family) == 12
    assert {f.value for f in Family} >= {"ghz", "w1", "star1", "s-wwtilde", "wn-wntilde"}


def test_spec_validation():
    with pytest.raises(ValueError):
        ChannelSpec(Family.WN, n=0)
    with pytest.raises(ValueError):
        ChannelSpec(Family.WN, gamma=2 * math.pi)
    with pytest.raises(ValueError):
        ChannelSpec.parse("bell")
    # non-parametric families ignore (n, gamma, delta)
    assert ChannelSpec.parse("ghz", n=7) == ChannelSpec(Family.GHZ)


def test_spec_dict_round_trip():
    spec = ChannelSpec(Family.WN_WNTILDE, 2.5, 0.3, 1.1)
    assert ChannelSpec.from_dict(spec.to_dict()) == spec


def test_ghz_amplitudes():
    a = state(Family.GHZ).amplitudes
    assert a[0] == pytest.approx(1 / R2) and a[7] == pytest.approx(1 / R2)
    assert np.count_nonzero(a) == 2


def test_w1_amplitudes():
    a = state(Family.W1).amplitudes
    assert a[0b100] == pytest.approx(0.5)
    assert a[0b010] == pytest.approx(0.5)
    assert a[0b001] == pytest.approx(R2 / 2)


def test_s_wwtilde_amplitudes():
    a = state(Family.S_WWTILDE).amplitudes
    for k in (0b100, 0b010, 0b011, 0b101):
        assert a[k] == pytest.approx(1 / (2 * R2))
    for k in (0b001, 0b110):
        assert a[k] == pytest.approx(0.5)
    assert a[0] == a[7] == 0


def test_wn_amplitudes_at_n_2():
    a = state(Family.WN, 2).amplitudes
    assert a[0b100] == pytest.approx(1 / math.sqrt(6))
    assert a[0b010] == pytest.approx(math.sqrt(2) / math.sqrt(6))
    assert a[0b001] == pytest.approx(math.sqrt(3) / math.sqrt(6))


def test_wn_at_one_is_w1():
    assert np.max(np.abs(state(Family.WN, 1).amplitudes - state(Family.W1).amplitudes)) < 1e-15
    assert np.max(np.abs(state(Family.WN_TILDE, 1).amplitudes - state(Family.W1_TILDE).amplitudes)) < 1e-15


def test_all_states_normalized_with_expected_signs():
    for fam in Family:
        for n in (1.0, 2.0, 3.5):
            a = state(fam, n).amplitudes
            assert abs(np.linalg.norm(a) - 1) < 1e-12
            assert np.all(np.abs(a.imag) < 1e-15)
            negatives = int(np.sum(a.real < 0))
            assert negatives == (1 if fam is Family.STAR1 else 0), fam
    phased = state(Family.WN, 2, 0.4, 1.3).amplitudes
    assert np.any(np.abs(phased.imag) > 0.1)


def test_spin_flip_examples():
    w_tilde = PureState.from_kets({"110": 1, "101": 1, "011": 1})
    assert spin_flip(state(Family.W_PROTOTYPE)).allclose(w_tilde)
    assert spin_flip(state(Family.W1)).allclose(state(Family.W1_TILDE))


@pytest.mark.parametrize("n", [1, 2, 3, 5, 10])
def test_spin_flip_maps_wn_to_wn_tilde(n):
    for gamma, delta in ((0.0, 0.0), (0.7, 2.9)):
        a = spin_flip(state(Family.WN, n, gamma, delta)).amplitudes
        b = state(Family.WN_TILDE, n, gamma, delta).amplitudes
        assert np.max(np.abs(a - b)) < 1e-12


def test_spin_flip_is_involution():
    rng = np.random.default_rng(5)
    for _ in range(100):
        s = PureState.normalized(rng.normal(size=8))
        assert spin_flip(spin_flip(s)).allclose(s)
        c = PureState.normalized(rng.normal(size=8) + 1j * rng.normal(size=8))
        assert spin_flip(spin_flip(c)).allclose(c)


def test_signed_spin_flip_differs_by_hamming_sign():
    w1 = state(Family.W1)
    signed = spin_flip(w1, signed=True).amplitudes
    plain = spin_flip(w1).amplitudes
    # sigma_y^(x)3 sends a weight-w ket to i^3 (-1)^w times its complement
    assert np.allclose(signed, 1j**3 * (-1) ** 1 * plain)
    ghz_signed = spin_flip(state(Family.GHZ), signed=True).amplitudes
    assert not np.allclose(ghz_signed, spin_flip(state(Family.GHZ)).amplitudes)


def test_superpose_examples():
    ww = superpose_equal(state(Family.W_PROTOTYPE), state(Family.W_TILDE_PROTOTYPE))
    assert ww.allclose(state(Family.W_WTILDE))
    s = superpose_equal(state(Family.W1), state(Family.W1_TILDE))
    assert s.allclose(state(Family.S_WWTILDE))
    g = state(Family.GHZ)
    assert superpose_equal(g, g).allclose(g)
    with pytest.raises(ValueError):
        superpose_equal(g, PureState(-g.amplitudes))


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_superpose_wn_pair_is_wn_wntilde(n):
    for gamma, delta in ((0.0, 0.0), (1.2, 0.5)):
        s = superpose_equal(state(Family.WN, n, gamma, delta), state(Family.WN_TILDE, n, gamma, delta))
        assert np.max(np.abs(s.amplitudes - state(Family.WN_WNTILDE, n, gamma, delta).amplitudes)) < 1e-12


@pytest.mark.parametrize("family", [Family.STAR, Family.STAR1, Family.S_WWTILDE, Family.WN_WNTILDE])
def test_star_type_states_are_stars(family):
    ch = build_channel(ChannelSpec(family))
    assert ch.center == 2
    rep = classify_star(ch, "C")
    assert rep.is_star


def test_star1_concurrences():
    rep = classify_star(state(Family.STAR1), "C")
    assert rep.center_loss_concurrence == pytest.approx(0, abs=1e-12)
    assert rep.peripheral_loss_concurrences == pytest.approx((0.5, 0.5), abs=1e-12)


def test_ghz_is_not_a_star():
    rep = classify_star(state(Family.GHZ), "C")
    assert rep.center_loss_separable
    assert not rep.peripheral_loss_entangled
    assert not rep.is_star


@pytest.mark.parametrize("family", [Family.W_PROTOTYPE, Family.W1, Family.W1_TILDE, Family.WN])
def test_w_types_are_not_stars(family):
    assert not classify_star(state(family, 2.0)).is_star


def test_star_center_matters():
    # with A as center, Star1 loses its star shape
    assert not classify_star(state(Family.STAR1), "A").is_star


def test_parametric_set():
    assert PARAMETRIC == {Family.WN, Family.WN_TILDE, Family.WN_WNTILDE}
