import math

import numpy as np
import pytest

from bipmaps.errors import ConfigError, PhaseError
from bipmaps.weights import FaceWeights, derive_tree_weights, face_to_tree_factor, laws_for, power_law_with_kappa


def test_face_to_tree_factor(oracle):
    for r in range(1, 9):
        assert face_to_tree_factor(r) == oracle["bridge_counts"][str(r)]


def test_uniform_offspring_law_is_geometric_half(oracle):
    L = laws_for(FaceWeights.uniform_tree())
    assert L.kappa == 1.0 and L.kappa_tilde == 1.0
    assert np.allclose(L.pi(np.arange(20)), [oracle["pi_uniform"][str(i)] for i in range(20)], atol=1e-12, rtol=0)


@pytest.mark.parametrize("kappa,beta", [(0.3, 4.0), (0.5, 5.0), (0.8, 4.0)])
def test_power_law_hits_requested_kappa(kappa, beta):
    L = laws_for(power_law_with_kappa(kappa, beta))
    assert L.kappa == pytest.approx(kappa, rel=1e-6)
    assert L.tau == pytest.approx(1.0)
    assert 0 <= L.kappa_tilde < 1
    assert L.kappa_tilde == pytest.approx((L.kappa + L.pi0 - 1) / L.pi0)


def test_offspring_law_sums_to_one():
    L = laws_for(power_law_with_kappa(0.5, 5.0))
    i = np.arange(200000)
    assert L.pi(i).sum() + L.moment_tail(0, 199999) == pytest.approx(1.0, abs=1e-9)
    # mean offspring equals kappa in the condensation phase
    assert (i * L.pi(i)).sum() + L.moment_tail(1, 199999) == pytest.approx(L.kappa, rel=1e-6)


def test_bimodal_weights_are_exact():
    tw = derive_tree_weights(FaceWeights.bimodal())
    assert tw.w(2) == 1 and tw.w(1) == 0 and tw.w(3) == 0


def test_factorial_family_is_degenerate():
    L = laws_for(FaceWeights("factorial", c=1))
    assert L.degenerate and L.pi0 == 1.0 and L.kappa == 0.0
    with pytest.raises(PhaseError):
        L.xi_black_hat


@pytest.mark.parametrize("cfg,pointer", [
    ({"family": "nope"}, "/family"),
    ({"family": "power_law", "c": 1}, "/beta"),
    ({"family": "power_law", "c": 1, "beta": 1}, "/beta"),
    ({"family": "explicit", "q": {"1": 1}}, "/q"),
    ({"family": "explicit", "q": {"x": 1}}, "/q/x"),
    ({"family": "geometric", "a": -1}, "/a"),
])
def test_config_errors_carry_pointers(cfg, pointer):
    with pytest.raises(ConfigError) as exc:
        FaceWeights.from_config(cfg)
    assert exc.value.pointer == pointer


def test_config_round_trip():
    fw = power_law_with_kappa(0.5, 5.0)
    assert FaceWeights.from_config(fw.to_config()) == fw


def test_xi_tilde_normalised():
    L = laws_for(power_law_with_kappa(0.8, 4.0))
    k = np.arange(0, 100000)
    total = L.xi_tilde.pmf(k).sum() + L.xi_tilde.tail(99999)
    assert total == pytest.approx(1.0, abs=1e-6)
    assert math.isfinite(L.xi_tilde.mean())
