import numpy as np
import pytest

from usol.bumps import build_bump_kit, plateau_bump, smooth_transition, step_window
from usol.dyadic import build_delta_psi, build_pv_psi, dyadic_delta_sum, dyadic_pv_sum
from usol.quadrules import gauss_legendre_panels


@pytest.fixture(scope="module")
def kit():
    return build_bump_kit()


@pytest.fixture(scope="module")
def psi_delta(kit):
    return build_delta_psi(kit)


@pytest.fixture(scope="module")
def psi_pv(kit):
    return build_pv_psi(kit)


def test_transition_and_window():
    assert smooth_transition(-1.0) == 0.0
    assert smooth_transition(2.0) == 1.0
    ts = np.linspace(-5, 5, 401)
    total = sum(step_window(ts - j) for j in range(-8, 9))
    assert np.abs(total - 1.0).max() < 1e-14
    assert np.all(step_window(np.array([-1.0, 1.0, 2.0])) == 0.0)


def test_plateau_bump_support():
    x = np.array([0.99, 1.0, 1.074, 1.076, 1.5, 1.93, 1.95, 2.0])
    v = plateau_bump(x, 1.0, 2.0, 0.05)
    assert v[0] == 0.0 and v[1] == 0.0 and v[-1] == 0.0
    assert v[3] == 1.0 and v[4] == 1.0  # plateau


def test_phi_partition_and_support(kit):
    xs = np.geomspace(1e-8, 1e8, 97)
    total = sum(kit.phi(2.0**j * xs) for j in range(-60, 62))
    assert np.abs(total - 1.0).max() < 1e-10
    outside = np.array([0.5, 2.0, 0.1, 3.0, -2.0, -0.4])
    assert np.all(np.abs(kit.phi(outside)) < 1e-300)
    assert np.all(kit.phi(np.array([1.0, -1.0])) > 0.0)


def test_chi_mass_and_support(kit):
    xq, wq = gauss_legendre_panels(1.0, 2.0, 64, 24)
    assert abs(np.sum(wq * kit.chi(xq)) - 0.5) < 1e-12
    assert np.all(kit.chi(np.array([0.99, 2.01, -1.5])) == 0.0)
    assert kit.chi_cumulative(np.array([0.8]))[0] == 0.0
    assert kit.chi_cumulative(np.array([2.3]))[0] == 0.5


def test_beta_pair_partition(kit):
    ts = np.concatenate([np.linspace(-900, 900, 1201), np.array([0.0, 1e-9])])
    total = kit.beta0(ts) + sum(kit.beta(ts / 2.0**j) for j in range(1, 16))
    assert np.abs(total - 1.0).max() < 1e-10
    assert np.all(kit.beta0(np.array([2.01, -2.5, 100.0])) < 1e-12)


def test_quarter_bump_support(kit):
    assert kit.quarter(np.array([0.0]))[0] == pytest.approx(1.0)
    assert np.all(kit.quarter(np.array([0.25, -0.25, 0.3])) == 0.0)


def test_delta_psi_cache_accuracy(kit, psi_delta):
    # cached evaluator against direct quadrature of the defining transform
    xq, wq = gauss_legendre_panels(0.5, 2.0, 96, 24)
    pw = kit.phi(xq) * wq

    def direct(x):
        return 2.0 * (np.cos(2 * np.pi * np.outer(np.atleast_1d(x), xq)) @ pw)

    pts = np.array([0.0, 0.3, 1.9, 17.7, 63.1, 140.4, 191.5])
    assert np.abs(psi_delta.psi(pts) - direct(pts)).max() < 1e-12


def test_delta_identity(psi_delta):
    cases = [
        (lambda x: np.exp(-np.pi * x * x), 1.0, 1.0),
        (lambda x: x * np.exp(-np.pi * x * x), 0.0, 1.0),
        (lambda x: np.cos(2 * np.pi * x) * np.exp(-np.pi * x * x), 1.0, 0.5),
    ]
    for g, target, osc in cases:
        res = dyadic_delta_sum(psi_delta, g, -24, 24, g_osc_scale=osc)
        assert abs(res.value - target) < 1e-7


def test_pv_identity_and_oddness(psi_pv):
    res = dyadic_pv_sum(psi_pv, lambda x: x * np.exp(-np.pi * x * x), -24, 24)
    assert abs(res.value - 1.0) < 1e-7
    res = dyadic_pv_sum(psi_pv, lambda x: np.exp(-np.pi * x * x), -24, 24)
    assert abs(res.value) < 1e-8
    xs = np.geomspace(1e-4, 180.0, 401)
    assert np.abs(psi_pv(xs) + psi_pv(-xs)).max() == 0.0


def test_pv_hat_support(psi_pv):
    inner = np.linspace(-0.49, 0.49, 99)
    outer = np.concatenate([np.linspace(2.01, 9.0, 140),
                            -np.linspace(2.01, 9.0, 140)])
    assert np.abs(psi_pv.psi_hat(inner)).max() < 1e-10
    assert np.abs(psi_pv.psi_hat(outer)).max() < 1e-10


def test_pv_hat_two_ways(psi_pv):
    # closed-form primitive against a numerical transform of the cached psi
    ts = np.linspace(-2.5, 2.5, 41)
    xq, wq = gauss_legendre_panels(0.0, psi_pv.support_radius(), 800, 16)
    pv_vals = psi_pv(xq) * wq
    numeric = -2j * (np.sin(2 * np.pi * np.outer(ts, xq)) @ pv_vals)
    assert np.abs(numeric - psi_pv.psi_hat(ts)).max() < 1e-6


def test_pv_telescoping(psi_pv):
    xs = np.geomspace(1e-3, 1e3, 13)
    total = np.zeros_like(xs)
    for l in range(-44, 45):
        u = xs / 2.0**l
        total += u * psi_pv(u)
    assert np.abs(total - 1.0).max() < 1e-10


def test_varphi_consistency(psi_pv):
    # independent caches: varphi against x * psi(x)
    xs = np.concatenate([np.geomspace(1e-3, 150.0, 200),
                         -np.geomspace(1e-3, 150.0, 200)])
    assert np.abs(psi_pv.varphi(xs) - xs * psi_pv(xs)).max() < 1e-11


def test_profile_kind_guards(psi_delta, psi_pv):
    with pytest.raises(ValueError):
        dyadic_delta_sum(psi_pv, lambda x: np.exp(-x * x))
    with pytest.raises(ValueError):
        dyadic_pv_sum(psi_delta, lambda x: np.exp(-x * x))
