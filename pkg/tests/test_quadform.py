import numpy as np
import pytest

from usol.quadform import (GraphChart, QuadraticForm, block_rotation, canonical_chart,
                           eval_q, graph_height, graph_to_xi, q_graph_coords,
                           rotate_to_graph)


def test_eval_q_examples():
    assert eval_q(QuadraticForm(3, 1), [1.0, 2.0, 2.0]) == 7.0
    assert eval_q(QuadraticForm(3, 1), [0.0, 0.0, 0.0]) == 0.0
    assert eval_q(QuadraticForm(4, 2), [1.0, 1.0, 1.0, 1.0]) == 0.0


def test_eval_q_dimension_mismatch():
    with pytest.raises(ValueError):
        eval_q(QuadraticForm(3, 1), [1.0, 2.0])


def test_form_validation():
    with pytest.raises(ValueError):
        QuadraticForm(2, 1)
    with pytest.raises(ValueError):
        QuadraticForm(3, 0)
    assert QuadraticForm(3, 3).is_nonelliptic is False
    assert QuadraticForm(3, 2).is_nonelliptic is True


def test_rotation_null_vector():
    form = QuadraticForm(3, 1)
    eta = rotate_to_graph(form, [1.0, 0.0, 1.0])
    assert np.allclose(eta, [np.sqrt(2.0), 0.0, 0.0])
    assert abs(q_graph_coords(form, eta)) < 1e-14
    eta = rotate_to_graph(form, [0.0, 0.0, 1.0])
    assert np.allclose(eta, [2**-0.5, 0.0, 2**-0.5])
    assert abs(q_graph_coords(form, eta) - 1.0) < 1e-14


def test_rotation_preserves_q_and_norm():
    rng = np.random.default_rng(11)
    for d in (3, 4, 5):
        for k in range(1, d):
            form = QuadraticForm(d, k)
            xi = rng.standard_normal((40, d))
            eta = rotate_to_graph(form, xi)
            assert np.abs(q_graph_coords(form, eta) - eval_q(form, xi)).max() < 1e-12
            assert np.abs(np.linalg.norm(eta, axis=1)
                          - np.linalg.norm(xi, axis=1)).max() < 1e-12
            back = graph_to_xi(form, eta)
            assert np.abs(back - xi).max() < 1e-12


def test_rotation_rejects_elliptic():
    with pytest.raises(ValueError):
        rotate_to_graph(QuadraticForm(3, 3), [1.0, 0.0, 0.0])


def test_block_rotation_invariance():
    rng = np.random.default_rng(3)
    for d, k in ((3, 1), (4, 2), (5, 2)):
        form = QuadraticForm(d, k)
        # random orthogonal blocks via QR
        qneg, _ = np.linalg.qr(rng.standard_normal((k, k)))
        qpos, _ = np.linalg.qr(rng.standard_normal((d - k, d - k)))
        R = block_rotation(form, neg=qneg, pos=qpos)
        xi = rng.standard_normal((60, d))
        assert np.abs(eval_q(form, xi @ R.T) - eval_q(form, xi)).max() < 1e-10


def test_graph_height_examples():
    form3 = QuadraticForm(3, 1)
    assert graph_height(canonical_chart(form3, 1.0), [1.0, 0.0]) == pytest.approx(0.5)
    assert graph_height(canonical_chart(form3, -1.0), [2.0, 1.0]) == pytest.approx(-0.5)
    form4 = QuadraticForm(4, 2)
    assert graph_height(canonical_chart(form4, 1.0), [1.0, 1.0, 1.0]) == pytest.approx(0.5)


def test_graph_height_domain_error():
    chart = canonical_chart(QuadraticForm(3, 1), 1.0)
    with pytest.raises(ValueError):
        chart.height([0.9, 0.0])
    # boundary within tolerance is fine (quadrature nodes land there)
    chart.height([1.0 - 1e-10, 0.0])


def test_graph_property_exact():
    rng = np.random.default_rng(7)
    for d, k in ((3, 1), (4, 2), (5, 3)):
        form = QuadraticForm(d, k)
        chart = canonical_chart(form, rho=0.7)
        tilde = np.empty((50, d - 1))
        tilde[:, 0] = rng.uniform(1.0, 2.0, 50)
        tilde[:, 1:] = rng.uniform(-1.0, 1.0, (50, d - 2))
        h = chart.height(tilde)
        eta = np.concatenate([tilde, h[:, None]], axis=1)
        assert np.abs(q_graph_coords(form, eta) - 0.7).max() < 1e-12


def test_chart_rejects_bad_setup():
    with pytest.raises(ValueError):
        GraphChart(form=QuadraticForm(3, 1), rho=0.0)
    with pytest.raises(ValueError):
        GraphChart(form=QuadraticForm(3, 3), rho=1.0)
