import numpy as np
import pytest
import torch

from autodiff.jet import Jet2
from network.expr_field import ExprField
from network.mlp import InvalidWidths, Mlp, param_count
from network.model_factory import ModelFactory


def dense_oracle(mlp, x):
    z = x
    layers = mlp.layers()
    for k, (w, b) in enumerate(layers):
        z = z @ w.T + b
        if k < len(layers) - 1:
            z = np.tanh(z) if mlp.activation == "tanh" else np.sin(mlp.omega0 * z)
    return z[:, 0]


@pytest.mark.parametrize(
    "widths, count",
    [([4, 20, 20, 1], 541), ([5, 20, 20, 20, 20, 1], 1401), ([1, 1, 1], 4)],
)
def test_param_count(widths, count):
    assert param_count(widths) == count
    assert Mlp.init(widths).n_params == count


@pytest.mark.parametrize("widths", [[4], [4, 0, 1], [4, 20, 2]])
def test_invalid_widths(widths):
    with pytest.raises(InvalidWidths):
        Mlp(widths)


def test_init_is_seeded():
    a = Mlp.init([4, 20, 20, 1], seed=7)
    b = Mlp.init([4, 20, 20, 1], seed=7)
    c = Mlp.init([4, 20, 20, 1], seed=8)
    np.testing.assert_array_equal(a.params, b.params)
    assert not np.array_equal(a.params, c.params)


def test_init_ranges():
    mlp = Mlp.init([4, 20, 1], activation="sine", seed=0, omega0=30.0)
    (w1, b1), (w2, b2) = mlp.layers()
    assert np.abs(w1).max() <= 1 / 4
    assert np.abs(w2).max() <= np.sqrt(6 / 20) / 30
    assert not b1.any() and not b2.any()
    tanh = Mlp.init([4, 20, 1], seed=0)
    assert np.abs(tanh.layers()[0][0]).max() <= np.sqrt(6 / 24)


def test_zero_network_outputs_zero():
    mlp = Mlp([3, 5, 1])
    np.testing.assert_array_equal(mlp(np.ones((4, 3))), 0.0)


@pytest.mark.parametrize("activation", ["tanh", "sine"])
def test_forward_matches_dense_oracle(activation, rng):
    mlp = Mlp.init([4, 20, 20, 1], activation=activation, seed=1, omega0=3.0)
    x = rng.uniform(size=(30, 4))
    np.testing.assert_allclose(mlp(x), dense_oracle(mlp, x), rtol=1e-14, atol=1e-14)


def test_single_unit_slope_at_zero():
    mlp = Mlp([1, 1, 1], params=[1.0, 0.0, 2.5, 0.0])
    x, _ = Jet2.seed(np.zeros(1), np.zeros(1))
    out = mlp(Jet2.stack([x], axis=-1))
    assert out.gx[0] == pytest.approx(2.5)
    assert out.hxx[0] == pytest.approx(0.0)


def test_jet_forward_matches_finite_differences(rng):
    mlp = Mlp.init([4, 20, 20, 1], seed=2)

    def inputs(x, y):
        return [x, y, x * y, 1.0 - x]

    def plain(x, y):
        return mlp(np.stack(inputs(x, y), axis=-1))

    px, py = rng.uniform(size=50), rng.uniform(size=50)
    u = mlp(Jet2.stack(inputs(*Jet2.seed(px, py)), axis=-1))
    h = 1e-4
    gx = (plain(px + h, py) - plain(px - h, py)) / (2 * h)
    hxx = (plain(px + h, py) - 2 * plain(px, py) + plain(px - h, py)) / h**2
    hxy = (plain(px + h, py + h) - plain(px + h, py - h) - plain(px - h, py + h) + plain(px - h, py - h)) / (4 * h**2)
    np.testing.assert_allclose(u.gx, gx, rtol=1e-6, atol=1e-8)
    np.testing.assert_allclose(u.hxx, hxx, rtol=1e-4, atol=1e-6)
    np.testing.assert_allclose(u.hxy, hxy, rtol=1e-4, atol=1e-6)


def test_torch_params_are_differentiable():
    mlp = Mlp.init([2, 5, 1], seed=0)
    params = torch.tensor(mlp.params, requires_grad=True)
    mlp(torch.ones(3, 2, dtype=torch.float64), params).sum().backward()
    assert params.grad is not None
    assert params.grad.shape == (mlp.n_params,)


def test_set_params_checks_length():
    mlp = Mlp.init([2, 5, 1])
    with pytest.raises(ValueError):
        mlp.set_params(np.zeros(3))


def test_checkpoint_round_trip(tmp_path):
    mlp = Mlp.init([4, 6, 1], activation="sine", seed=3, omega0=6.0)
    path = tmp_path / "checkpoint.json"
    mlp.save(path)
    loaded = ModelFactory.create_model("mlp", init_checkpoint=str(path))
    np.testing.assert_array_equal(loaded.params, mlp.params)
    assert (loaded.widths, loaded.activation, loaded.omega0) == ([4, 6, 1], "sine", 6.0)


def test_expr_field_rebuilds_cartesian_point(quad):
    field = ModelFactory.create_model("expr_field", poly=quad, source="x^2 + 3*y")
    assert isinstance(field, ExprField)
    lam = np.array([[1 / 3, 1 / 6, 1 / 6, 1 / 3]])
    assert field(lam)[0] == pytest.approx(0.25 + 1.5)
    assert field.n_params == 0


def test_factory_rejects_unknown_model():
    with pytest.raises(ValueError):
        ModelFactory.create_model("transformer")
