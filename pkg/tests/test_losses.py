import os

import numpy as np
import pytest
import yaml

from autodiff.jet import Jet2
from barycentric.coords_factory import CoordinatesFactory
from expr.evaluator import evaluate
from expr.parser import parse
from geometry.polygon import fan_triangulate
from geometry.quadrature import cubature, refine_triangles, triangle_quadrature
from geometry.sampling import grid_quad
from loss.inverse import EmptyData, SourceModel
from loss.loss_factory import LossFactory
from loss.parametric import jacobian, parametric_laplacian, to_physical
from network.model_factory import ModelFactory
from network.mlp import Mlp
from transfinite.boundary import BoundarySpec
from trial.trial_factory import TrialFactory
from conftest import interior_points

CONFIGS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "configs")
QUAD_EXACT = "(1-y)*(-2+2*x+y)"
# the parametric exact solution written in reference coordinates (x, y) -> (x, y (2 - (1-p) x) / 2)
PARAMETRIC_EXACT = "15*x*(y*(2-(1-p)*x)/2)*(1-x)*(2+p*x-x-2*(y*(2-(1-p)*x)/2))"


def parametric_source(x, y, p):
    return 15 * (y * (6 - 2 * p + 6 * (p - 1) * x) - 4 * y**2 + 4 * x - 4 * x**2)


def make_trial(poly, spec, model, points, extra_inputs=None):
    return TrialFactory.create_trial(
        "tfi",
        poly=poly,
        spec=spec,
        model=model,
        points=points,
        coordinates=CoordinatesFactory.get_coordinates("auto", poly),
        extra_inputs=extra_inputs,
    )


@pytest.fixture
def exact_quad_trial(poisson_quad):
    spec = BoundarySpec.from_strings(poisson_quad, [QUAD_EXACT] * 4)
    model = ModelFactory.create_model("expr_field", poly=poisson_quad, source=QUAD_EXACT)
    return lambda points: make_trial(poisson_quad, spec, model, points)


def test_poisson_residual_vanishes_for_exact_solution(poisson_quad, exact_quad_trial):
    trial = exact_quad_trial(grid_quad(poisson_quad, 10, 10))
    objective = LossFactory.create_objective("poisson", trial=trial, source_values=2.0)
    assert objective.value(objective.initial_params()) <= 1e-16


def test_ritz_energy_of_exact_solution(poisson_quad, exact_quad_trial):
    tris = refine_triangles(fan_triangulate(poisson_quad), 2)
    points, weights = cubature(tris, triangle_quadrature(2))
    objective = LossFactory.create_objective(
        "ritz", trial=exact_quad_trial(points), weights=weights, source_values=2.0
    )
    assert not objective.supports_batching
    assert objective.value(np.zeros(0)) == pytest.approx(103 / 48, abs=1e-10)


@pytest.mark.parametrize("source, expected", [(0.0, 1.0), (1.0, 0.0)])
def test_nonlinear_residual_of_zero(square, source, expected):
    mlp = Mlp([4, 5, 1])
    trial = make_trial(square, BoundarySpec.homogeneous_spec(square), mlp, grid_quad(square, 5, 5, 0.1))
    objective = LossFactory.create_objective("nonlinear_poisson", trial=trial, source_values=source)
    assert objective.value(mlp.get_params()) == pytest.approx(expected, abs=1e-14)


def test_eikonal_loss_of_zero(pentagon, rng):
    mlp = Mlp([5, 5, 1])
    trial = make_trial(pentagon, BoundarySpec.homogeneous_spec(pentagon), mlp, interior_points(pentagon, 20, rng))
    objective = LossFactory.create_objective("eikonal", trial=trial)
    assert objective.value(mlp.get_params()) == pytest.approx(1.0, abs=1e-5)


def test_parametric_geometry():
    assert jacobian(1.0, 0.0) == pytest.approx(0.5)
    assert jacobian(0.0, 0.3) == pytest.approx(1.0)
    assert to_physical(1.0, 1.0, 0.0) == (1.0, 0.5)
    assert to_physical(1.0, 1.0, 1.0) == (1.0, 1.0)


@pytest.mark.parametrize("p", [0.0, 0.375, 1.0])
def test_parametric_laplacian_matches_cartesian(p, rng):
    xi_v, eta_v = rng.uniform(size=10), rng.uniform(size=10)
    xi, eta = Jet2.seed(xi_v, eta_v)
    y = eta * (2.0 - (1.0 - p) * xi) / 2.0
    u = xi * xi * y + y * y * y
    lap = parametric_laplacian(u, xi_v, eta_v, p)
    np.testing.assert_allclose(lap, 8.0 * y.v, atol=1e-12)


def test_parametric_residual_vanishes_for_exact_family(square):
    grid = grid_quad(square, 7, 7)
    p_values = [0.0, 0.375, 1.0]
    points = np.concatenate([grid] * len(p_values))
    p = np.repeat(p_values, len(grid))
    model = ModelFactory.create_model("expr_field", poly=square, source=PARAMETRIC_EXACT, parametric=True)
    trial = make_trial(square, BoundarySpec.homogeneous_spec(square), model, points, extra_inputs=p)
    x, y = to_physical(points[:, 0], points[:, 1], p)
    objective = LossFactory.create_objective(
        "parametric_poisson", trial=trial, source_values=parametric_source(x, y, p)
    )
    assert objective.value(np.zeros(0)) <= 1e-18


def test_parametric_objective_needs_p(square):
    trial = make_trial(square, BoundarySpec.homogeneous_spec(square), Mlp([4, 3, 1]), grid_quad(square, 3, 3))
    with pytest.raises(ValueError):
        LossFactory.create_objective("parametric_poisson", trial=trial, source_values=0.0)


class TestInverse:
    def make(self, poisson_quad, exact_quad_trial, coefficients=(0.0,) * 6, data=None):
        trial = exact_quad_trial(grid_quad(poisson_quad, 6, 6, 0.05))
        if data is None:
            data = grid_quad(poisson_quad, 4, 4, 0.2)
        values = (1 - data[:, 1]) * (-2 + 2 * data[:, 0] + data[:, 1]) if len(data) else np.zeros(0)
        return LossFactory.create_objective(
            "inverse_poisson", trial=trial, data_points=data, data_values=values, weight=1e5, source=SourceModel(coefficients)
        )

    def test_true_source_gives_zero_loss(self, poisson_quad, exact_quad_trial):
        objective = self.make(poisson_quad, exact_quad_trial, (2.0, 0, 0, 0, 0, 0))
        assert objective.n_params == 6
        assert objective.value(objective.initial_params()) <= 1e-16

    def test_gradient_in_the_coefficients(self, poisson_quad, exact_quad_trial):
        objective = self.make(poisson_quad, exact_quad_trial)
        value, grad = objective.value_and_grad(objective.initial_params())
        assert value == pytest.approx(4.0, abs=1e-10)
        assert grad[0] == pytest.approx(-4.0, abs=1e-10)

    def test_store_updates_source(self, poisson_quad, exact_quad_trial):
        objective = self.make(poisson_quad, exact_quad_trial)
        objective.store(np.arange(6.0))
        assert objective.source.as_dict() == {"a0": 0.0, "a1": 1.0, "a2": 2.0, "a3": 3.0, "a4": 4.0, "a5": 5.0}

    def test_empty_data(self, poisson_quad, exact_quad_trial):
        with pytest.raises(EmptyData):
            self.make(poisson_quad, exact_quad_trial, data=np.zeros((0, 2)))

    def test_source_model(self):
        f = SourceModel((1.0, 2.0, 3.0, 4.0, 5.0, 6.0))
        assert f(np.array([[1.0, 2.0]]))[0] == pytest.approx(1 + 2 + 6 + 4 + 20 + 12)
        with pytest.raises(ValueError):
            SourceModel((1.0, 2.0))


def assert_gradient_matches(objective, theta, rng, samples=8):
    _, grad = objective.value_and_grad(theta)
    h = 1e-6
    for k in rng.choice(len(theta), size=min(samples, len(theta)), replace=False):
        step = np.zeros_like(theta)
        step[k] = h
        fd = (objective.value(theta + step) - objective.value(theta - step)) / (2 * h)
        assert grad[k] == pytest.approx(fd, rel=1e-5, abs=1e-7)


@pytest.mark.parametrize("kind", ["poisson", "nonlinear_poisson", "eikonal", "inverse_poisson"])
def test_parameter_gradients_match_finite_differences(pentagon, kind, rng):
    spec = BoundarySpec.from_strings(pentagon, ["0", "0", "sin(pi*(2*y-1))", "0", "0"])
    mlp = Mlp.init([5, 6, 6, 1], seed=3)
    trial = make_trial(pentagon, spec, mlp, interior_points(pentagon, 15, rng))
    if kind == "eikonal":
        kwargs = {}
    elif kind == "inverse_poisson":
        data = interior_points(pentagon, 5, rng)
        kwargs = {"data_points": data, "data_values": data[:, 0], "weight": 10.0}
    else:
        kwargs = {"source_values": 1.0}
    objective = LossFactory.create_objective(kind, trial=trial, **kwargs)
    theta = np.concatenate([mlp.get_params(), rng.normal(size=objective.n_params - mlp.n_params)])
    assert_gradient_matches(objective, theta, rng)


def test_ritz_gradient_matches_finite_differences(poisson_quad, rng):
    spec = BoundarySpec.from_strings(poisson_quad, [QUAD_EXACT] * 4)
    mlp = Mlp.init([4, 6, 6, 1], seed=4)
    points, weights = cubature(refine_triangles(fan_triangulate(poisson_quad), 1), triangle_quadrature(2))
    trial = make_trial(poisson_quad, spec, mlp, points)
    objective = LossFactory.create_objective("ritz", trial=trial, weights=weights, source_values=2.0)
    assert_gradient_matches(objective, mlp.get_params(), rng)


def test_parametric_gradient_matches_finite_differences(square, rng):
    grid = grid_quad(square, 4, 4, 0.1)
    p = np.repeat([0.0, 0.5, 1.0], len(grid))
    mlp = Mlp.init([5, 6, 6, 1], seed=5)
    points = np.concatenate([grid] * 3)
    trial = make_trial(square, BoundarySpec.homogeneous_spec(square), mlp, points, extra_inputs=p)
    x, y = to_physical(points[:, 0], points[:, 1], p)
    objective = LossFactory.create_objective(
        "parametric_poisson", trial=trial, source_values=parametric_source(x, y, p)
    )
    assert_gradient_matches(objective, mlp.get_params(), rng)


def test_minibatch_selects_points(pentagon, rng):
    spec = BoundarySpec.from_strings(pentagon, ["0", "0", "sin(pi*(2*y-1))", "0", "0"])
    mlp = Mlp.init([5, 6, 1], seed=3)
    trial = make_trial(pentagon, spec, mlp, interior_points(pentagon, 12, rng))
    objective = LossFactory.create_objective("poisson", trial=trial, source_values=np.arange(12.0))
    theta = mlp.get_params()
    halves = [objective.value(theta, np.arange(6)), objective.value(theta, np.arange(6, 12))]
    assert np.mean(halves) == pytest.approx(objective.value(theta), rel=1e-12)


def test_unknown_kind():
    with pytest.raises(ValueError):
        LossFactory.create_objective("heat")


def test_nonlinear_source_matches_its_exact_solution(rng):
    with open(os.path.join(CONFIGS, "nonlinear.yaml"), encoding="utf-8") as f:
        problem = yaml.safe_load(f)["problem"]
    exact, source = parse(problem["exact"]), parse(problem["source"])

    def u(x, y):
        return evaluate(exact, {"x": x, "y": y})

    x, y = rng.uniform(0.05, 0.95, size=(2, 50))
    h = 1e-4
    laplacian = (u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h) - 4 * u(x, y)) / h**2
    f = evaluate(source, {"x": x, "y": y})
    # -lap u + exp(u) = f
    residual = -laplacian + np.exp(u(x, y)) - f
    assert np.max(np.abs(residual)) <= 1e-6 * np.max(np.abs(f))
