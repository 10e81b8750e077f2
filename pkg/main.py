import argparse
import os
import platform
import re
import sys

import numpy as np
import scipy
import torch
import yaml
from dotenv import load_dotenv
from loguru import logger
from rich.console import Console
from rich.table import Table

import __init__
from artifacts import read_columns, write_columns, write_json
from autodiff.jet import Jet2, NonFiniteResult
from barycentric.coords_factory import CoordinatesFactory
from barycentric.coords_interface import CoordinatesInterface, SingularSystem
from expr.evaluator import evaluate
from expr.parser import parse
from geometry.polygon import fan_triangulate
from geometry.quadrature import cubature, refine_triangles, triangle_quadrature
from geometry.sampling import random_interior, sample_points
from loss.inverse import COEFFICIENT_NAMES, SourceModel
from loss.loss_factory import LossFactory
from loss.loss_interface import ObjectiveInterface
from loss.parametric import to_physical
from network.model_factory import ModelFactory
from network.model_interface import ModelInterface
from optim.schedule import RunRecord, run_schedule
from train_config import UNIT_SQUARE, ConfigError, TrainConfig
from transfinite.boundary import BoundarySpec, check_matching
from transfinite.coons import coons_square
from transfinite.lifting import lift_g
from trial.trial_factory import TrialFactory
from trial.trial_interface import TrialInterface

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TRAINING = 3

# every domain error of the config, expression and geometry layers is a ValueError
CONFIG_ERRORS = (ValueError, NonFiniteResult, SingularSystem, OSError, yaml.YAMLError)

console = Console()


def evaluate_field(source: str, points: np.ndarray, p: np.ndarray | None = None) -> np.ndarray:
    """Expression values at points, broadcast to one value per point."""
    bindings = {"x": points[:, 0], "y": points[:, 1]}
    if p is not None:
        bindings["p"] = p
    value = evaluate(parse(source), bindings)
    return np.broadcast_to(np.asarray(value, dtype=float), (len(points),)).copy()


def evaluate_gradient(source: str, points: np.ndarray) -> np.ndarray:
    x, y = Jet2.seed(points[:, 0], points[:, 1])
    value = evaluate(parse(source), {"x": x, "y": y})
    if not isinstance(value, Jet2):
        return np.zeros((len(points), 2))
    shape = (len(points),)
    return np.stack([np.broadcast_to(value.gx, shape), np.broadcast_to(value.gy, shape)], axis=1)


def with_parameter(points: np.ndarray, values: list[float]) -> tuple[np.ndarray, np.ndarray]:
    """Every point paired with every p: (len(values) * P, 2) points and a (.., 1) p column."""
    tiled = np.tile(points, (len(values), 1))
    p = np.repeat(np.asarray(values, dtype=float), len(points))[:, None]
    return tiled, p


class PolyBCMain:
    """
    The experiment runner.
    It builds the polygon, boundary data, coordinates, network, trial and
    objective from a validated config, runs one command and writes its
    artifacts to the output directory.

    Attributes:
    - config (TrainConfig): the validated configuration.
    - coordinates (CoordinatesInterface): generalized barycentric coordinates.
    - spec (BoundarySpec): Dirichlet data.
    """

    config: TrainConfig
    coordinates: CoordinatesInterface
    spec: BoundarySpec

    def __init__(self, config: TrainConfig) -> None:
        logger.info(f"polybc, version {__init__.__version__}")
        self.config = config
        self.poly = config.poly
        self.output_dir = config.output_dir
        os.makedirs(self.output_dir, exist_ok=True)
        self.outputs: list[str] = []
        self.coordinates = self.init_coordinates()
        self.spec = self.init_spec()

    # Initialization methods

    def init_coordinates(self) -> CoordinatesInterface:
        return CoordinatesFactory.get_coordinates(self.config.coordinates, self.poly)

    def init_spec(self) -> BoundarySpec:
        if self.config.homogeneous:
            return BoundarySpec.homogeneous_spec(self.poly)
        spec = BoundarySpec.from_strings(self.poly, self.config.edges)
        report = check_matching(spec)
        logger.debug(f"vertex matching: {report}")
        return spec

    def init_model(self) -> ModelInterface:
        return ModelFactory.create_model("mlp", **self.config.network)

    def init_trial(self, model: ModelInterface, points: np.ndarray, extra: np.ndarray | None = None) -> TrialInterface:
        return TrialFactory.create_trial(
            self.config.trial,
            poly=self.poly,
            spec=self.spec,
            model=model,
            points=points,
            coordinates=self.coordinates,
            extra_inputs=extra,
        )

    def init_objective(self) -> ObjectiveInterface:
        cfg = self.config
        weights = None
        if cfg.kind == "ritz":
            triangles = refine_triangles(fan_triangulate(self.poly), cfg.cubature["level"])
            points, weights = cubature(triangles, triangle_quadrature(cfg.cubature["order"]))
        else:
            points = sample_points(self.poly, cfg.sampling, cfg.seed)
        extra = None
        if cfg.is_parametric:
            points, extra = with_parameter(points, cfg.parametric["train_p"])

        trial = self.init_trial(self.init_model(), points, extra)
        kwargs = {"trial": trial}
        if cfg.kind in ("poisson", "nonlinear_poisson", "ritz", "parametric_poisson"):
            kwargs["source_values"] = self.source_values(points, extra)
        if cfg.kind == "ritz":
            kwargs["weights"] = weights
        if cfg.kind == "inverse_poisson":
            data = read_columns(cfg.inverse["data_file"])
            missing = {"x", "y", "u"} - set(data)
            if missing:
                raise ConfigError("inverse.data_file", f"columns {sorted(missing)} are missing")
            kwargs["data_points"] = np.stack([data["x"], data["y"]], axis=1)
            kwargs["data_values"] = data["u"]
            kwargs["weight"] = cfg.inverse["data_weight"]
            kwargs["source"] = SourceModel(tuple(cfg.inverse["initial"]))
            logger.info(f"loaded {len(data['u'])} measurements from {cfg.inverse['data_file']}")
        return LossFactory.create_objective(cfg.kind, **kwargs)

    def source_values(self, points: np.ndarray, extra: np.ndarray | None) -> np.ndarray:
        if extra is None:
            return evaluate_field(self.config.source, points)
        p = extra[:, 0]
        x, y = to_physical(points[:, 0], points[:, 1], p)
        return evaluate_field(self.config.source, np.stack([x, y], axis=1), p)

    def path(self, name: str) -> str:
        path = os.path.join(self.output_dir, name)
        self.outputs.append(name)
        return path

    # Commands

    def cmd_coords(self) -> np.ndarray:
        """Coordinate values at the sampling points: x, y, lambda_1..lambda_n."""
        points = sample_points(self.poly, self.config.sampling, self.config.seed)
        lam = self.coordinates.at_points(self.poly, points)
        columns = {"x": points[:, 0], "y": points[:, 1]}
        columns.update({f"lambda_{i + 1}": lam[:, i] for i in range(self.poly.n)})
        write_columns(self.path("coords.csv"), columns)

        self.print_summary(
            "coordinates",
            {
                "coordinates": self.coordinates.name,
                "points": len(points),
                "max |sum - 1|": float(np.max(np.abs(lam.sum(axis=1) - 1.0))),
                "min value": float(lam.min()),
            },
        )
        self.write_manifest("coords")
        return lam

    def cmd_lift(self) -> dict:
        """The boundary interpolant g and its Laplacian at the sampling points."""
        points = sample_points(self.poly, self.config.sampling, self.config.seed)
        g = lift_g(self.poly, self.spec, self.coordinates.jets_at_points(self.poly, points))
        if isinstance(g, Jet2):
            g_values = np.broadcast_to(g.v, (len(points),))
            lap = np.broadcast_to(g.laplacian(), (len(points),))
        else:
            g_values = np.full(len(points), float(g))
            lap = np.zeros(len(points))
        columns = {"x": points[:, 0], "y": points[:, 1], "g": g_values, "laplacian_g": lap}
        if self.config.lift.get("compare_coons") and self.poly.as_list() == UNIT_SQUARE:
            columns["g_coons"] = np.broadcast_to(coons_square(self.spec, points[:, 0], points[:, 1]), (len(points),))
        write_columns(self.path("lift.csv"), columns)

        summary = {
            "coordinates": self.coordinates.name,
            "points": len(points),
            "boundary error": self.boundary_error(int(self.config.lift.get("boundary_per_edge", 250))),
            "vertex matching": str(check_matching(self.spec)),
        }
        self.print_summary("transfinite interpolant", summary)
        self.write_manifest("lift", summary)
        return columns

    def boundary_error(self, per_edge: int) -> float:
        """max |g - B| at per_edge points strictly inside every edge."""
        t = (np.arange(per_edge) + 0.5) / per_edge
        worst = 0.0
        for i in range(self.poly.n):
            x, y = self.poly.edge_point(i, t)
            points = np.stack([np.broadcast_to(x, t.shape), np.broadcast_to(y, t.shape)], axis=1)
            lam = self.coordinates.at_points(self.poly, points)
            g = np.broadcast_to(lift_g(self.poly, self.spec, lam), t.shape)
            b = self.spec.value_at(points, np.full(len(t), i), t)
            worst = max(worst, float(np.max(np.abs(g - b))))
        return worst

    def cmd_solve(self) -> RunRecord:
        if self.config.kind == "inverse_poisson":
            raise ConfigError("problem.kind", "inverse problems run with the inverse command")
        return self.train("solve")

    def cmd_inverse(self) -> RunRecord:
        if self.config.kind != "inverse_poisson":
            raise ConfigError("problem.kind", "the inverse command needs problem kind inverse_poisson")
        return self.train("inverse")

    def train(self, command: str) -> RunRecord:
        """
        Train, then write loss_history.csv, checkpoint.json, predictions.csv
        and the optional outputs. Outputs are written even when training
        stops early; the returned record then carries the error.
        """
        cfg = self.config
        objective = self.init_objective()
        logger.info(
            f"training {cfg.kind} ({cfg.trial} trial): {objective.n_params} parameters, {objective.n_points} points"
        )
        record = run_schedule(cfg.phases, objective, objective.initial_params(), cfg.seed)
        objective.store(record.params)

        record.write_csv(self.path("loss_history.csv"))
        objective.trial.model.save(self.path("checkpoint.json"))
        summary = {"epochs": len(record), "final loss": record.final_loss}
        summary.update(self.write_predictions(objective.trial))
        if cfg.export_samples:
            self.export_samples(objective.trial)
        if cfg.kind == "inverse_poisson":
            coefficients = objective.source.as_dict()
            write_json(self.path("coefficients.json"), coefficients)
            self.print_coefficients(coefficients)
        if cfg.kind == "ritz":
            summary["min energy"] = float(np.min(record.losses)) if len(record) else float("nan")
        if record.stalled:
            summary["stalled phases"] = ", ".join(str(k) for k in record.stalled)
        if record.error is not None:
            summary["error"] = str(record.error)

        self.print_summary(f"{command}: {cfg.kind}", summary)
        self.write_manifest(command, summary)
        return record

    def test_set(self) -> tuple[np.ndarray, np.ndarray | None]:
        cfg = self.config
        strategy = cfg.test_points or cfg.sampling
        points = sample_points(self.poly, strategy, cfg.seed)
        if cfg.is_parametric:
            return with_parameter(points, cfg.parametric["test_p"])
        return points, None

    def write_predictions(self, trial: TrialInterface) -> dict:
        cfg = self.config
        points, extra = self.test_set()
        u = trial.with_points(points, extra).evaluate_numpy()
        u_pred = np.broadcast_to(u.v, (len(points),))

        columns = {}
        if extra is None:
            physical = points
            columns.update(x=points[:, 0], y=points[:, 1])
        else:
            x, y = to_physical(points[:, 0], points[:, 1], extra[:, 0])
            physical = np.stack([x, y], axis=1)
            columns.update(x=x, y=y, p=extra[:, 0])
        columns["u_pred"] = u_pred

        metrics = {}
        u_exact = None
        if cfg.exact is not None:
            u_exact = evaluate_field(cfg.exact, physical, None if extra is None else extra[:, 0])
        elif cfg.exact_oracle == "edge_distance":
            u_exact = self.poly.min_distance(physical[:, 0], physical[:, 1])
        if u_exact is not None:
            err = np.abs(u_pred - u_exact)
            columns.update(u_exact=u_exact, abs_err=err)
            metrics.update({"max abs error": float(err.max()), "median abs error": float(np.median(err))})
            if cfg.exact is not None and extra is None:
                grad_pred = np.stack([np.broadcast_to(u.gx, u_pred.shape), np.broadcast_to(u.gy, u_pred.shape)], axis=1)
                grad_err = np.linalg.norm(grad_pred - evaluate_gradient(cfg.exact, points), axis=1)
                columns["grad_err"] = grad_err
                metrics["max gradient error"] = float(grad_err.max())
        write_columns(self.path("predictions.csv"), columns)
        return metrics

    def export_samples(self, trial: TrialInterface) -> None:
        """Trained solution at seeded random interior points, as x, y, u."""
        opts = self.config.export_samples
        if self.config.is_parametric:
            logger.warning("export_samples is not available for the parametric family; skipped")
            return
        points = random_interior(self.poly, opts["count"], opts["seed"])
        u = trial.with_points(points).evaluate_numpy()
        write_columns(
            self.path(opts["file"]),
            {"x": points[:, 0], "y": points[:, 1], "u": np.broadcast_to(u.v, (len(points),))},
        )
        logger.info(f"exported {len(points)} samples to {opts['file']}")

    # Reporting

    def print_summary(self, title: str, values: dict) -> None:
        table = Table(title=title)
        table.add_column("quantity")
        table.add_column("value", justify="right")
        for key, value in values.items():
            table.add_row(key, f"{value:.6e}" if isinstance(value, float) else str(value))
        console.print(table)

    def print_coefficients(self, coefficients: dict) -> None:
        table = Table(title="recovered source f = a0 + a1 x + a2 y + a3 x^2 + a4 y^2 + a5 xy")
        for name in COEFFICIENT_NAMES:
            table.add_column(name, justify="right")
        table.add_row(*(f"{coefficients[name]:.6f}" for name in COEFFICIENT_NAMES))
        console.print(table)

    def write_manifest(self, command: str, summary: dict | None = None) -> None:
        manifest = {
            "command": command,
            "version": __init__.__version__,
            "seed": self.config.seed,
            "config": self.config.raw,
            "versions": {
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "torch": torch.__version__,
            },
            "summary": summary or {},
            "outputs": list(self.outputs),
        }
        write_json(os.path.join(self.output_dir, "manifest.json"), manifest)


def load_config_with_env(path) -> dict:
    """
    Load the configuration file with environment variables.

    Parameters:
    - path (str): The path to the configuration file.

    Returns:
    - dict: The configuration dictionary.

    Raises:
    - FileNotFoundError if the configuration file is not found.
    - yaml.YAMLError if the configuration file is not a valid YAML file.
    """
    with open(path, "r", encoding="utf-8") as file:
        content = file.read()

    # Match ${VAR_NAME}
    pattern = re.compile(r"\$\{(\w+)\}")

    # unresolved placeholders stay as written
    def replacer(match):
        return os.getenv(match.group(1), match.group(0))

    content = pattern.sub(replacer, content)
    return yaml.safe_load(content)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polybc",
        description="Exact Dirichlet boundary conditions for neural PDE solvers on convex polygons.",
    )
    parser.add_argument("command", choices=("coords", "lift", "solve", "inverse"))
    parser.add_argument("--config", default="conf.yaml", help="YAML experiment file")
    parser.add_argument("--out", default=None, help="output directory (overrides OUTPUT_DIR)")
    parser.add_argument("--seed", type=int, default=None, help="seed (overrides SEED)")
    return parser


def configure_logging(verbose: bool, output_dir: str) -> None:
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else "INFO")
    os.makedirs(output_dir, exist_ok=True)
    logger.add(os.path.join(output_dir, "run.log"), level="DEBUG")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    load_dotenv()
    try:
        raw = load_config_with_env(args.config)
        training = args.command in ("solve", "inverse")
        config = TrainConfig.from_dict(raw, {"OUTPUT_DIR": args.out, "SEED": args.seed}, training)
    except CONFIG_ERRORS as e:
        logger.error(f"invalid configuration {args.config}: {e}")
        return EXIT_CONFIG

    configure_logging(config.verbose, config.output_dir)
    try:
        runner = PolyBCMain(config)
        result = getattr(runner, f"cmd_{args.command}")()
    except CONFIG_ERRORS as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_CONFIG
    if isinstance(result, RunRecord) and not result.ok:
        logger.error(f"training failed: {result.error}")
        return EXIT_TRAINING
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
