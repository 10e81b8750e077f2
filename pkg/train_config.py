from dataclasses import dataclass, field

from expr.nodes import free_variables
from expr.parser import ExprSyntaxError, UnknownIdentifier, parse
from geometry.polygon import Polygon, PolygonError, regular_polygon, validate_polygon
from geometry.quadrature import MAX_ORDER
from geometry.sampling import Strategy, make_strategy
from loss.inverse import DEFAULT_DATA_WEIGHT
from loss.loss_factory import PROBLEM_KINDS
from network.mlp import ACTIVATIONS
from optim.schedule import InvalidPhase, Phase
from transfinite.boundary import BoundarySpec, check_matching

UNIT_SQUARE = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
COORDINATES = ("auto", "wachspress", "wachspress_global", "wachspress_quad", "mean_value")
EXACT_ORACLES = ("edge_distance",)


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


def _section(raw: dict, key: str, required: bool = False) -> dict:
    value = raw.get(key)
    if value is None:
        if required:
            raise ConfigError(key, "section is missing")
        return {}
    if not isinstance(value, dict):
        raise ConfigError(key, f"expected a mapping, got {type(value).__name__}")
    return value


def _expression(key: str, source, allowed: set[str]) -> str:
    if source is None:
        raise ConfigError(key, "expression is missing")
    source = str(source)
    try:
        expr = parse(source)
    except (ExprSyntaxError, UnknownIdentifier) as e:
        raise ConfigError(key, str(e)) from e
    unknown = free_variables(expr) - allowed
    if unknown:
        raise ConfigError(key, f"uses unbound variables {sorted(unknown)}")
    return source


def _strategy(key: str, section: dict) -> Strategy:
    try:
        return make_strategy(section)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(key, f"invalid sampling strategy ({e})") from e


@dataclass
class TrainConfig:
    """
    A validated experiment description.

    Every expression is parsed, the polygon is validated and the network
    widths are matched against the trial inputs before anything is computed.
    """

    raw: dict
    poly: Polygon
    coordinates: str = "auto"
    verbose: bool = False
    seed: int = 0
    output_dir: str = "runs/default"
    edges: list[str] | None = None
    homogeneous: bool = False
    kind: str = "poisson"
    source: str = "0"
    exact: str | None = None
    exact_oracle: str | None = None
    trial: str = "tfi"
    sampling: Strategy | None = None
    test_points: Strategy | None = None
    network: dict = field(default_factory=dict)
    phases: list[Phase] = field(default_factory=list)
    cubature: dict = field(default_factory=dict)
    parametric: dict = field(default_factory=dict)
    inverse: dict = field(default_factory=dict)
    export_samples: dict | None = None
    lift: dict = field(default_factory=dict)

    @property
    def is_parametric(self) -> bool:
        return self.kind == "parametric_poisson"

    @property
    def variables(self) -> set[str]:
        return {"x", "y", "p"} if self.is_parametric else {"x", "y"}

    @classmethod
    def from_dict(cls, raw: dict, overrides: dict | None = None, training: bool = True) -> "TrainConfig":
        """
        Validate a config mapping.

        Parameters:
        - raw (dict): the loaded YAML.
        - overrides (dict): values replacing top-level keys (OUTPUT_DIR, SEED).
        - training (bool): require the network and phases sections; the
          coords and lift commands do not train.

        Raises:
        - ConfigError: naming the first offending key.
        """
        if not isinstance(raw, dict):
            raise ConfigError("<root>", "config must be a mapping")
        raw = {**raw, **{k: v for k, v in (overrides or {}).items() if v is not None}}

        try:
            seed = int(raw.get("SEED", 0))
        except (TypeError, ValueError) as e:
            raise ConfigError("SEED", "must be an integer") from e
        if seed < 0:
            raise ConfigError("SEED", "must be nonnegative")

        problem = _section(raw, "problem", required=training)
        kind = problem.get("kind", "poisson")
        if kind not in PROBLEM_KINDS:
            raise ConfigError("problem.kind", f"unknown problem kind {kind!r}; expected one of {PROBLEM_KINDS}")

        cfg = cls(
            raw=raw,
            poly=cls._polygon(_section(raw, "polygon"), kind),
            verbose=bool(raw.get("VERBOSE", False)),
            seed=seed,
            output_dir=str(raw.get("OUTPUT_DIR", "runs/default")),
            kind=kind,
            trial=problem.get("trial", "tfi"),
        )

        coordinates = _section(raw, "polygon").get("coordinates", "auto")
        if coordinates not in COORDINATES:
            raise ConfigError("polygon.coordinates", f"unknown coordinates {coordinates!r}")
        cfg.coordinates = coordinates
        if cfg.trial not in ("tfi", "adf"):
            raise ConfigError("problem.trial", f"unknown trial {cfg.trial!r}")

        cfg._boundary(_section(raw, "boundary"))
        cfg._problem(problem)

        cfg.sampling = _strategy("sampling", _section(raw, "sampling", required=True))
        test = _section(raw, "test_points")
        cfg.test_points = _strategy("test_points", test) if test else None

        if training or raw.get("network") is not None:
            cfg._network(_section(raw, "network"))
        if training or raw.get("phases") is not None:
            cfg._phases(raw.get("phases"))
        cfg._cubature(_section(raw, "cubature"))
        cfg._parametric(_section(raw, "parametric"))
        cfg._inverse(_section(raw, "inverse"))
        export = _section(raw, "export_samples")
        if export:
            if int(export.get("count", 0)) < 1:
                raise ConfigError("export_samples.count", "must be at least 1")
            cfg.export_samples = {
                "count": int(export["count"]),
                "seed": int(export.get("seed", seed)),
                "file": str(export.get("file", "samples.csv")),
            }
        cfg.lift = _section(raw, "lift")
        return cfg

    @staticmethod
    def _polygon(section: dict, kind: str) -> Polygon:
        try:
            if "regular" in section:
                regular = section["regular"]
                return regular_polygon(int(regular["n"]), float(regular.get("radius", 1.0)))
            vertices = section.get("vertices", UNIT_SQUARE if kind == "parametric_poisson" else None)
            if vertices is None:
                raise ConfigError("polygon.vertices", "vertices are missing")
            poly = validate_polygon(vertices)
        except PolygonError as e:
            raise ConfigError("polygon.vertices", str(e)) from e
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError("polygon", f"invalid polygon ({e})") from e
        if kind == "parametric_poisson" and poly.as_list() != UNIT_SQUARE:
            raise ConfigError("polygon.vertices", "the parametric family is trained on the unit square")
        return poly

    def _boundary(self, section: dict):
        homogeneous = bool(section.get("homogeneous", False))
        if self.is_parametric and section.get("edges") is not None:
            raise ConfigError("boundary.edges", "the parametric family takes homogeneous data")
        if self.kind in ("parametric_poisson", "eikonal"):
            homogeneous = homogeneous or "edges" not in section
        if homogeneous:
            self.homogeneous = True
            return
        edges = section.get("edges")
        if not isinstance(edges, list):
            raise ConfigError("boundary.edges", "a list of edge expressions (or homogeneous: true) is required")
        if len(edges) != self.poly.n:
            raise ConfigError("boundary.edges", f"expected {self.poly.n} expressions, got {len(edges)}")
        self.edges = [_expression(f"boundary.edges[{i}]", e, {"x", "y", "t"}) for i, e in enumerate(edges)]
        try:
            report = check_matching(BoundarySpec.from_strings(self.poly, self.edges))
        except (ValueError, ArithmeticError) as e:
            raise ConfigError("boundary.edges", f"cannot evaluate at the corners ({e})") from e
        if not report.ok:
            raise ConfigError("boundary.edges", f"edge data must agree at every corner: {report}")

    def _problem(self, problem: dict):
        if self.kind != "eikonal":
            self.source = _expression("problem.source", problem.get("source", "0"), self.variables)
        if problem.get("exact") is not None:
            self.exact = _expression("problem.exact", problem["exact"], self.variables)
        oracle = problem.get("exact_oracle")
        if oracle is not None:
            if oracle not in EXACT_ORACLES:
                raise ConfigError("problem.exact_oracle", f"unknown oracle {oracle!r}")
            self.exact_oracle = oracle
        if self.trial == "adf" and (self.kind not in ("poisson", "nonlinear_poisson", "eikonal")):
            raise ConfigError("problem.trial", f"the distance-function trial does not support {self.kind}")

    def _network(self, section: dict):
        widths = section.get("widths")
        n_in = self.poly.n + (1 if self.is_parametric else 0)
        if section.get("init_checkpoint"):
            self.network = dict(section)
            return
        try:
            valid = isinstance(widths, list) and len(widths) >= 2 and all(int(w) >= 1 for w in widths)
        except (TypeError, ValueError):
            valid = False
        if not valid:
            raise ConfigError("network.widths", "expected a list of at least two positive widths")
        if int(widths[0]) != n_in:
            raise ConfigError("network.widths", f"first width must be {n_in} for this problem, got {widths[0]}")
        if int(widths[-1]) != 1:
            raise ConfigError("network.widths", "the network has a single output")
        activation = section.get("activation", "tanh")
        if activation not in ACTIVATIONS:
            raise ConfigError("network.activation", f"unknown activation {activation!r}")
        self.network = {
            "widths": [int(w) for w in widths],
            "activation": activation,
            "omega0": float(section.get("omega0", 30.0)),
            "seed": int(section.get("seed", self.seed)),
        }

    def _phases(self, phases):
        if not isinstance(phases, list) or not phases:
            raise ConfigError("phases", "at least one phase is required")
        try:
            self.phases = [Phase.from_dict(p) for p in phases]
        except (InvalidPhase, TypeError, ValueError, AttributeError) as e:
            raise ConfigError("phases", str(e)) from e
        if self.kind == "ritz" and any(p.batch_size for p in self.phases):
            raise ConfigError("phases", "the energy objective uses the full cubature")

    def _cubature(self, section: dict):
        order = int(section.get("order", 2))
        level = int(section.get("level", 3))
        if not 1 <= order <= MAX_ORDER:
            raise ConfigError("cubature.order", f"order must lie in 1..{MAX_ORDER}")
        if level < 0:
            raise ConfigError("cubature.level", "must be nonnegative")
        self.cubature = {"order": order, "level": level}

    def _parametric(self, section: dict):
        if not self.is_parametric:
            return
        train_p = section.get("train_p")
        if not isinstance(train_p, list) or not train_p:
            raise ConfigError("parametric.train_p", "a list of training values of p is required")
        values = [float(p) for p in train_p] + [float(p) for p in section.get("test_p", [])]
        if any(not 0.0 <= p <= 1.0 for p in values):
            raise ConfigError("parametric", "p must lie in [0, 1]")
        self.parametric = {
            "train_p": [float(p) for p in train_p],
            "test_p": [float(p) for p in section.get("test_p", train_p)],
        }

    def _inverse(self, section: dict):
        if self.kind != "inverse_poisson":
            return
        if not section.get("data_file"):
            raise ConfigError("inverse.data_file", "a data file is required")
        weight = float(section.get("data_weight", DEFAULT_DATA_WEIGHT))
        if weight < 0:
            raise ConfigError("inverse.data_weight", "must be nonnegative")
        initial = section.get("initial", [0.0] * 6)
        if not isinstance(initial, list) or len(initial) != 6:
            raise ConfigError("inverse.initial", "six starting coefficients are required")
        self.inverse = {
            "data_file": str(section["data_file"]),
            "data_weight": weight,
            "initial": [float(a) for a in initial],
        }
