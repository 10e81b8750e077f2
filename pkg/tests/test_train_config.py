import copy

import pytest

from geometry.sampling import GridQuad, Refine
from train_config import UNIT_SQUARE, ConfigError, TrainConfig

BASE = {
    "SEED": 3,
    "OUTPUT_DIR": "runs/test",
    "polygon": {"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]},
    "boundary": {"edges": ["0", "0", "sin(pi*x)", "0"]},
    "problem": {"kind": "poisson", "source": "0", "exact": "x*y"},
    "sampling": {"strategy": "grid_quad", "nx": 5, "ny": 5},
    "network": {"widths": [4, 8, 1], "activation": "tanh"},
    "phases": [{"optimizer": "adam", "epochs": 10, "lr": 0.01}, {"optimizer": "lbfgs", "epochs": 5}],
}


def config(**changes):
    raw = copy.deepcopy(BASE)
    for path, value in changes.items():
        *parents, key = path.split("__")
        target = raw
        for p in parents:
            target = target.setdefault(p, {})
        if value is None:
            target.pop(key, None)
        else:
            target[key] = value
    return raw


def rejects(raw, key, training=True):
    with pytest.raises(ConfigError) as e:
        TrainConfig.from_dict(raw, training=training)
    assert e.value.key == key
    return e.value


def test_valid_config():
    cfg = TrainConfig.from_dict(config())
    assert cfg.poly.n == 4
    assert cfg.seed == 3
    assert cfg.edges == ["0", "0", "sin(pi*x)", "0"]
    assert cfg.exact == "x*y"
    assert isinstance(cfg.sampling, GridQuad)
    assert cfg.test_points is None
    assert cfg.network == {"widths": [4, 8, 1], "activation": "tanh", "omega0": 30.0, "seed": 3}
    assert [p.optimizer for p in cfg.phases] == ["adam", "lbfgs"]
    assert cfg.cubature == {"order": 2, "level": 3}
    assert not cfg.is_parametric


def test_overrides_replace_top_level_keys():
    cfg = TrainConfig.from_dict(config(), {"OUTPUT_DIR": "elsewhere", "SEED": None})
    assert cfg.output_dir == "elsewhere"
    assert cfg.seed == 3
    assert TrainConfig.from_dict(config(), {"SEED": 9}).seed == 9


@pytest.mark.parametrize(
    "changes, key",
    [
        ({"problem": None}, "problem"),
        ({"problem__kind": "heat"}, "problem.kind"),
        ({"sampling": None}, "sampling"),
        ({"sampling__strategy": "hexagonal"}, "sampling"),
        ({"polygon__vertices": [[0, 0], [1, 0], [0.2, 0.2], [0, 1]]}, "polygon.vertices"),
        ({"polygon__vertices": [[0, 0], [0, 1], [1, 1], [1, 0]]}, "polygon.vertices"),
        ({"polygon__coordinates": "harmonic"}, "polygon.coordinates"),
        ({"boundary__edges": ["0", "0", "0"]}, "boundary.edges"),
        ({"boundary": None}, "boundary.edges"),
        ({"boundary__edges": ["0", "0", "sin(pi*x", "0"]}, "boundary.edges[2]"),
        ({"boundary__edges": ["0", "q", "0", "0"]}, "boundary.edges[1]"),
        ({"problem__source": "x*p"}, "problem.source"),
        ({"problem__exact": "2*"}, "problem.exact"),
        ({"problem__exact_oracle": "nearest"}, "problem.exact_oracle"),
        ({"problem__trial": "xfem"}, "problem.trial"),
        ({"network__widths": [3, 8, 1]}, "network.widths"),
        ({"network__widths": [4, 8, 2]}, "network.widths"),
        ({"network__widths": [4]}, "network.widths"),
        ({"network__widths": [4, 0, 1]}, "network.widths"),
        ({"network__activation": "relu"}, "network.activation"),
        ({"phases": []}, "phases"),
        ({"phases": [{"optimizer": "sgd", "epochs": 1}]}, "phases"),
        ({"phases": [{"optimizer": "adam"}]}, "phases"),
        ({"cubature": {"order": 8}}, "cubature.order"),
        ({"cubature": {"level": -1}}, "cubature.level"),
        ({"SEED": -1}, "SEED"),
        ({"SEED": "abc"}, "SEED"),
        ({"export_samples": {"count": 0}}, "export_samples.count"),
    ],
)
def test_invalid_config_names_the_key(changes, key):
    rejects(config(**changes), key)


def test_error_message_carries_the_key():
    error = rejects(config(network__widths=[3, 8, 1]), "network.widths")
    assert str(error).startswith("network.widths: first width must be 4")


def test_config_must_be_a_mapping():
    rejects([1, 2, 3], "<root>")


def test_edge_parameter_is_bound():
    cfg = TrainConfig.from_dict(config(boundary__edges=["t*(1-t)", "0", "0", "0"]))
    assert cfg.edges[0] == "t*(1-t)"


def test_regular_polygon():
    raw = config(polygon={"regular": {"n": 8}}, boundary={"homogeneous": True}, network__widths=[8, 8, 1])
    cfg = TrainConfig.from_dict(raw)
    assert cfg.poly.n == 8
    assert cfg.homogeneous
    assert cfg.edges is None


def test_coords_command_needs_no_training_sections():
    raw = {
        "polygon": {"vertices": [[0, 0], [2, 0], [1, 1], [0, 1]], "coordinates": "wachspress_quad"},
        "boundary": {"homogeneous": True},
        "sampling": {"strategy": "refine", "level": 2},
    }
    cfg = TrainConfig.from_dict(raw, training=False)
    assert cfg.coordinates == "wachspress_quad"
    assert isinstance(cfg.sampling, Refine)
    assert cfg.network == {}
    assert cfg.phases == []
    rejects(raw, "problem")


def test_eikonal_defaults_to_homogeneous_data():
    raw = config(boundary=None, problem={"kind": "eikonal", "exact_oracle": "edge_distance"})
    cfg = TrainConfig.from_dict(raw)
    assert cfg.homogeneous
    assert cfg.exact_oracle == "edge_distance"


class TestParametric:
    def raw(self, **changes):
        raw = config(
            polygon=None,
            boundary={"homogeneous": True},
            problem={"kind": "parametric_poisson", "source": "p*x", "exact": "p*x*y"},
            network__widths=[5, 8, 1],
            parametric={"train_p": [0.0, 0.5, 1.0]},
        )
        raw.update(changes)
        return raw

    def test_defaults_to_unit_square(self):
        cfg = TrainConfig.from_dict(self.raw())
        assert cfg.is_parametric
        assert cfg.poly.as_list() == UNIT_SQUARE
        assert cfg.variables == {"x", "y", "p"}
        assert cfg.parametric == {"train_p": [0.0, 0.5, 1.0], "test_p": [0.0, 0.5, 1.0]}

    def test_needs_the_unit_square(self):
        rejects(self.raw(polygon={"vertices": [[0, 0], [2, 0], [2, 1], [0, 1]]}), "polygon.vertices")

    def test_takes_homogeneous_data(self):
        rejects(self.raw(boundary={"edges": ["0", "0", "x", "0"]}), "boundary.edges")

    def test_network_takes_p(self):
        raw = self.raw()
        raw["network"] = {"widths": [4, 8, 1]}
        rejects(raw, "network.widths")

    def test_training_values(self):
        rejects(self.raw(parametric={}), "parametric.train_p")
        rejects(self.raw(parametric={"train_p": [0.0, 1.5]}), "parametric")
        rejects(self.raw(parametric={"train_p": [0.5], "test_p": [-0.1]}), "parametric")


class TestInverse:
    def raw(self, **inverse):
        raw = config(problem={"kind": "inverse_poisson"}, network__widths=[4, 8, 1])
        raw["inverse"] = {"data_file": "samples.csv", **inverse}
        return raw

    def test_defaults(self):
        cfg = TrainConfig.from_dict(self.raw())
        assert cfg.inverse["data_file"] == "samples.csv"
        assert cfg.inverse["initial"] == [0.0] * 6
        assert cfg.inverse["data_weight"] > 0

    def test_invalid(self):
        rejects(self.raw(data_file=""), "inverse.data_file")
        rejects(self.raw(initial=[0.0, 1.0]), "inverse.initial")
        rejects(self.raw(data_weight=-1.0), "inverse.data_weight")


def test_energy_objective_rejects_minibatches():
    raw = config(problem={"kind": "ritz", "source": "1"}, phases=[{"optimizer": "adam", "epochs": 5, "batch_size": 4}])
    rejects(raw, "phases")


def test_distance_trial_is_limited_to_strong_forms():
    raw = config(problem={"kind": "ritz", "source": "1", "trial": "adf"})
    rejects(raw, "problem.trial")


@pytest.mark.parametrize(
    "edges",
    [
        ["0", "1", "0", "0"],
        ["x", "0", "0", "0"],
        ["0", "0", "sin(pi*x)", "1 - y"],
    ],
)
def test_corner_jumps_are_rejected(edges):
    error = rejects(config(boundary__edges=edges), "boundary.edges")
    assert "corner" in str(error)


def test_matching_data_within_rounding_is_accepted():
    # sin(4*pi) is of order 1e-16 at the corner (1, 0)
    raw = config(boundary__edges=["-sin(4*pi*x)", "0", "0", "0"])
    assert TrainConfig.from_dict(raw).edges[0] == "-sin(4*pi*x)"
