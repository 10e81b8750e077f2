from .model_interface import ModelInterface


class ModelFactory:
    @staticmethod
    def create_model(model_kind: str, **kwargs) -> ModelInterface:
        if model_kind == "mlp":
            from .mlp import Mlp

            checkpoint = kwargs.get("init_checkpoint")
            if checkpoint:
                return Mlp.from_checkpoint(checkpoint)
            return Mlp.init(
                widths=kwargs.get("widths"),
                activation=kwargs.get("activation", "tanh"),
                seed=kwargs.get("seed", 0),
                omega0=kwargs.get("omega0", 30.0),
            )
        elif model_kind == "expr_field":
            from .expr_field import ExprField

            return ExprField(
                poly=kwargs.get("poly"),
                source=kwargs.get("source"),
                parametric=kwargs.get("parametric", False),
            )
        else:
            raise ValueError(f"Unknown model: {model_kind}")
