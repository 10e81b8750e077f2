from .optimizer_interface import OptimizerInterface


class OptimizerFactory:
    NAMES = ("adam", "lbfgs")

    @staticmethod
    def get_optimizer(name: str, **kwargs) -> OptimizerInterface:
        """
        Parameters:
        - name (str): "adam" or "lbfgs".
        - kwargs: optimizer settings (lr, decay, beta1, beta2, eps for Adam;
          history, c1, c2, max_line_search for L-BFGS).
        """
        if name == "adam":
            from .adam import Adam

            return Adam(**kwargs)
        elif name == "lbfgs":
            from .lbfgs import Lbfgs

            return Lbfgs(**kwargs)
        else:
            raise ValueError(f"Unknown optimizer: {name}")
