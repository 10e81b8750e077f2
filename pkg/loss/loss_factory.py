from .loss_interface import ObjectiveInterface

PROBLEM_KINDS = ("poisson", "nonlinear_poisson", "eikonal", "ritz", "parametric_poisson", "inverse_poisson")


class LossFactory:
    @staticmethod
    def create_objective(kind: str, **kwargs) -> ObjectiveInterface:
        """
        Parameters:
        - kind (str): one of PROBLEM_KINDS.
        - kwargs: trial plus the objective's own arguments (source values,
          cubature weights, data set).
        """
        if kind == "poisson":
            from .poisson import PoissonObjective

            return PoissonObjective(**kwargs)
        elif kind == "nonlinear_poisson":
            from .poisson import NonlinearPoissonObjective

            return NonlinearPoissonObjective(**kwargs)
        elif kind == "eikonal":
            from .eikonal import EikonalObjective

            return EikonalObjective(**kwargs)
        elif kind == "ritz":
            from .ritz import RitzObjective

            return RitzObjective(**kwargs)
        elif kind == "parametric_poisson":
            from .parametric import ParametricObjective

            return ParametricObjective(**kwargs)
        elif kind == "inverse_poisson":
            from .inverse import InverseObjective

            return InverseObjective(**kwargs)
        else:
            raise ValueError(f"Unknown problem kind: {kind}")
