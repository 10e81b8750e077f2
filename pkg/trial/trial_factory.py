from .trial_interface import TrialInterface


class TrialFactory:
    @staticmethod
    def create_trial(trial_kind: str, **kwargs) -> TrialInterface:
        """
        Parameters:
        - trial_kind (str): "tfi" (transfinite) or "adf" (distance function, unit square only).
        - kwargs: poly, spec, model, points, coordinates and optional extra_inputs.
        """
        if trial_kind == "tfi":
            from .tfi_trial import TransfiniteTrial

            return TransfiniteTrial(**kwargs)
        elif trial_kind == "adf":
            from .adf_trial import AdfSquareTrial

            return AdfSquareTrial(**kwargs)
        else:
            raise ValueError(f"Unknown trial: {trial_kind}")
