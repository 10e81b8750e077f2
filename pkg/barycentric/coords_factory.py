from geometry.polygon import Polygon

from .coords_interface import CoordinatesInterface


class CoordinatesFactory:
    @staticmethod
    def get_coordinates(name: str, poly: Polygon | None = None) -> CoordinatesInterface:
        """
        Parameters:
        - name (str): "auto", "wachspress", "wachspress_global", "wachspress_quad" or "mean_value".
        - poly (Polygon | None): needed to resolve "auto" and to check quad-only variants.

        Returns:
        - CoordinatesInterface: the coordinate evaluator.
        """
        if name == "auto":
            if poly is None:
                raise ValueError("coordinates 'auto' needs the polygon")
            name = "wachspress_quad" if poly.n == 4 else "wachspress_global"

        if name == "wachspress":
            from .wachspress import WachspressInterior

            coords = WachspressInterior()
        elif name == "wachspress_global":
            from .wachspress import WachspressGlobal

            coords = WachspressGlobal()
        elif name == "wachspress_quad":
            from .quad_system import WachspressQuad

            coords = WachspressQuad()
        elif name == "mean_value":
            from .quad_system import MeanValueQuad

            coords = MeanValueQuad()
        else:
            raise ValueError(f"Unknown coordinates: {name}")

        if poly is not None and not coords.supports(poly):
            raise ValueError(f"coordinates {name!r} do not support a polygon with {poly.n} vertices")
        return coords
