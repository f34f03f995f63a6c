from typing import Any, Dict, Optional

from pydantic_settings import BaseSettings, SettingsConfigDict

from rmtdensity import __version__

NUMERIC_SETTINGS = (
    "contour_max_n",
    "contour_imag_tolerance",
    "quadrature_nodes",
    "quadrature_panels",
    "quadrature_abs_tolerance",
    "quadrature_rel_tolerance",
    "quadrature_max_depth",
    "quadrature_max_panels",
    "endpoint_threshold",
    "bulk_density_floor",
)


class Settings(BaseSettings):
    """
    Application configuration settings.

    Configuration sections:
    - Artifact metadata (name, version)
    - Logging (level)
    - Hard-edge policy (clamp epsilon for LUE grids)
    - Contour oracle (radius, points, size guard, tolerances)
    - Quadrature (panels, nodes, tolerances, depth and panel caps, endpoint threshold)
    - Asymptotics (near-edge bulk guard)
    - Grid evaluation (worker count)
    """
    app_name: str = "rmtdensity"
    app_version: str = __version__

    log_level: str = "INFO"

    hard_edge_epsilon: float = 1e-6

    contour_radius: Optional[float] = None
    contour_points: int = 512
    contour_max_n: int = 60
    contour_imag_tolerance: float = 1e-9
    oracle_tolerance: float = 1e-6

    quadrature_nodes: int = 20
    quadrature_panels: int = 16
    quadrature_abs_tolerance: float = 1e-14
    quadrature_rel_tolerance: float = 1e-13
    quadrature_max_depth: int = 40
    quadrature_max_panels: int = 2048
    endpoint_threshold: float = 1e-18

    bulk_density_floor: float = 1e-3

    max_workers: int = 1

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="RMTDENS_",
        case_sensitive=False,
    )

    def numeric_settings(self) -> Dict[str, Any]:
        """Settings that change computed values but have no CLI flag."""
        return {name: getattr(self, name) for name in NUMERIC_SETTINGS}

    def overridden_settings(self) -> Dict[str, Any]:
        """The numeric settings that differ from their defaults."""
        return {
            name: value
            for name, value in self.numeric_settings().items()
            if value != type(self).model_fields[name].default
        }


# Global settings instance
settings = Settings()
