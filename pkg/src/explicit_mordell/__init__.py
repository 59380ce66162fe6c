"""Explicit height bounds and rational-point searches on curves in E x E."""

__version__ = "0.1.0"

from .ec_arith import ECPoint, EllipticCurveQ, add, curve_new, scalar_mul, torsion_subgroup  # noqa: E402
from .errors import MordellError  # noqa: E402

__all__ = ["ECPoint", "EllipticCurveQ", "MordellError", "__version__", "add", "curve_new",
           "scalar_mul", "torsion_subgroup"]
