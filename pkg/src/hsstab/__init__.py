"""
Exact and numerical verification toolkit for HS-stability questions about
the groups G_p = Z[1/p]^2 x| Z, K_p and G~_p.
"""

from .exact import ZpContext, ZpRational
from .groups import GpElement, UTMatrix, gp

__version__ = "0.1.0"

__all__ = ["ZpContext", "ZpRational", "GpElement", "UTMatrix", "gp", "__version__"]
