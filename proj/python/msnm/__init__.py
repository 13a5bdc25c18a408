"""PPCA / MSNM anomaly scoring for multivariate monitoring data."""

from ._msnm import *  # noqa: F401,F403
from ._msnm import __version__  # noqa: F401
