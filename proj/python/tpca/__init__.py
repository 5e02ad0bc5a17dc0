"""Thresholded multivariate functional PCA for multichannel profile monitoring."""

from ._tpca import *  # noqa: F401,F403
from ._tpca import __doc__  # noqa: F401
