"""Kernel dispatch: the compiled extension if it imports, numpy otherwise.

Set ``EGOCIRCLES_PURE_PYTHON=1`` to force the numpy path.
"""
import os

from . import _pykernels

BACKEND = "python"
if not os.environ.get("EGOCIRCLES_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
else:
    _impl = _pykernels

log_likelihood = _impl.log_likelihood
pair_betas = _impl.pair_betas
circle_thresholds = _impl.circle_thresholds
softplus = _pykernels.softplus
