"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; set
DIGITINK_PURE_PYTHON=1 to force the NumPy reference backend.  Both
backends produce bit-identical results (covered by tests), so training
determinism does not depend on which one is active.
"""

import os

from . import reference

if os.environ.get("DIGITINK_PURE_PYTHON"):
    _impl = reference
    BACKEND = "reference"
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]

        BACKEND = "native"
    except ImportError:
        _impl = reference
        BACKEND = "reference"

im2col2d = _impl.im2col2d
col2im2d = _impl.col2im2d
im2col1d = _impl.im2col1d
col2im1d = _impl.col2im1d
maxpool2d_forward = _impl.maxpool2d_forward
maxpool2d_backward = _impl.maxpool2d_backward
maxpool1d_forward = _impl.maxpool1d_forward
maxpool1d_backward = _impl.maxpool1d_backward

__all__ = [
    "BACKEND",
    "reference",
    "im2col2d",
    "col2im2d",
    "im2col1d",
    "col2im1d",
    "maxpool2d_forward",
    "maxpool2d_backward",
    "maxpool1d_forward",
    "maxpool1d_backward",
]
