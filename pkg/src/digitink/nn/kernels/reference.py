"""NumPy reference implementations of the data-movement kernels.

These back the convolution and pooling layers when the compiled extension
is unavailable.  The compiled backend must match these bit for bit: copies
are order-independent, and every floating-point accumulation (col2im) runs
in the same per-element order (ascending kernel offset).
"""

import numpy as np

__all__ = [
    "im2col2d",
    "col2im2d",
    "im2col1d",
    "col2im1d",
    "maxpool2d_forward",
    "maxpool2d_backward",
    "maxpool1d_forward",
    "maxpool1d_backward",
]


def im2col2d(x: np.ndarray, kh: int, kw: int) -> np.ndarray:
    """Extract sliding kh*kw patches from x (N, H, W, C), stride 1.

    Returns (N, H-kh+1, W-kw+1, kh*kw*C) with patch elements ordered
    (row offset, column offset, channel).  Caller pads beforehand.
    """
    n, h, w, c = x.shape
    ho, wo = h - kh + 1, w - kw + 1
    out = np.empty((n, ho, wo, kh, kw, c), dtype=x.dtype)
    for i in range(kh):
        for j in range(kw):
            out[:, :, :, i, j, :] = x[:, i : i + ho, j : j + wo, :]
    return out.reshape(n, ho, wo, kh * kw * c)


def col2im2d(cols: np.ndarray, h: int, w: int, c: int) -> np.ndarray:
    """Adjoint of im2col2d: scatter-add patch columns back to (N, H, W, C)."""
    n, ho, wo, k = cols.shape
    kh = h - ho + 1
    kw = w - wo + 1
    assert k == kh * kw * c, (k, kh, kw, c)
    cols = cols.reshape(n, ho, wo, kh, kw, c)
    out = np.zeros((n, h, w, c), dtype=cols.dtype)
    for i in range(kh):
        for j in range(kw):
            out[:, i : i + ho, j : j + wo, :] += cols[:, :, :, i, j, :]
    return out


def im2col1d(x: np.ndarray, k: int) -> np.ndarray:
    """1D analogue of im2col2d: x (N, L, C) -> (N, L-k+1, k*C)."""
    n, length, c = x.shape
    lo = length - k + 1
    out = np.empty((n, lo, k, c), dtype=x.dtype)
    for i in range(k):
        out[:, :, i, :] = x[:, i : i + lo, :]
    return out.reshape(n, lo, k * c)


def col2im1d(cols: np.ndarray, length: int, c: int) -> np.ndarray:
    """Adjoint of im2col1d."""
    n, lo, kc = cols.shape
    k = length - lo + 1
    assert kc == k * c, (kc, k, c)
    cols = cols.reshape(n, lo, k, c)
    out = np.zeros((n, length, c), dtype=cols.dtype)
    for i in range(k):
        out[:, i : i + lo, :] += cols[:, :, i, :]
    return out


def maxpool2d_forward(x: np.ndarray, window: int) -> tuple[np.ndarray, np.ndarray]:
    """Non-overlapping window max over (N, H, W, C); floor semantics.

    Returns (out, idx) where idx holds the within-window argmax in
    row-major (wy*window + wx) order, first maximum on ties.
    """
    n, h, w, c = x.shape
    ho, wo = h // window, w // window
    cropped = x[:, : ho * window, : wo * window, :]
    tiles = cropped.reshape(n, ho, window, wo, window, c)
    tiles = tiles.transpose(0, 1, 3, 5, 2, 4).reshape(n, ho, wo, c, window * window)
    idx = tiles.argmax(axis=-1)
    out = np.take_along_axis(tiles, idx[..., None], axis=-1)[..., 0]
    return out, idx.astype(np.int64)


def maxpool2d_backward(
    dy: np.ndarray, idx: np.ndarray, h: int, w: int, window: int
) -> np.ndarray:
    """Route gradients to the argmax positions recorded by the forward pass."""
    n, ho, wo, c = dy.shape
    tiles = np.zeros((n, ho, wo, c, window * window), dtype=dy.dtype)
    np.put_along_axis(tiles, idx[..., None], dy[..., None], axis=-1)
    tiles = tiles.reshape(n, ho, wo, c, window, window).transpose(0, 1, 4, 2, 5, 3)
    out = np.zeros((n, h, w, c), dtype=dy.dtype)
    out[:, : ho * window, : wo * window, :] = tiles.reshape(n, ho * window, wo * window, c)
    return out


def maxpool1d_forward(x: np.ndarray, window: int) -> tuple[np.ndarray, np.ndarray]:
    """1D analogue of maxpool2d_forward over (N, L, C)."""
    n, length, c = x.shape
    lo = length // window
    tiles = x[:, : lo * window, :].reshape(n, lo, window, c).transpose(0, 1, 3, 2)
    idx = tiles.argmax(axis=-1)
    out = np.take_along_axis(tiles, idx[..., None], axis=-1)[..., 0]
    return out, idx.astype(np.int64)


def maxpool1d_backward(
    dy: np.ndarray, idx: np.ndarray, length: int, window: int
) -> np.ndarray:
    n, lo, c = dy.shape
    tiles = np.zeros((n, lo, c, window), dtype=dy.dtype)
    np.put_along_axis(tiles, idx[..., None], dy[..., None], axis=-1)
    out = np.zeros((n, length, c), dtype=dy.dtype)
    out[:, : lo * window, :] = tiles.transpose(0, 1, 3, 2).reshape(n, lo * window, c)
    return out
