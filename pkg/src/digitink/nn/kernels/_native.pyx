# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled data-movement kernels for the convolution and pooling layers.

Contracts (shapes, ordering, tie-breaking, accumulation order) match
digitink.nn.kernels.reference exactly, so the two backends are
interchangeable bit for bit.
"""

import numpy as np

cimport cython


ctypedef fused floating:
    float
    double


def im2col2d(floating[:, :, :, ::1] x, Py_ssize_t kh, Py_ssize_t kw):
    cdef Py_ssize_t n = x.shape[0], h = x.shape[1], w = x.shape[2], c = x.shape[3]
    cdef Py_ssize_t ho = h - kh + 1, wo = w - kw + 1
    out_arr = np.empty((n, ho, wo, kh * kw * c), dtype=np.float32 if floating is float else np.float64)
    cdef floating[:, :, :, ::1] out = out_arr
    cdef Py_ssize_t b, y, xx, i, j, ch, col
    with nogil:
        for b in range(n):
            for y in range(ho):
                for xx in range(wo):
                    col = 0
                    for i in range(kh):
                        for j in range(kw):
                            for ch in range(c):
                                out[b, y, xx, col] = x[b, y + i, xx + j, ch]
                                col += 1
    return out_arr


def col2im2d(floating[:, :, :, ::1] cols, Py_ssize_t h, Py_ssize_t w, Py_ssize_t c):
    cdef Py_ssize_t n = cols.shape[0], ho = cols.shape[1], wo = cols.shape[2]
    cdef Py_ssize_t kh = h - ho + 1, kw = w - wo + 1
    out_arr = np.zeros((n, h, w, c), dtype=np.float32 if floating is float else np.float64)
    cdef floating[:, :, :, ::1] out = out_arr
    cdef Py_ssize_t b, y, xx, i, j, ch, col
    # Offsets (i, j) iterate outermost so each destination element
    # accumulates in the same order as the reference backend.
    with nogil:
        for i in range(kh):
            for j in range(kw):
                for b in range(n):
                    for y in range(ho):
                        for xx in range(wo):
                            col = (i * kw + j) * c
                            for ch in range(c):
                                out[b, y + i, xx + j, ch] += cols[b, y, xx, col + ch]
    return out_arr


def im2col1d(floating[:, :, ::1] x, Py_ssize_t k):
    cdef Py_ssize_t n = x.shape[0], length = x.shape[1], c = x.shape[2]
    cdef Py_ssize_t lo = length - k + 1
    out_arr = np.empty((n, lo, k * c), dtype=np.float32 if floating is float else np.float64)
    cdef floating[:, :, ::1] out = out_arr
    cdef Py_ssize_t b, y, i, ch, col
    with nogil:
        for b in range(n):
            for y in range(lo):
                col = 0
                for i in range(k):
                    for ch in range(c):
                        out[b, y, col] = x[b, y + i, ch]
                        col += 1
    return out_arr


def col2im1d(floating[:, :, ::1] cols, Py_ssize_t length, Py_ssize_t c):
    cdef Py_ssize_t n = cols.shape[0], lo = cols.shape[1]
    cdef Py_ssize_t k = length - lo + 1
    out_arr = np.zeros((n, length, c), dtype=np.float32 if floating is float else np.float64)
    cdef floating[:, :, ::1] out = out_arr
    cdef Py_ssize_t b, y, i, ch
    with nogil:
        for i in range(k):
            for b in range(n):
                for y in range(lo):
                    for ch in range(c):
                        out[b, y + i, ch] += cols[b, y, i * c + ch]
    return out_arr


def maxpool2d_forward(floating[:, :, :, ::1] x, Py_ssize_t window):
    cdef Py_ssize_t n = x.shape[0], h = x.shape[1], w = x.shape[2], c = x.shape[3]
    cdef Py_ssize_t ho = h // window, wo = w // window
    out_arr = np.empty((n, ho, wo, c), dtype=np.float32 if floating is float else np.float64)
    idx_arr = np.empty((n, ho, wo, c), dtype=np.int64)
    cdef floating[:, :, :, ::1] out = out_arr
    cdef long long[:, :, :, ::1] idx = idx_arr
    cdef Py_ssize_t b, y, xx, ch, wy, wx, best
    cdef floating best_val, v
    with nogil:
        for b in range(n):
            for y in range(ho):
                for xx in range(wo):
                    for ch in range(c):
                        best = 0
                        best_val = x[b, y * window, xx * window, ch]
                        for wy in range(window):
                            for wx in range(window):
                                v = x[b, y * window + wy, xx * window + wx, ch]
                                if v > best_val:
                                    best_val = v
                                    best = wy * window + wx
                        out[b, y, xx, ch] = best_val
                        idx[b, y, xx, ch] = best
    return out_arr, idx_arr


def maxpool2d_backward(floating[:, :, :, ::1] dy, long long[:, :, :, ::1] idx,
                       Py_ssize_t h, Py_ssize_t w, Py_ssize_t window):
    cdef Py_ssize_t n = dy.shape[0], ho = dy.shape[1], wo = dy.shape[2], c = dy.shape[3]
    out_arr = np.zeros((n, h, w, c), dtype=np.float32 if floating is float else np.float64)
    cdef floating[:, :, :, ::1] out = out_arr
    cdef Py_ssize_t b, y, xx, ch, k
    with nogil:
        for b in range(n):
            for y in range(ho):
                for xx in range(wo):
                    for ch in range(c):
                        k = idx[b, y, xx, ch]
                        out[b, y * window + k // window, xx * window + k % window, ch] = dy[b, y, xx, ch]
    return out_arr


def maxpool1d_forward(floating[:, :, ::1] x, Py_ssize_t window):
    cdef Py_ssize_t n = x.shape[0], length = x.shape[1], c = x.shape[2]
    cdef Py_ssize_t lo = length // window
    out_arr = np.empty((n, lo, c), dtype=np.float32 if floating is float else np.float64)
    idx_arr = np.empty((n, lo, c), dtype=np.int64)
    cdef floating[:, :, ::1] out = out_arr
    cdef long long[:, :, ::1] idx = idx_arr
    cdef Py_ssize_t b, y, ch, wy, best
    cdef floating best_val, v
    with nogil:
        for b in range(n):
            for y in range(lo):
                for ch in range(c):
                    best = 0
                    best_val = x[b, y * window, ch]
                    for wy in range(window):
                        v = x[b, y * window + wy, ch]
                        if v > best_val:
                            best_val = v
                            best = wy
                    out[b, y, ch] = best_val
                    idx[b, y, ch] = best
    return out_arr, idx_arr


def maxpool1d_backward(floating[:, :, ::1] dy, long long[:, :, ::1] idx,
                       Py_ssize_t length, Py_ssize_t window):
    cdef Py_ssize_t n = dy.shape[0], lo = dy.shape[1], c = dy.shape[2]
    out_arr = np.zeros((n, length, c), dtype=np.float32 if floating is float else np.float64)
    cdef floating[:, :, ::1] out = out_arr
    cdef Py_ssize_t b, y, ch
    with nogil:
        for b in range(n):
            for y in range(lo):
                for ch in range(c):
                    out[b, y * window + idx[b, y, ch], ch] = dy[b, y, ch]
    return out_arr
