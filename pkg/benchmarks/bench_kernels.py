"""Benchmark the compiled kernels against the NumPy reference backend.

Run:  python benchmarks/bench_kernels.py

Covers the data-movement kernels on the shapes the two stock models
actually use, plus one full training batch per backend.  The matrix
products go through BLAS either way, so speedups show up in the
im2col/col2im/pooling plumbing, not the GEMMs.
"""

import os
import time

import numpy as np


def _time(fn, repeats=10):
    fn()
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench_kernels():
    from digitink.nn.kernels import reference

    try:
        from digitink.nn.kernels import _native as native
    except ImportError:
        print("compiled backend unavailable; nothing to compare")
        return

    rng = np.random.default_rng(0)
    cases = []

    x2 = rng.random((64, 18, 18, 32), dtype=np.float32)  # second bitmap conv, padded
    cases.append(("im2col2d 64x18x18x32 k5", lambda m: m.im2col2d(x2, 5, 5)))
    cols2 = reference.im2col2d(x2, 5, 5).copy()
    cases.append(("col2im2d same shape", lambda m: m.col2im2d(cols2, 18, 18, 32)))

    x1 = rng.random((64, 126, 32), dtype=np.float32)  # second polar conv
    cases.append(("im2col1d 64x126x32 k5", lambda m: m.im2col1d(x1, 5)))
    cols1 = reference.im2col1d(x1, 5).copy()
    cases.append(("col2im1d same shape", lambda m: m.col2im1d(cols1, 126, 32)))

    xp = rng.random((64, 28, 28, 32), dtype=np.float32)
    cases.append(("maxpool2d fwd 28x28x32 w2", lambda m: m.maxpool2d_forward(xp, 2)))
    out, idx = reference.maxpool2d_forward(xp, 2)
    dy = rng.random(out.shape, dtype=np.float32)
    cases.append(("maxpool2d bwd", lambda m: m.maxpool2d_backward(dy, idx, 28, 28, 2)))

    print(f"{'kernel':<28} {'reference':>11} {'native':>11} {'speedup':>8}")
    for name, fn in cases:
        t_ref = _time(lambda: fn(reference))
        t_nat = _time(lambda: fn(native))
        print(f"{name:<28} {t_ref * 1e3:>9.2f}ms {t_nat * 1e3:>9.2f}ms {t_ref / t_nat:>7.2f}x")


def bench_training_batch():
    from digitink.models import build_bitmap_model, build_polar_model
    from digitink.nn.kernels import BACKEND
    from digitink.nn.optim import OptimizerState, SGDMomentum

    print(f"\none fwd+bwd+step batch (64 samples), backend={BACKEND}")
    for model_spec in (build_bitmap_model(), build_polar_model("both")):
        rng = np.random.default_rng(0)
        net = model_spec.build(rng=rng)
        opt = SGDMomentum(net, OptimizerState(0.01))
        x = rng.random((64,) + model_spec.input_shape).astype(np.float32)
        y = rng.integers(0, 10, 64)

        def step():
            net.forward(x, train=True, rng=rng)
            net.backward(y)
            opt.step()

        print(f"  {model_spec.name:<10} {_time(step, 5) * 1e3:8.1f} ms")


if __name__ == "__main__":
    print(f"DIGITINK_PURE_PYTHON={os.environ.get('DIGITINK_PURE_PYTHON', '')!r}")
    bench_kernels()
    bench_training_batch()
