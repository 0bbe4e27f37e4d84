"""Hot counting and pivot kernels.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with identical semantics.  The numba path is used when numba imports
cleanly and the environment variable ``CEVM_DISABLE_NUMBA`` is unset (or set
to ``0``/``false``).  Both implementations are importable directly through
:data:`NUMPY_KERNELS` and :data:`NUMBA_KERNELS` so tests and benchmarks can
compare them.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

# pivot codes shared with transforms.Pivot
PIVOT_XY = 0
PIVOT_INV_SHIFT_MINUS_XY = 1  # 1 / (c - xy)
PIVOT_INV_XY = 2  # 1 / xy
PIVOT_NEG_INV_XY = 3  # -1 / xy
PIVOT_INV_XY_MINUS_SHIFT = 4  # 1 / (xy - c)


def _env_disabled() -> bool:
    return os.environ.get("CEVM_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")


# ---------------------------------------------------------------- numpy path


def _np_count_exceed(values, thresholds):
    values = np.asarray(values, dtype=np.float64)
    out = np.empty(len(thresholds), dtype=np.int64)
    for j, thr in enumerate(np.asarray(thresholds, dtype=np.float64)):
        out[j] = np.count_nonzero(values > thr)
    return out


def _np_count_rects(x, y, rects):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    rects = np.asarray(rects, dtype=np.float64).reshape(-1, 4)
    out = np.empty(rects.shape[0], dtype=np.int64)
    for j in range(rects.shape[0]):
        x_lo, x_hi, y_lo, y_hi = rects[j]
        mask = (x > x_lo) & (x <= x_hi) & (y > y_lo) & (y <= y_hi)
        out[j] = np.count_nonzero(mask)
    return out


def _np_pivot(code, x, y, shift):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    xy = x * y
    with np.errstate(divide="ignore", invalid="ignore"):
        if code == PIVOT_XY:
            return xy
        if code == PIVOT_INV_SHIFT_MINUS_XY:
            return 1.0 / (shift - xy)
        if code == PIVOT_INV_XY:
            return 1.0 / xy
        if code == PIVOT_NEG_INV_XY:
            return -1.0 / xy
        if code == PIVOT_INV_XY_MINUS_SHIFT:
            return 1.0 / (xy - shift)
    raise ValueError(f"unknown pivot code {code}")


NUMPY_KERNELS = SimpleNamespace(
    name="numpy",
    count_exceed=_np_count_exceed,
    count_rects=_np_count_rects,
    pivot=_np_pivot,
)


# ---------------------------------------------------------------- numba path


def _build_numba():
    from numba import njit

    @njit(cache=True, nogil=True)
    def _nb_count_exceed_impl(values, thresholds):
        # branchless inner loop; the compiler vectorizes it
        m = thresholds.shape[0]
        out = np.zeros(m, dtype=np.int64)
        for i in range(values.shape[0]):
            v = values[i]
            for j in range(m):
                out[j] += v > thresholds[j]
        return out

    @njit(cache=True, nogil=True)
    def _nb_count_rects_impl(x, y, rects):
        m = rects.shape[0]
        out = np.zeros(m, dtype=np.int64)
        floor = np.inf
        for j in range(m):
            floor = min(floor, rects[j, 2])
        for i in range(x.shape[0]):
            yi = y[i]
            if not yi > floor:
                continue
            xi = x[i]
            for j in range(m):
                if xi > rects[j, 0] and xi <= rects[j, 1] and yi > rects[j, 2] and yi <= rects[j, 3]:
                    out[j] += 1
        return out

    @njit(cache=True, nogil=True, error_model="numpy")
    def _nb_pivot_impl(code, x, y, shift):
        n = x.shape[0]
        out = np.empty(n, dtype=np.float64)
        for i in range(n):
            xy = x[i] * y[i]
            if code == 0:
                out[i] = xy
            elif code == 1:
                out[i] = 1.0 / (shift - xy)
            elif code == 2:
                out[i] = 1.0 / xy
            elif code == 3:
                out[i] = -1.0 / xy
            else:
                out[i] = 1.0 / (xy - shift)
        return out

    def count_exceed(values, thresholds):
        return _nb_count_exceed_impl(
            np.ascontiguousarray(values, dtype=np.float64),
            np.ascontiguousarray(thresholds, dtype=np.float64).reshape(-1),
        )

    def count_rects(x, y, rects):
        return _nb_count_rects_impl(
            np.ascontiguousarray(x, dtype=np.float64),
            np.ascontiguousarray(y, dtype=np.float64),
            np.ascontiguousarray(rects, dtype=np.float64).reshape(-1, 4),
        )

    def pivot(code, x, y, shift):
        if code not in (0, 1, 2, 3, 4):
            raise ValueError(f"unknown pivot code {code}")
        x = np.ascontiguousarray(x, dtype=np.float64)
        y = np.ascontiguousarray(y, dtype=np.float64)
        return _nb_pivot_impl(int(code), x.reshape(-1), y.reshape(-1), float(shift)).reshape(x.shape)

    return SimpleNamespace(name="numba", count_exceed=count_exceed, count_rects=count_rects, pivot=pivot)


try:
    NUMBA_KERNELS = _build_numba()
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_KERNELS = None

USE_NUMBA = NUMBA_KERNELS is not None and not _env_disabled()
ACTIVE = NUMBA_KERNELS if USE_NUMBA else NUMPY_KERNELS

count_exceed = ACTIVE.count_exceed
count_rects = ACTIVE.count_rects
pivot = ACTIVE.pivot
backend = ACTIVE.name
