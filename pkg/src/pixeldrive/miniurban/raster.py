"""Rasterization kernels for the top-down camera.

These are the hot inner loops of the simulator: every environment step
redraws a full frame from geometric primitives. Two interchangeable
backends produce bit-identical images:

* ``numba``  - @njit pixel loops (default when numba imports cleanly)
* ``numpy``  - vectorized masks over the primitive bounding box

Set the environment variable ``PIXELDRIVE_NO_NUMBA=1`` (or call
:func:`set_backend`) to force the numpy path. ``benchmarks/raster_bench.py``
compares the two.

All coordinates are float pixel positions (row ``y``, column ``x``); colors
are 8-bit RGB triples. Primitives clip themselves to the image.
"""

from __future__ import annotations

import os

import numpy as np

# ---------------------------------------------------------------------------
# numpy backend


def _np_fill_disc(img, cy, cx, r, c0, c1, c2):
    h, w = img.shape[:2]
    y0 = max(0, int(np.floor(cy - r)))
    y1 = min(h - 1, int(np.ceil(cy + r)))
    x0 = max(0, int(np.floor(cx - r)))
    x1 = min(w - 1, int(np.ceil(cx + r)))
    if y1 < y0 or x1 < x0:
        return
    yy, xx = np.ogrid[y0 : y1 + 1, x0 : x1 + 1]
    mask = (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r
    sub = img[y0 : y1 + 1, x0 : x1 + 1]
    sub[mask] = (c0, c1, c2)


def _np_fill_capsule(img, ay, ax, by, bx, half_w, c0, c1, c2):
    h, w = img.shape[:2]
    y0 = max(0, int(np.floor(min(ay, by) - half_w)))
    y1 = min(h - 1, int(np.ceil(max(ay, by) + half_w)))
    x0 = max(0, int(np.floor(min(ax, bx) - half_w)))
    x1 = min(w - 1, int(np.ceil(max(ax, bx) + half_w)))
    if y1 < y0 or x1 < x0:
        return
    yy, xx = np.ogrid[y0 : y1 + 1, x0 : x1 + 1]
    dy = by - ay
    dx = bx - ax
    denom = dy * dy + dx * dx
    if denom < 1e-12:
        t = np.zeros((y1 - y0 + 1, x1 - x0 + 1))
    else:
        t = ((yy - ay) * dy + (xx - ax) * dx) / denom
        t = np.clip(t, 0.0, 1.0)
    py = ay + t * dy
    px = ax + t * dx
    mask = (yy - py) ** 2 + (xx - px) ** 2 <= half_w * half_w
    sub = img[y0 : y1 + 1, x0 : x1 + 1]
    sub[mask] = (c0, c1, c2)


def _np_fill_rect(img, cy, cx, ay, ax, half_len, half_w, c0, c1, c2):
    h, w = img.shape[:2]
    ey = half_len * abs(ay) + half_w * abs(ax)
    ex = half_len * abs(ax) + half_w * abs(ay)
    y0 = max(0, int(np.floor(cy - ey)))
    y1 = min(h - 1, int(np.ceil(cy + ey)))
    x0 = max(0, int(np.floor(cx - ex)))
    x1 = min(w - 1, int(np.ceil(cx + ex)))
    if y1 < y0 or x1 < x0:
        return
    yy, xx = np.ogrid[y0 : y1 + 1, x0 : x1 + 1]
    dy = yy - cy
    dx = xx - cx
    u = dy * ay + dx * ax
    v = dy * ax - dx * ay
    mask = (np.abs(u) <= half_len) & (np.abs(v) <= half_w)
    sub = img[y0 : y1 + 1, x0 : x1 + 1]
    sub[mask] = (c0, c1, c2)


_NUMPY_IMPL = {
    "fill_disc": _np_fill_disc,
    "fill_capsule": _np_fill_capsule,
    "fill_rect": _np_fill_rect,
}

# ---------------------------------------------------------------------------
# numba backend (identical math, explicit loops)

_NUMBA_IMPL: dict | None = None


def _build_numba_impl():
    from numba import njit

    @njit(cache=True)
    def nb_fill_disc(img, cy, cx, r, c0, c1, c2):
        h, w = img.shape[:2]
        y0 = max(0, int(np.floor(cy - r)))
        y1 = min(h - 1, int(np.ceil(cy + r)))
        x0 = max(0, int(np.floor(cx - r)))
        x1 = min(w - 1, int(np.ceil(cx + r)))
        r2 = r * r
        for y in range(y0, y1 + 1):
            for x in range(x0, x1 + 1):
                if (y - cy) ** 2 + (x - cx) ** 2 <= r2:
                    img[y, x, 0] = c0
                    img[y, x, 1] = c1
                    img[y, x, 2] = c2

    @njit(cache=True)
    def nb_fill_capsule(img, ay, ax, by, bx, half_w, c0, c1, c2):
        h, w = img.shape[:2]
        y0 = max(0, int(np.floor(min(ay, by) - half_w)))
        y1 = min(h - 1, int(np.ceil(max(ay, by) + half_w)))
        x0 = max(0, int(np.floor(min(ax, bx) - half_w)))
        x1 = min(w - 1, int(np.ceil(max(ax, bx) + half_w)))
        dy = by - ay
        dx = bx - ax
        denom = dy * dy + dx * dx
        hw2 = half_w * half_w
        for y in range(y0, y1 + 1):
            for x in range(x0, x1 + 1):
                if denom < 1e-12:
                    t = 0.0
                else:
                    t = ((y - ay) * dy + (x - ax) * dx) / denom
                    if t < 0.0:
                        t = 0.0
                    elif t > 1.0:
                        t = 1.0
                py = ay + t * dy
                px = ax + t * dx
                if (y - py) ** 2 + (x - px) ** 2 <= hw2:
                    img[y, x, 0] = c0
                    img[y, x, 1] = c1
                    img[y, x, 2] = c2

    @njit(cache=True)
    def nb_fill_rect(img, cy, cx, ay, ax, half_len, half_w, c0, c1, c2):
        h, w = img.shape[:2]
        ey = half_len * abs(ay) + half_w * abs(ax)
        ex = half_len * abs(ax) + half_w * abs(ay)
        y0 = max(0, int(np.floor(cy - ey)))
        y1 = min(h - 1, int(np.ceil(cy + ey)))
        x0 = max(0, int(np.floor(cx - ex)))
        x1 = min(w - 1, int(np.ceil(cx + ex)))
        for y in range(y0, y1 + 1):
            for x in range(x0, x1 + 1):
                dy = y - cy
                dx = x - cx
                u = dy * ay + dx * ax
                v = dy * ax - dx * ay
                if abs(u) <= half_len and abs(v) <= half_w:
                    img[y, x, 0] = c0
                    img[y, x, 1] = c1
                    img[y, x, 2] = c2

    return {
        "fill_disc": nb_fill_disc,
        "fill_capsule": nb_fill_capsule,
        "fill_rect": nb_fill_rect,
    }


# ---------------------------------------------------------------------------
# backend selection

_backend_name = "numpy"
_impl = _NUMPY_IMPL


def set_backend(name: str) -> None:
    """Select the raster backend: ``"numba"`` or ``"numpy"``."""
    global _backend_name, _impl, _NUMBA_IMPL
    if name == "numpy":
        _backend_name, _impl = "numpy", _NUMPY_IMPL
        return
    if name == "numba":
        if _NUMBA_IMPL is None:
            _NUMBA_IMPL = _build_numba_impl()
        _backend_name, _impl = "numba", _NUMBA_IMPL
        return
    raise ValueError(f"unknown raster backend {name!r}")


def get_backend() -> str:
    return _backend_name


def _default_backend() -> str:
    if os.environ.get("PIXELDRIVE_NO_NUMBA", "") not in ("", "0"):
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        return "numpy"
    return "numba"


set_backend(_default_backend())


def fill_disc(img, cy, cx, r, color) -> None:
    _impl["fill_disc"](img, float(cy), float(cx), float(r), color[0], color[1], color[2])


def fill_capsule(img, ay, ax, by, bx, half_w, color) -> None:
    _impl["fill_capsule"](
        img,
        float(ay),
        float(ax),
        float(by),
        float(bx),
        float(half_w),
        color[0],
        color[1],
        color[2],
    )


def fill_rect(img, cy, cx, axis_y, axis_x, half_len, half_w, color) -> None:
    _impl["fill_rect"](
        img,
        float(cy),
        float(cx),
        float(axis_y),
        float(axis_x),
        float(half_len),
        float(half_w),
        color[0],
        color[1],
        color[2],
    )
