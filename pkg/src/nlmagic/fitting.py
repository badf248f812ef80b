"""Power-law fits with an optional constant offset.

Fits y = a * r**(-alpha) + c by an outer golden-section search over the
offset c and an inner linear regression of ln(y - c) on ln r.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


class FitError(ValueError):
    """Window too small or values not positive after offset subtraction."""


@dataclass
class FitResult:
    amplitude: float
    exponent: float
    offset: float
    residual: float        # rms residual of the model in data space
    stderr_exponent: float  # standard error of the fitted exponent
    window: tuple[float, float]

    def evaluate(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return self.amplitude * r ** (-self.exponent) + self.offset


def _loglog_fit(r, y):
    """Slope/intercept of ln y on ln r; returns (a, alpha, rms, stderr)."""
    lx, ly = np.log(r), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    resid = ly - pred
    rms = float(np.sqrt(np.mean(resid**2)))
    dof = max(len(r) - 2, 1)
    sxx = np.sum((lx - lx.mean()) ** 2)
    stderr = float(np.sqrt(np.sum(resid**2) / dof / sxx))
    return float(np.exp(intercept)), float(-slope), rms, stderr


def _golden_min(fun, lo, hi, tol=1e-12, max_iter=200):
    """Golden-section minimum of a unimodal scalar function on [lo, hi]."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(max_iter):
        if abs(b - a) < tol * (1.0 + abs(a) + abs(b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fun(d)
    return (a + b) / 2.0


def fit_power_law(r, values, window=None, with_offset: bool = True) -> FitResult:
    """Least-squares fit of values = a * r**(-alpha) + c on the given window.

    `window` is an inclusive (r_min, r_max) pair; at least 4 points must fall
    inside it.  With `with_offset`, c is found by golden-section search over
    [0, min(values)) minimizing the rms of the inner log-log regression.
    """
    r = np.asarray(r, dtype=float)
    values = np.asarray(values, dtype=float)
    if window is not None:
        mask = (r >= window[0]) & (r <= window[1])
        r, values = r[mask], values[mask]
    else:
        window = (float(r.min()), float(r.max())) if r.size else (0.0, 0.0)
    if r.size < 4:
        raise FitError(f"need at least 4 points in window, got {r.size}")
    order = np.argsort(r)
    r, values = r[order], values[order]

    def model_rms(c):
        shifted = values - c
        if np.any(shifted <= 0):
            return np.inf
        a, alpha, _, _ = _loglog_fit(r, shifted)
        return float(np.sqrt(np.mean((values - (a * r**-alpha + c)) ** 2)))

    if not with_offset:
        if np.any(values <= 0):
            raise FitError("values must be positive for an offset-free fit")
        a, alpha, _, se = _loglog_fit(r, values)
        return FitResult(
            a, alpha, 0.0, model_rms(0.0), se, (float(window[0]), float(window[1]))
        )

    vmin = float(values.min())
    if vmin <= 0:
        raise FitError("values must be positive to fit a non-negative offset")
    ceiling = vmin * (1.0 - 1e-9)

    # the data-space residual need not be unimodal from c = 0, so bracket the
    # global basin on a grid before the golden-section refinement
    grid = np.linspace(0.0, ceiling, 129)
    k = int(np.argmin([model_rms(c) for c in grid]))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    c_best = _golden_min(model_rms, lo, hi)
    if model_rms(0.0) <= model_rms(c_best):
        c_best = 0.0
    a, alpha, _, se = _loglog_fit(r, values - c_best)
    return FitResult(
        a, alpha, float(c_best), model_rms(c_best), se, (float(window[0]), float(window[1]))
    )
