"""Scalar bracketing and golden-section search helpers."""

from __future__ import annotations

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class BracketError(RuntimeError):
    """Raised when no interior extremum could be bracketed."""


def golden_min(fn, lo: float, hi: float, tol: float = 1e-12, max_iter: int = 400):
    """Golden-section minimum of fn on [lo, hi]; returns (x, fn(x))."""
    a, b = float(lo), float(hi)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = fn(d)
    if fc < fd:
        return c, fc
    return d, fd


def log_grid_min(fn, t_lo: float = 1e-6, t_hi: float = 1e6, n_coarse: int = 160,
                 tol: float = 1e-12, max_expand: int = 40):
    """Minimize fn(t) for t > 0: coarse scan in log t, then golden refinement.

    The bracket [t_lo, t_hi] is expanded by factors of 10 until the coarse
    argmin is interior.  tol is absolute in log t.
    """
    x_lo, x_hi = math.log(t_lo), math.log(t_hi)
    step = math.log(10.0)
    for _ in range(max_expand):
        xs = np.linspace(x_lo, x_hi, n_coarse)
        vals = np.array([fn(math.exp(x)) for x in xs])
        k = int(np.nanargmin(vals))
        if k == 0:
            x_lo -= step
        elif k == n_coarse - 1:
            x_hi += step
        else:
            x, fx = golden_min(lambda x_: fn(math.exp(x_)), xs[k - 1], xs[k + 1], tol=tol)
            return math.exp(x), fx
    raise BracketError("could not bracket an interior minimum after expansion")


def log_grid_max(fn, t_lo: float, t_hi: float, n_coarse: int = 160, tol: float = 1e-12):
    """Maximize fn(t) on a fixed positive bracket; coarse scan plus golden."""
    x_lo, x_hi = math.log(t_lo), math.log(t_hi)
    xs = np.linspace(x_lo, x_hi, n_coarse)
    vals = np.array([fn(math.exp(x)) for x in xs])
    k = int(np.nanargmax(vals))
    if k == 0 or k == n_coarse - 1:
        raise BracketError("maximum sits on the bracket edge")
    x, fneg = golden_min(lambda x_: -fn(math.exp(x_)), xs[k - 1], xs[k + 1], tol=tol)
    return math.exp(x), -fneg


def sign_change_brackets(fn, xs) -> list[tuple[float, float]]:
    """All consecutive pairs of xs across which fn changes sign."""
    vals = [fn(x) for x in xs]
    out = []
    for a, b, fa, fb in zip(xs[:-1], xs[1:], vals[:-1], vals[1:]):
        if not (np.isfinite(fa) and np.isfinite(fb)):
            continue
        if fa == 0.0:
            out.append((a, a))
        elif fa * fb < 0:
            out.append((a, b))
    return out
