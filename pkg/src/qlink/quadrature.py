"""Globally adaptive Gauss-Kronrod (7/15) quadrature.

Integrands are called with a 1-D numpy array of abscissae and must return an
array of the same shape. Intervals are bisected worst-error-first until the
summed error estimate drops below ``max(atol, rtol * |I|)`` or the evaluation
budget runs out, in which case :class:`ConvergenceError` is raised carrying
the achieved estimate.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _sp_integrate

from .errors import ConvergenceError, ValidationError

# Kronrod nodes (non-negative half) and weights, with the embedded Gauss weights
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KRONROD_W = np.concatenate([_WK[:-1], _WK[::-1]])
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])

METHODS = ("gk15", "scipy")


@dataclass(frozen=True)
class QuadratureSpec:
    """Integration settings.

    ``solid_angle_factor`` is the value of the angular integral of cos(theta)
    applied to per-steradian backgrounds; the default pi corresponds to the
    forward hemisphere.
    """

    method: str = "gk15"
    rtol: float = 1e-6
    atol: float = 0.0
    max_evals: int = 1_000_000
    solid_angle_factor: float = math.pi

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValidationError(f"unknown quadrature method {self.method!r}; choose from {METHODS}")
        if not self.rtol > 0 and not self.atol > 0:
            raise ValidationError("quadrature needs rtol > 0 or atol > 0")
        if self.max_evals < 15:
            raise ValidationError("max_evals must allow at least one 15-point rule")


DEFAULT_QUADRATURE = QuadratureSpec()


def _gk15(f, a, b):
    """Apply the 15-point rule to every interval [a_i, b_i] at once."""
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = centre[:, None] + half[:, None] * _NODES[None, :]
    y = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(y)):
        raise ConvergenceError("integrand returned a non-finite value")
    kronrod = half * (y @ _KRONROD_W)
    gauss = half * (y @ _GAUSS_W)
    return kronrod, np.abs(kronrod - gauss)


def integrate(f, a, b, spec=DEFAULT_QUADRATURE, points=None):
    """Integrate ``f`` over ``[a, b]``.

    Parameters
    ----------
    f : callable
        Vectorised integrand.
    a, b : float
        Finite limits.
    spec : QuadratureSpec
    points : sequence of float, optional
        Breakpoints inside ``(a, b)`` used to seed the initial subdivision
        (e.g. the nodes of a tabulated spectrum).

    Returns
    -------
    value, error : float
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValidationError("integration limits must be finite")
    if a == b:
        return 0.0, 0.0
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    if spec.method == "scipy":
        value, error = _scipy_quad(f, a, b, spec, points)
        return sign * value, error

    edges = np.array([a, b], dtype=float)
    if points is not None:
        inner = np.asarray(points, dtype=float)
        inner = inner[(inner > a) & (inner < b)]
        edges = np.unique(np.concatenate([edges, inner]))
    lo, hi = edges[:-1], edges[1:]
    evals = 15 * lo.size
    if evals > spec.max_evals:
        raise ConvergenceError(
            f"{lo.size} initial intervals exceed the budget of {spec.max_evals} evaluations"
        )
    vals, errs = _gk15(f, lo, hi)
    # max-heap on error, entries (-err, lo, hi, val)
    heap = [(-e, l, h, v) for e, l, h, v in zip(errs, lo, hi, vals)]
    heapq.heapify(heap)
    total = float(np.sum(vals))
    total_err = float(np.sum(errs))
    passes = 0

    while total_err > max(spec.atol, spec.rtol * abs(total)):
        # bisect a batch of the worst intervals per pass
        batch = [heapq.heappop(heap)]
        while heap and len(batch) < 32 and -heap[0][0] >= 1e-3 * -batch[0][0]:
            batch.append(heapq.heappop(heap))
        if evals + 30 * len(batch) > spec.max_evals:
            for item in batch:
                heapq.heappush(heap, item)
            raise ConvergenceError(
                f"quadrature did not converge within {spec.max_evals} evaluations "
                f"(estimate {total:.6e}, error {total_err:.3e})",
                estimate=total, error=total_err,
            )
        blo = np.array([item[1] for item in batch])
        bhi = np.array([item[2] for item in batch])
        mid = 0.5 * (blo + bhi)
        if np.any((mid <= blo) | (mid >= bhi)):
            raise ConvergenceError(
                "interval bisection reached machine resolution "
                f"(estimate {total:.6e}, error {total_err:.3e})",
                estimate=total, error=total_err,
            )
        new_lo = np.concatenate([blo, mid])
        new_hi = np.concatenate([mid, bhi])
        new_vals, new_errs = _gk15(f, new_lo, new_hi)
        evals += 15 * new_lo.size
        for item in batch:
            total -= item[3]
            total_err += item[0]
        total += float(np.sum(new_vals))
        total_err += float(np.sum(new_errs))
        for e, l, h, v in zip(new_errs, new_lo, new_hi, new_vals):
            heapq.heappush(heap, (-e, l, h, v))
        passes += 1
        if passes % 64 == 0:
            # re-sum to shed accumulated cancellation error
            total = math.fsum(item[3] for item in heap)
            total_err = math.fsum(-item[0] for item in heap)
    total = math.fsum(item[3] for item in heap)
    total_err = math.fsum(-item[0] for item in heap)
    return sign * total, total_err


def _scipy_quad(f, a, b, spec, points):
    scalar = lambda x: float(np.asarray(f(np.array([x])))[0])
    limit = max(50, spec.max_evals // 21)
    pts = None
    if points is not None:
        pts = [p for p in points if a < p < b]
        if len(pts) > limit // 2:
            pts = None
    value, error, info = _sp_integrate.quad(
        scalar, a, b, epsabs=spec.atol, epsrel=max(spec.rtol, 1e-13),
        limit=limit, points=pts, full_output=True,
    )[:3]
    if info["neval"] > spec.max_evals or error > max(spec.atol, spec.rtol * abs(value)):
        raise ConvergenceError(
            f"scipy quad did not converge (estimate {value:.6e}, error {error:.3e})",
            estimate=value, error=error,
        )
    return value, error
