"""Picard successive approximations and where they break down.

The iterates y_{n+1}(x) = y0 + int_x0^x f(x', y_n(x')) dx' are computed
by cumulative trapezoid on a shared grid.  For bounded right-hand sides
they converge at the classic factorial rate; for a delta right-hand side
the second substitution produces an integral of delta times its own step
whose smeared value depends on how the widths are sent to zero, so the
iteration has no unique limit even though the direct solution
exp(Theta(x - a)) is perfectly definite.

The singular equation x y' = A is the standing example of an equation
the iteration cannot touch at all: its general solution jumps between
two integration constants across x = 0 and is provided here only as a
closed-form two-branch evaluator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .singular_dynamics import SmearedDelta

__all__ = [
    "PicardRun",
    "BreakdownReport",
    "picard_iterate",
    "error_bound",
    "picard_delta_breakdown",
    "identity_sqrt_family",
    "log_branch_solution",
]


@dataclass(frozen=True)
class PicardRun:
    """Successive approximations on a shared grid.

    ``iterates`` has shape (n_max + 1, grid); row zero is the constant
    initial guess.  ``errors`` holds sup-norm distances to the reference
    solution (the final iterate when no reference is given).
    """

    xs: np.ndarray
    iterates: np.ndarray
    bound_params: tuple[float, float, float] | None
    errors: np.ndarray


def _cumtrapz(values: np.ndarray, dx: float) -> np.ndarray:
    out = np.empty_like(values)
    out[0] = 0.0
    np.cumsum((values[1:] + values[:-1]) * (dx / 2.0), out=out[1:])
    return out


def picard_iterate(rhs, y0: float, x0: float, x1: float, n_max: int,
                   grid: int, reference=None,
                   bound_params: tuple[float, float, float] | None = None) -> PicardRun:
    """Run n_max successive substitutions of the integral equation.

    ``rhs(x, y)`` must accept array arguments.  A non-finite sample stops
    the run immediately with the offending location in the message; that
    is the detector for genuinely singular right-hand sides.
    """
    if grid < 64:
        raise ValueError(f"grid must have at least 64 points, got {grid}")
    if not x1 > x0:
        raise ValueError(f"need x1 > x0, got x0={x0}, x1={x1}")
    xs = np.linspace(x0, x1, grid)
    dx = (x1 - x0) / (grid - 1)
    iterates = np.empty((n_max + 1, grid))
    iterates[0] = y0
    for n in range(n_max):
        f = np.asarray(rhs(xs, iterates[n]), dtype=float)
        if f.shape != xs.shape:
            f = np.broadcast_to(f, xs.shape)
        bad = ~np.isfinite(f)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise ValueError(
                f"rhs returned a non-finite sample at x={float(xs[i]):g} "
                f"(iterate {n}): the integrand is not a measurable function there"
            )
        iterates[n + 1] = y0 + _cumtrapz(f, dx)

    ref = np.asarray(reference(xs), dtype=float) if reference is not None else iterates[-1]
    errors = np.max(np.abs(iterates - ref), axis=1)
    return PicardRun(xs=xs, iterates=iterates, bound_params=bound_params, errors=errors)


def error_bound(M: float, Nlip: float, h: float, n: int) -> float:
    """A-priori bound M N^(n-1) h^n / n! on the n-th iterate's error.

    M bounds |f| and Nlip bounds |df/dy| on the domain rectangle; h is
    the interval radius min(a, b/M).
    """
    if min(M, Nlip, h) <= 0 or n < 1:
        raise ValueError("bound parameters must be positive and n >= 1")
    return M * Nlip ** (n - 1) * h**n / math.factorial(n)


@dataclass(frozen=True)
class BreakdownReport:
    """Second-iterate behaviour of the smeared delta right-hand side.

    Symmetric smearing pins the doubled term to 1/2, so the second
    iterate lands near 1 + mass + 1/2; asymmetric width pairs slide that
    term anywhere between 0 and 1, so the eps -> 0 limit is not unique.
    ``direct_value`` is the closed-form solution exp(Theta(x1 - a)) the
    iteration fails to reach.
    """

    eps_sequence: tuple[float, ...]
    symmetric_second_iterates: tuple[float, ...]
    asymmetric_pairs: tuple[tuple[float, float], ...]
    asymmetric_second_iterates: tuple[float, ...]
    direct_value: float
    asymmetric_spread: float


def _second_iterate_mixed(a: float, eps_inner: float, eps_outer: float,
                          x1: float, grid: int) -> float:
    """y2(x1) for f(x, y) = delta_eps(x - a) y with level-dependent widths.

    The first substitution uses the inner width, the second the outer
    width, mirroring how each nested integral would be regularized
    independently.  Causal kernels keep the half-mass split asymmetric.
    """
    inner = SmearedDelta(kind="causal", epsilon=eps_inner, center=a)
    outer = SmearedDelta(kind="causal", epsilon=eps_outer, center=a)
    xs = np.linspace(0.0, x1, grid)
    dx = x1 / (grid - 1)
    if dx > min(eps_inner, eps_outer) / 8.0:
        raise ValueError(
            f"grid step {dx:.3e} cannot resolve width {min(eps_inner, eps_outer):.3e}"
        )
    y1 = 1.0 + _cumtrapz(inner.density(xs), dx)
    y2 = 1.0 + _cumtrapz(outer.density(xs) * y1, dx)
    return float(y2[-1])


def picard_delta_breakdown(a: float, epsilon: float, x1: float,
                           n_max: int = 2, grid: int = 32001) -> BreakdownReport:
    """Probe the iteration on f(x, y) = delta(x - a) y via smearing.

    Runs symmetric Gaussian smearings over a decreasing width sequence
    (second iterates hover near 1 + 1 + 1/2) and the two decade-apart
    causal width pairs, whose second iterates differ by almost one:
    no unique smeared limit exists, unlike the direct solution.
    """
    if not (0.0 < a < x1):
        raise ValueError(f"need 0 < a < x1, got a={a}, x1={x1}")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if n_max < 2:
        raise ValueError("the pathology appears at the second iterate; n_max >= 2")

    eps_sequence = tuple(epsilon * f for f in (4.0, 2.0, 1.0))
    symmetric = []
    for eps in eps_sequence:
        delta = SmearedDelta(kind="gaussian", epsilon=eps, center=a)
        dx = x1 / (grid - 1)
        if dx > delta.scale / 8.0:
            raise ValueError(
                f"grid step {dx:.3e} cannot resolve smearing width {delta.scale:.3e}"
            )
        run = picard_iterate(
            lambda x, y, d=delta: d.density(x) * y,
            y0=1.0, x0=0.0, x1=x1, n_max=n_max, grid=grid,
        )
        symmetric.append(float(run.iterates[2][-1]))

    pairs = ((epsilon / 10.0, epsilon * 10.0), (epsilon * 10.0, epsilon / 10.0))
    asymmetric = tuple(
        _second_iterate_mixed(a, e1, e2, x1, grid) for e1, e2 in pairs
    )
    return BreakdownReport(
        eps_sequence=eps_sequence,
        symmetric_second_iterates=tuple(symmetric),
        asymmetric_pairs=pairs,
        asymmetric_second_iterates=asymmetric,
        direct_value=math.e if x1 > a else 1.0,
        asymmetric_spread=float(max(asymmetric) - min(asymmetric)),
    )


def identity_sqrt_family(a: float, b: float) -> np.ndarray:
    """A two-by-two square root of the identity that is not the positive one.

    For b != 0 returns [[a, b], [(1 - a^2)/b, -a]], which squares to the
    identity for any a.  For b == 0 the traceless form degenerates and
    only a = +/-1 survives, giving the diagonal roots a * I.  The unique
    positive definite root is the identity itself; everything else in
    the family fails positivity.
    """
    if b == 0.0:
        if abs(a) != 1.0:
            raise ValueError("with b = 0 only a = +/-1 squares to the identity")
        return np.diag([a, a]).astype(np.complex128)
    c = (1.0 - a * a) / b
    return np.array([[a, b], [c, -a]], dtype=np.complex128)


def log_branch_solution(A: float, c_pos: float, c_neg: float):
    """General solution of x y' = A: log branches with independent constants.

    y(x) = A log|x| + c_pos for x > 0 and A log|x| + c_neg for x < 0.
    The constant may jump across the singular point, which is exactly the
    discontinuous freedom no successive-approximation scheme can see;
    the point x = 0 itself is outside every branch.
    """

    def evaluate(x: float) -> float:
        if x == 0.0:
            raise ValueError("the solution is singular at x = 0")
        return A * math.log(abs(x)) + (c_pos if x > 0 else c_neg)

    return evaluate
