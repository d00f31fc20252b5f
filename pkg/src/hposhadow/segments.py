"""Batched boundary-value solver for orbit segments of the Hénon family.

An orbit segment of ``f(x, y) = (x**2 + c - b y, x)`` is determined by the
sequence of its x-coordinates, which satisfies the second-order recurrence

    x[k+1] = x[k]**2 + c - b x[k-1].

Fixing ``x[-1]`` (the height of the first point, i.e. a horizontal line) and
``x[L]`` (the x-coordinate of the image of the last point, i.e. a vertical
curve ``f^-1{x = const}``) leaves ``L`` unknowns and ``L`` equations with a
tridiagonal Jacobian.  Pinning both ends this way keeps the solve well
conditioned, while pushing points forward through ``f`` loses accuracy at the
expansion rate.

Many segments of equal length are stacked into one banded system, so a
whole stage is one LAPACK call per Newton step.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

from .errors import ConvergenceError

NEWTON_CAP = 100


def _residual(x, left, right, c, b):
    prev = np.concatenate([left[:, None], x[:, :-1]], axis=1)
    nxt = np.concatenate([x[:, 1:], right[:, None]], axis=1)
    return nxt + b * prev - x * x - c


def solve_segments(left, right, guess, c: complex, b: complex) -> np.ndarray:
    """Solve a batch of orbit-segment problems by damped Newton iteration.

    ``left`` and ``right`` have shape ``(B,)`` and ``guess`` has shape
    ``(B, L)``.  Returns the ``(B, L)`` array of interior x-coordinates.  The
    solution found is the one Newton's method reaches from ``guess``; callers
    choose the branch through the guess.
    """
    left = np.asarray(left, dtype=complex)
    right = np.asarray(right, dtype=complex)
    x = np.array(guess, dtype=complex)
    B, L = x.shape
    if L == 0:
        return x
    scale = 1.0 + abs(c) + np.abs(x).max(axis=1) ** 2
    F = _residual(x, left, right, c, b)
    norm = np.abs(F).max(axis=1)
    done = norm <= 1e-15 * scale
    upper = np.ones((B, L), dtype=complex)
    upper[:, 0] = 0.0
    lower = np.full((B, L), b, dtype=complex)
    lower[:, -1] = 0.0
    ab = np.zeros((3, B * L), dtype=complex)
    ab[0] = upper.ravel()
    ab[2] = lower.ravel()
    for _ in range(NEWTON_CAP):
        if done.all():
            break
        ab[1] = (-2.0 * x).ravel()
        try:
            delta = solve_banded((1, 1), ab, -F.ravel(), check_finite=False).reshape(B, L)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("singular Jacobian in an orbit-segment solve") from exc
        t = np.ones(B)
        for _ in range(40):
            trial = x + t[:, None] * delta
            Ft = _residual(trial, left, right, c, b)
            nt = np.abs(Ft).max(axis=1)
            worse = (nt > norm) & ~done & (t > 1e-10)
            if not worse.any():
                break
            t = np.where(worse, t / 2, t)
        step = t * np.abs(delta).max(axis=1)
        x = np.where(done[:, None], x, trial)
        F = np.where(done[:, None], F, Ft)
        norm = np.where(done, norm, nt)
        done |= (norm <= 1e-15 * scale) | (step <= 1e-16 * scale)
    if not (norm <= 1e-10 * scale).all():
        raise ConvergenceError(f"orbit-segment Newton solve did not converge (residual {norm.max():.2e})")
    return x


def segment_points(left, x) -> np.ndarray:
    """Points ``(x[k], x[k-1])`` of the segments as a ``(B, L, 2)`` array."""
    left = np.asarray(left, dtype=complex)
    prev = np.concatenate([left[:, None], x[:, :-1]], axis=1)
    return np.stack([x, prev], axis=-1)
