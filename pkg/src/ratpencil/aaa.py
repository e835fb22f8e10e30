"""Minimal AAA rational approximation in barycentric form.

    r(z) = sum_s w_s f_s / (z - t_s)  /  sum_s w_s / (z - t_s)

Support points t_s are picked greedily at the largest residual, weights are
the smallest right singular vector of the Loewner matrix over the remaining
points. No Froissart-doublet cleanup is done.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvalidInputError, NumericalFailure
from .exponential import _min_pairwise_distance
from .rational import RationalFunction

__all__ = [
    "BarycentricModel",
    "aaa_fit",
    "bary_eval",
    "bary_poles",
    "bary_residues",
    "bary_to_rational",
    "INFINITE_POLE_LIMIT",
]

INFINITE_POLE_LIMIT = 1e13


@dataclass(frozen=True)
class BarycentricModel:
    """Barycentric rational with distinct support points and unit-norm weights.

    ``residuals`` holds the max residual over non-support points after each
    greedy step (empty for hand-built models).
    """

    support_points: np.ndarray
    support_values: np.ndarray
    weights: np.ndarray
    residuals: tuple = ()

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.support_points, dtype=complex))
        f = np.atleast_1d(np.asarray(self.support_values, dtype=complex))
        w = np.atleast_1d(np.asarray(self.weights, dtype=complex))
        if not (t.ndim == 1 and t.shape == f.shape == w.shape) or t.size == 0:
            raise InvalidInputError("support points, values and weights must be 1-D of equal, nonzero length")
        if t.size > 1 and _min_pairwise_distance(t) == 0:
            raise InvalidInputError("support points must be distinct")
        nw = np.linalg.norm(w)
        if not np.isclose(nw, 1.0, rtol=1e-10, atol=0):
            raise InvalidInputError(f"weights must have unit 2-norm, got {nw}")
        object.__setattr__(self, "support_points", t)
        object.__setattr__(self, "support_values", f)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "residuals", tuple(float(x) for x in self.residuals))

    @property
    def m(self) -> int:
        return self.support_points.size

    def __call__(self, z):
        return bary_eval(self, z)


def bary_eval(model: BarycentricModel, z):
    """Evaluate the barycentric quotient; support points return their stored value."""
    z = np.asarray(z, dtype=complex)
    zz = z.ravel()
    t, f, w = model.support_points, model.support_values, model.weights
    d = zz[:, None] - t[None, :]
    hit = d == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        C = 1 / d
        out = (C @ (w * f)) / (C @ w)
    rows, cols = np.nonzero(hit)
    out[rows] = f[cols]
    return out.reshape(z.shape) if z.ndim else complex(out[0])


def aaa_fit(points, values, max_terms: int, rel_tol: float = 1e-13) -> BarycentricModel:
    """Greedy AAA fit with at most ``max_terms`` support points.

    Stops once the max residual over non-support points is at most
    ``rel_tol * max|values|``. Ties in the greedy choice go to the lowest index.
    """
    Z = np.atleast_1d(np.asarray(points, dtype=complex))
    F = np.atleast_1d(np.asarray(values, dtype=complex))
    if Z.ndim != 1 or Z.shape != F.shape:
        raise InvalidInputError("points and values must be 1-D of equal length")
    if max_terms < 2 or Z.size < max_terms:
        raise InvalidInputError(f"need len(points) >= max_terms >= 2, got {Z.size} and {max_terms}")
    if rel_tol < 0:
        raise InvalidInputError("rel_tol must be nonnegative")
    if _min_pairwise_distance(Z) == 0:
        raise InvalidInputError("points must be distinct")
    if not (np.all(np.isfinite(Z)) and np.all(np.isfinite(F))):
        raise InvalidInputError("points and values must be finite")

    tol = rel_tol * np.abs(F).max()
    rest = np.ones(Z.size, dtype=bool)
    chosen: list[int] = []
    R = np.full(F.shape, F.mean())
    history: list[float] = []
    w = None
    for m in range(1, max_terms + 1):
        err = np.where(rest, np.abs(F - R), -np.inf)
        j = int(np.argmax(err))
        chosen.append(j)
        rest[j] = False
        n_rest = int(rest.sum())
        if n_rest < m:
            raise NumericalFailure(f"over-saturated fit: {n_rest} non-support points for {m} weights")
        t, f = Z[chosen], F[chosen]
        C = 1 / (Z[rest][:, None] - t[None, :])
        A = (F[rest][:, None] - f[None, :]) * C
        _, _, Vh = np.linalg.svd(A, full_matrices=False)
        w = Vh[-1].conj()
        R = F.copy()
        R[rest] = (C @ (w * f)) / (C @ w)
        res = float(np.abs(F[rest] - R[rest]).max()) if n_rest else 0.0
        history.append(res)
        if res <= tol:
            break
    return BarycentricModel(Z[chosen], F[chosen], w, tuple(history))


def bary_poles(model: BarycentricModel) -> np.ndarray:
    """Finite poles from the arrowhead generalized eigenproblem.

    Eigenvalues that are infinite or exceed ``INFINITE_POLE_LIMIT`` in
    magnitude are dropped.
    """
    m = model.m
    if m < 2:
        raise InvalidInputError("pole extraction needs at least 2 support points")
    E = np.zeros((m + 1, m + 1), dtype=complex)
    E[0, 1:] = model.weights
    E[1:, 0] = 1
    E[1:, 1:] = np.diag(model.support_points)
    B = np.eye(m + 1, dtype=complex)
    B[0, 0] = 0
    try:
        ev = scipy.linalg.eigvals(E, B)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure("barycentric pole eigenproblem failed") from exc
    ev = ev[np.isfinite(ev)]
    return ev[np.abs(ev) <= INFINITE_POLE_LIMIT]


def bary_residues(model: BarycentricModel, poles) -> np.ndarray:
    """Residues N(p) / D'(p) of the barycentric quotient at each pole p."""
    p = np.atleast_1d(np.asarray(poles, dtype=complex))
    t, f, w = model.support_points, model.support_values, model.weights
    C = 1 / (p[:, None] - t[None, :])
    num = C @ (w * f)
    dden = -(C**2) @ w
    return num / dden


def bary_to_rational(model: BarycentricModel) -> RationalFunction:
    """Pole/residue form of the fit (the constant part is discarded)."""
    p = bary_poles(model)
    g = bary_residues(model, p)
    keep = np.isfinite(g) & (g != 0)
    return RationalFunction(p[keep], g[keep])
