"""Exponential sums f(t) = sum_j coeffs[j] * nodes[j]**t and their recovery by ESPRIT.

Matrices are plain complex ``numpy.ndarray`` objects. Sample vectors hold
f(0), ..., f(2N-1) and must have even length.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvalidInputError, NumericalFailure

__all__ = [
    "ExponentialSum",
    "as_samples",
    "vandermonde",
    "hankel_full",
    "hankel_window",
    "numerical_rank",
    "esprit",
    "solve_coeffs",
    "sort_nodes",
    "DEFAULT_RANK_TOL",
]

DEFAULT_RANK_TOL = 1e-10

# Reject a W(0) window whose condition number exceeds this.
_PINV_COND_LIMIT = 1e13


@dataclass(frozen=True)
class ExponentialSum:
    """Exponential sum of order M with pairwise distinct nodes and nonzero coefficients."""

    nodes: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        nodes = np.atleast_1d(np.asarray(self.nodes, dtype=complex))
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if nodes.ndim != 1 or nodes.shape != coeffs.shape:
            raise InvalidInputError("nodes and coeffs must be 1-D arrays of equal length")
        if nodes.size == 0:
            raise InvalidInputError("an exponential sum needs at least one term")
        if np.any(coeffs == 0):
            raise InvalidInputError("coefficients must be nonzero")
        if nodes.size > 1 and _min_pairwise_distance(nodes) == 0:
            raise InvalidInputError("nodes must be pairwise distinct")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def order(self) -> int:
        return self.nodes.size

    def __call__(self, t):
        t = np.asarray(t)
        return (self.coeffs * self.nodes ** t[..., None]).sum(axis=-1)

    def samples(self, n_samples: int) -> np.ndarray:
        """Return f(0), ..., f(n_samples - 1)."""
        return vandermonde(self.nodes, n_samples) @ self.coeffs


def _min_pairwise_distance(z: np.ndarray) -> float:
    d = np.abs(z[:, None] - z[None, :])
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


def sort_nodes(z) -> np.ndarray:
    """Sort complex values lexicographically by (real, imag)."""
    z = np.asarray(z, dtype=complex)
    return z[np.lexsort((z.imag, z.real))]


def as_samples(samples) -> np.ndarray:
    """Validate a sample vector f(0..2N-1) and return it as complex."""
    f = np.asarray(samples, dtype=complex)
    if f.ndim != 1:
        raise InvalidInputError("samples must be a 1-D sequence")
    if f.size < 2 or f.size % 2:
        raise InvalidInputError(f"sample count must be even and >= 2, got {f.size}")
    if not np.all(np.isfinite(f)):
        raise InvalidInputError("samples must be finite")
    return f


def vandermonde(nodes, n_rows: int) -> np.ndarray:
    """Vandermonde matrix with entry ``[k, j] = nodes[j]**k`` for k = 0..n_rows-1."""
    a = np.atleast_1d(np.asarray(nodes, dtype=complex))
    if a.ndim != 1 or a.size == 0:
        raise InvalidInputError("vandermonde needs a non-empty 1-D node list")
    if n_rows < 1:
        raise InvalidInputError("n_rows must be positive")
    return np.vander(a, n_rows, increasing=True).T


def _check_window(n_samples: int, L: int) -> None:
    # L <= N is the usual choice; sample-driven runs use N < L <= 2N - 1.
    if not 1 <= L <= n_samples - 1:
        raise InvalidInputError(f"L={L} out of range for {n_samples} samples (need 1 <= L <= {n_samples - 1})")


def hankel_full(samples, L: int) -> np.ndarray:
    """(2N-L) x (L+1) Hankel matrix with entry ``[k, l] = f(k + l)``."""
    f = as_samples(samples)
    _check_window(f.size, L)
    n = f.size
    return scipy.linalg.hankel(f[: n - L], f[n - L - 1:])


def hankel_window(samples, L: int, shift: int) -> np.ndarray:
    """(2N-L) x L window of :func:`hankel_full`, entry ``[k, l] = f(k + l + shift)``."""
    if shift not in (0, 1):
        raise InvalidInputError("shift must be 0 or 1")
    return hankel_full(samples, L)[:, shift: L + shift]


def numerical_rank(singular_values, rel_tol: float = DEFAULT_RANK_TOL) -> int:
    """Count singular values strictly above ``rel_tol * s[0]``.

    ``singular_values`` must be sorted in descending order. An empty or
    all-zero input has rank 0.
    """
    s = np.asarray(singular_values, dtype=float)
    if s.size == 0 or s[0] <= 0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def esprit(samples, L: int, order: int | None = None, rel_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Recover the nodes of an exponential sum from 2N equispaced samples.

    Parameters
    ----------
    samples : array_like
        f(0), ..., f(2N-1).
    L : int
        Pencil width; an upper bound for the order.
    order : int or None
        Number of nodes M. ``None`` detects it as the numerical rank of the
        Hankel matrix (only meaningful for exact data).
    rel_tol : float
        Relative threshold for the rank detection.

    Returns
    -------
    numpy.ndarray
        M complex nodes sorted by (real, imag).
    """
    H = hankel_full(samples, L)
    _, s, Wh = np.linalg.svd(H, full_matrices=False)
    if order is None:
        order = numerical_rank(s, rel_tol)
        if order == 0:
            raise NumericalFailure("rank detection found no signal (numerical rank 0)")
    if not 1 <= order <= min(L, H.shape[0]):
        raise InvalidInputError(f"order {order} incompatible with a {H.shape[0]}x{H.shape[1]} Hankel matrix")

    W = Wh[:order]
    W0t = W[:, :-1].T
    W1t = W[:, 1:].T
    sw = np.linalg.svd(W0t, compute_uv=False)
    if sw[-1] <= sw[0] / _PINV_COND_LIMIT:
        raise NumericalFailure("shifted signal subspace window W(0) is rank deficient")
    F = np.linalg.pinv(W0t) @ W1t
    return sort_nodes(np.linalg.eigvals(F))


def lstsq_full_rank(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Least-squares solve via pivoted QR; raise if A is column-rank deficient."""
    x, _, rank, _ = scipy.linalg.lstsq(A, b, lapack_driver="gelsy")
    if rank < A.shape[1]:
        raise NumericalFailure(f"least-squares system is rank deficient (rank {rank} < {A.shape[1]})")
    return x


def solve_coeffs(nodes, samples) -> np.ndarray:
    """Least-squares coefficients gamma minimising ||V_{2N,M}(nodes) gamma - f||_2."""
    f = np.asarray(samples, dtype=complex)
    z = np.atleast_1d(np.asarray(nodes, dtype=complex))
    if z.size > f.size:
        raise InvalidInputError("more nodes than samples")
    if z.size > 1 and _min_pairwise_distance(z) == 0:
        raise NumericalFailure("repeated nodes make the Vandermonde system rank deficient")
    return lstsq_full_rank(vandermonde(z, f.size), f)
