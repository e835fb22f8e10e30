"""Rational functions r(z) = sum_j residues[j] / (z - poles[j]) and their recovery
from Fourier coefficients on the unit circle.

Negative-index coefficients carry the poles inside the unit disk, positive-index
coefficients the poles outside it. Each side is an exponential sum and is
handled by ESPRIT on its own Hankel pencil.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InvalidInputError, NumericalFailure
from .exponential import (
    DEFAULT_RANK_TOL,
    _min_pairwise_distance,
    esprit,
    hankel_full,
    lstsq_full_rank,
    numerical_rank,
    sort_nodes,
)

__all__ = [
    "RationalFunction",
    "FourierWindow",
    "UnitCircleSamples",
    "PoleMatch",
    "UNIT_CIRCLE_TOL",
    "fourier_closed_form",
    "sample_unit_circle",
    "fourier_from_samples",
    "aliasing_bound",
    "recover_poles_inside",
    "recover_poles_outside",
    "recover_residues",
    "recover",
    "recover_from_samples",
    "match_poles",
]

UNIT_CIRCLE_TOL = 1e-12
_RECIPROCAL_FLOOR = 1e-14


def _cvec(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=complex)).ravel()


@dataclass(frozen=True)
class RationalFunction:
    """Strictly proper rational function with simple poles, in pole/residue form.

    ``M = 0`` (no poles) is allowed and represents the zero function.
    """

    poles: np.ndarray
    residues: np.ndarray

    def __post_init__(self):
        poles = _cvec(self.poles)
        residues = _cvec(self.residues)
        if poles.shape != residues.shape:
            raise InvalidInputError("poles and residues must have equal length")
        if np.any(residues == 0):
            raise InvalidInputError("residues must be nonzero")
        if poles.size > 1 and _min_pairwise_distance(poles) == 0:
            raise InvalidInputError("poles must be pairwise distinct")
        if not (np.all(np.isfinite(poles)) and np.all(np.isfinite(residues))):
            raise InvalidInputError("poles and residues must be finite")
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "residues", residues)

    @property
    def order(self) -> int:
        return self.poles.size

    @property
    def inside(self) -> np.ndarray:
        return np.abs(self.poles) < 1

    @property
    def outside(self) -> np.ndarray:
        return np.abs(self.poles) > 1

    def split(self):
        """Return ``(poles_in, residues_in, poles_out, residues_out)``."""
        i, o = self.inside, self.outside
        return self.poles[i], self.residues[i], self.poles[o], self.residues[o]

    def check_off_circle(self, tol: float = UNIT_CIRCLE_TOL) -> None:
        on = np.abs(np.abs(self.poles) - 1) < tol
        if np.any(on):
            raise InvalidInputError(f"poles on the unit circle are not supported: {self.poles[on]}")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        d = z[..., None] - self.poles
        if np.any(d == 0):
            raise InvalidInputError("evaluation at a pole")
        return (self.residues / d).sum(axis=-1)


@dataclass(frozen=True)
class FourierWindow:
    """Fourier coefficients r_k for k = -1..-2N (``neg``) and k = 1..2N (``pos``).

    k = 0 is never stored.
    """

    N: int
    neg: np.ndarray
    pos: np.ndarray

    def __post_init__(self):
        neg, pos = _cvec(self.neg), _cvec(self.pos)
        if self.N < 1:
            raise InvalidInputError("N must be positive")
        if neg.size != 2 * self.N or pos.size != 2 * self.N:
            raise InvalidInputError(f"a window with N={self.N} needs {2 * self.N} coefficients per side")
        object.__setattr__(self, "neg", neg)
        object.__setattr__(self, "pos", pos)

    def __getitem__(self, k: int) -> complex:
        if k == 0 or abs(k) > 2 * self.N:
            raise KeyError(k)
        return complex(self.neg[-k - 1] if k < 0 else self.pos[k - 1])

    def as_array(self) -> np.ndarray:
        """Coefficients for k = -2N..-1, 1..2N in increasing k."""
        return np.concatenate([self.neg[::-1], self.pos])

    @staticmethod
    def indices(N: int) -> np.ndarray:
        k = np.arange(1, 2 * N + 1)
        return np.concatenate([-k[::-1], k])


@dataclass(frozen=True)
class UnitCircleSamples:
    """Values r(t_n) at t_n = exp(2 pi i n / (4N)), n = 0..4N-1."""

    values: np.ndarray
    points: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = _cvec(self.values)
        if v.size == 0 or v.size % 4:
            raise InvalidInputError(f"sample count must be a positive multiple of 4, got {v.size}")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "points", np.exp(2j * np.pi * np.arange(v.size) / v.size))

    @property
    def N(self) -> int:
        return self.values.size // 4


def fourier_closed_form(r: RationalFunction, N: int) -> FourierWindow:
    """Exact Fourier coefficients of ``r`` on the unit circle for 1 <= |k| <= 2N."""
    r.check_off_circle()
    if N < 1:
        raise InvalidInputError("N must be positive")
    zi, gi, zo, go = r.split()
    k = np.arange(1, 2 * N + 1)
    # r_{-k} = sum_{|z|<1} g z^(k-1);  r_k = -sum_{|z|>1} g z^-(k+1)
    neg = (gi * zi ** (k[:, None] - 1)).sum(axis=1)
    pos = -(go * zo ** (-(k[:, None] + 1.0))).sum(axis=1)
    return FourierWindow(N, neg, pos)


def sample_unit_circle(r: RationalFunction, N: int) -> UnitCircleSamples:
    """Evaluate ``r`` on the 4N-point equispaced grid of the unit circle."""
    r.check_off_circle()
    t = np.exp(2j * np.pi * np.arange(4 * N) / (4 * N))
    return UnitCircleSamples(r(t))


def fourier_from_samples(samples: UnitCircleSamples | np.ndarray) -> FourierWindow:
    """Approximate Fourier coefficients from unit-circle samples by a length-4N DFT.

    With R_j = (1/4N) sum_n r(t_n) exp(-2 pi i j n / 4N), coefficient k is read
    from bin ``k mod 4N``. The two window edges k = -2N and k = 2N share bin 2N.
    """
    if not isinstance(samples, UnitCircleSamples):
        samples = UnitCircleSamples(samples)
    v = samples.values
    n = v.size
    N = n // 4
    R = np.fft.fft(v) / n
    k = np.arange(1, 2 * N + 1)
    return FourierWindow(N, R[(-k) % n], R[k % n])


def aliasing_bound(r: RationalFunction, N: int) -> FourierWindow:
    """Per-coefficient bound on |DFT estimate - exact coefficient| for 4N samples.

    The DFT bin for k equals sum_m r_{k + 4Nm}; the bound sums the geometric
    tails of all m != 0 terms using the pole moduli of ``r``.
    """
    zi, gi, zo, go = r.split()
    n = 4 * N
    k = np.arange(1, 2 * N + 1)
    q_in, q_out = np.abs(zi), 1 / np.abs(zo)

    def tail(q, g, first_exponent):
        # sum over m >= 1 of |g| q^(first_exponent + 4N(m-1))
        return (np.abs(g) * q ** first_exponent[:, None] / (1 - q ** n)).sum(axis=1)

    # k = -j: inside aliases z^(4Nm+j-1), outside aliases |z|^-(4Nm-j+1)
    neg = tail(q_in, gi, n + k - 1) + tail(q_out, go, n - k + 1)
    # k = +j: inside aliases z^(4Nm-j-1), outside aliases |z|^-(4Nm+j+1)
    pos = tail(q_in, gi, n - k - 1) + tail(q_out, go, n + k + 1)
    return FourierWindow(N, neg, pos)


def _side_poles(seq: np.ndarray, L: int, order: int | None, rel_tol: float) -> np.ndarray:
    if order is None:
        s = np.linalg.svd(hankel_full(seq, L), compute_uv=False)
        if numerical_rank(s, rel_tol) == 0:
            return np.zeros(0, dtype=complex)
    elif order == 0:
        return np.zeros(0, dtype=complex)
    return esprit(seq, L, order, rel_tol)


def recover_poles_inside(fw: FourierWindow, L: int, M1: int | None = None,
                         rel_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Poles inside the unit disk from r_{-1}, ..., r_{-2N}.

    ``M1=None`` detects the count by numerical rank; this mode assumes exact
    data and raises if an eigenvalue lands on or outside the unit circle.
    """
    z = _side_poles(fw.neg, L, M1, rel_tol)
    if M1 is None and np.any(np.abs(z) >= 1):
        raise NumericalFailure("inside pencil returned an eigenvalue with |z| >= 1; M1 is inconsistent")
    return z


def recover_poles_outside(fw: FourierWindow, L: int, M2: int | None = None,
                          rel_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Poles outside the unit disk from r_1, ..., r_{2N}.

    The pencil built from the positive side has the reciprocals 1/z as
    eigenvalues; this returns the poles themselves.
    """
    lam = _side_poles(fw.pos, L, M2, rel_tol)
    if np.any(np.abs(lam) < _RECIPROCAL_FLOOR):
        raise NumericalFailure("outside pencil eigenvalue is numerically zero; pole at infinity")
    z = sort_nodes(1 / lam)
    if M2 is None and np.any(np.abs(z) <= 1):
        raise NumericalFailure("outside pencil returned a pole with |z| <= 1; M2 is inconsistent")
    return z


def recover_residues(poles_in, poles_out, fw: FourierWindow):
    """Least-squares residues for each side, solved as two independent systems.

    Inside:  sum_n g_n z_n^(k-1)     = r_{-k},  k = 1..2N
    Outside: -sum_n g_n z_n^-(k+1)   = r_k,     k = 1..2N
    """
    zi, zo = _cvec(poles_in), _cvec(poles_out)
    k = np.arange(1, 2 * fw.N + 1)[:, None]
    if max(zi.size, zo.size) > 2 * fw.N:
        raise InvalidInputError("more poles than coefficients on one side")
    for z in (zi, zo):
        if z.size > 1 and _min_pairwise_distance(z) == 0:
            raise NumericalFailure("repeated poles make the residue system rank deficient")
    gi = lstsq_full_rank(zi ** (k - 1), fw.neg) if zi.size else np.zeros(0, complex)
    go = _outside_residues(zo, fw.pos, 1) if zo.size else np.zeros(0, complex)
    return gi, go


def recover(fw: FourierWindow, L: int, M1: int | None = None, M2: int | None = None,
            rel_tol: float = DEFAULT_RANK_TOL) -> RationalFunction:
    """Full pipeline: inside poles, outside poles, then residues."""
    zi = recover_poles_inside(fw, L, M1, rel_tol)
    zo = recover_poles_outside(fw, L, M2, rel_tol)
    gi, go = recover_residues(zi, zo, fw)
    if np.any(gi == 0) or np.any(go == 0):
        raise NumericalFailure("a recovered residue is exactly zero")
    return RationalFunction(np.concatenate([zi, zo]), np.concatenate([gi, go]))


def _outside_residues(zo: np.ndarray, seq: np.ndarray, first_k: int) -> np.ndarray:
    k = np.arange(first_k, first_k + seq.size)[:, None]
    return lstsq_full_rank(-(zo ** -(k + 1.0)), seq)


def recover_from_samples(samples: UnitCircleSamples | np.ndarray, L: int, M1: int | None = None,
                         M2: int | None = None, rel_tol: float = DEFAULT_RANK_TOL) -> RationalFunction:
    """Recover ``r`` directly from 4N unit-circle samples.

    The DFT bins are read as the centred window k = -2N..2N-1. The inside
    pencil uses r_{-1}..r_{-2N} as in :func:`recover`; the outside pencil uses
    r_0..r_{2N-1}, since for a strictly proper ``r`` the k = 0 coefficient
    -sum g/z over the outside poles continues the positive-index sequence.
    Bin 2N is then consumed once (as r_{-2N}) rather than twice.
    """
    if not isinstance(samples, UnitCircleSamples):
        samples = UnitCircleSamples(samples)
    n = samples.values.size
    N = n // 4
    R = np.fft.fft(samples.values) / n
    k = np.arange(1, 2 * N + 1)
    neg, out = R[(-k) % n], R[k - 1]
    zi = _side_poles(neg, L, M1, rel_tol)
    if M1 is None and np.any(np.abs(zi) >= 1):
        raise NumericalFailure("inside pencil returned an eigenvalue with |z| >= 1; M1 is inconsistent")
    lam = _side_poles(out, L, M2, rel_tol)
    if np.any(np.abs(lam) < _RECIPROCAL_FLOOR):
        raise NumericalFailure("outside pencil eigenvalue is numerically zero; pole at infinity")
    zo = sort_nodes(1 / lam)
    if M2 is None and np.any(np.abs(zo) <= 1):
        raise NumericalFailure("outside pencil returned a pole with |z| <= 1; M2 is inconsistent")
    for z in (zi, zo):
        if z.size > 1 and _min_pairwise_distance(z) == 0:
            raise NumericalFailure("repeated poles make the residue system rank deficient")
    gi = lstsq_full_rank(zi ** (k[:, None] - 1), neg) if zi.size else np.zeros(0, complex)
    go = _outside_residues(zo, out, 0) if zo.size else np.zeros(0, complex)
    if np.any(gi == 0) or np.any(go == 0):
        raise NumericalFailure("a recovered residue is exactly zero")
    return RationalFunction(np.concatenate([zi, zo]), np.concatenate([gi, go]))


@dataclass(frozen=True)
class PoleMatch:
    """Optimal pairing of true and estimated poles.

    ``pairs[i] = (truth_index, estimate_index)``; errors are per pair, in the
    same order. ``e_z``/``e_gamma`` are maxima over the matched pairs.
    """

    pairs: list
    pole_errors: np.ndarray
    residue_errors: np.ndarray
    e_z: float
    e_gamma: float
    cardinality_mismatch: bool

    def error_for_truth(self, n_truth: int) -> np.ndarray:
        """Per-pole error indexed by truth position (NaN where unmatched)."""
        out = np.full(n_truth, np.nan)
        for (i, _), e in zip(self.pairs, self.pole_errors):
            out[i] = e
        return out


def match_poles(truth: RationalFunction, estimate: RationalFunction) -> PoleMatch:
    """Minimum-cost matching of estimated to true poles under |z - z~|."""
    if truth.order == 0 or estimate.order == 0:
        return PoleMatch([], np.zeros(0), np.zeros(0), 0.0, 0.0, truth.order != estimate.order)
    cost = np.abs(truth.poles[:, None] - estimate.poles[None, :])
    rows, cols = linear_sum_assignment(cost)
    pe = cost[rows, cols]
    re = np.abs(truth.residues[rows] - estimate.residues[cols])
    return PoleMatch(
        pairs=[(int(i), int(j)) for i, j in zip(rows, cols)],
        pole_errors=pe,
        residue_errors=re,
        e_z=float(pe.max()),
        e_gamma=float(re.max()),
        cardinality_mismatch=truth.order != estimate.order,
    )
