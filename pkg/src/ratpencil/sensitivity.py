"""Sensitivities of square Hankel-pencil eigenvalues and of recovered poles.

A pencil is described by its eigenvalues ``nodes`` (lambda_j) and the
effective diagonal ``coeffs`` (c_j) of the factorisations

    H(0) = V diag(c) V^T,    H(1) = V diag(c * lambda) V^T,

with V the square Vandermonde matrix of the nodes. For poles inside the unit
disk lambda = z and c = gamma. For poles outside, the pencil built from the
positive-index coefficients has lambda = 1/z and c = -gamma z^-2.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InvalidInputError, NumericalFailure
from .exponential import _min_pairwise_distance, vandermonde
from .rational import RationalFunction

__all__ = [
    "Side",
    "PencilSpec",
    "UnstructuredReport",
    "StructuredReport",
    "SideReport",
    "pencil_eigvectors",
    "pencil_matrices",
    "unstructured_sensitivities",
    "structured_sensitivities",
    "first_order_prediction",
    "first_order_shift",
    "hankel_perturbation",
    "eigenvalue_shifts",
    "perturbed_eigenvalues",
    "rational_sensitivity_report",
]


class Side(str, enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    GENERIC = "generic"


@dataclass(frozen=True)
class PencilSpec:
    side: Side
    nodes: np.ndarray
    coeffs: np.ndarray
    poles: np.ndarray | None = None

    def __post_init__(self):
        nodes = np.atleast_1d(np.asarray(self.nodes, dtype=complex))
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if nodes.shape != coeffs.shape or nodes.ndim != 1:
            raise InvalidInputError("nodes and coeffs must be 1-D of equal length")
        if np.any(coeffs == 0):
            raise InvalidInputError("effective coefficients must be nonzero")
        if nodes.size > 1 and _min_pairwise_distance(nodes) == 0:
            raise NumericalFailure("coincident pencil eigenvalues")
        poles = nodes if self.poles is None else np.asarray(self.poles, dtype=complex)
        object.__setattr__(self, "side", Side(self.side))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "poles", poles)

    @classmethod
    def generic(cls, nodes, coeffs) -> "PencilSpec":
        return cls(Side.GENERIC, nodes, coeffs)

    @classmethod
    def inside(cls, poles, residues) -> "PencilSpec":
        return cls(Side.INSIDE, poles, residues)

    @classmethod
    def outside(cls, poles, residues) -> "PencilSpec":
        z = np.atleast_1d(np.asarray(poles, dtype=complex))
        g = np.atleast_1d(np.asarray(residues, dtype=complex))
        return cls(Side.OUTSIDE, 1 / z, -g * z ** -2.0, poles=z)

    @property
    def order(self) -> int:
        return self.nodes.size

    def measurement_labels(self) -> np.ndarray:
        """Label of the m-th measurement, m = 1..2M.

        Inside: Fourier index -m. Outside: Fourier index +m. Generic: sample
        index m - 1 of f.
        """
        m = np.arange(1, 2 * self.order + 1)
        if self.side is Side.INSIDE:
            return -m
        if self.side is Side.OUTSIDE:
            return m
        return m - 1


@dataclass(frozen=True)
class UnstructuredReport:
    rho: np.ndarray
    zeta: np.ndarray
    bound: np.ndarray
    kappaV: float
    l2_norm_rho: float
    l2_bound: float
    l1_norm_rho: float
    l1_bound: float


@dataclass(frozen=True)
class StructuredReport:
    S: np.ndarray
    eta_per_measurement: np.ndarray
    eta: np.ndarray
    measurements: np.ndarray


def pencil_eigvectors(nodes) -> np.ndarray:
    """Columns p_j = q_j = (V^T)^-1 e_j of the square pencil with these eigenvalues."""
    z = np.atleast_1d(np.asarray(nodes, dtype=complex))
    if z.size > 1 and _min_pairwise_distance(z) == 0:
        raise NumericalFailure("coincident nodes: V^T is singular")
    Vt = vandermonde(z, z.size).T
    try:
        return np.linalg.solve(Vt, np.eye(z.size))
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("V^T is singular") from exc


def pencil_matrices(spec: PencilSpec):
    """Return the square Hankel matrices (H(0), H(1)) rebuilt from the factorisation."""
    if spec.order == 1:
        # skip the 1x1 matmul so entries round exactly like c and c * lambda
        return spec.coeffs.reshape(1, 1).copy(), (spec.coeffs * spec.nodes).reshape(1, 1)
    V = vandermonde(spec.nodes, spec.order)
    H0 = (V * spec.coeffs) @ V.T
    H1 = (V * (spec.coeffs * spec.nodes)) @ V.T
    return H0, H1


def _norm2(A: np.ndarray) -> float:
    # same rounding path as zeta, so rho equals its bound bit-for-bit when M = 1
    return float(np.abs(A).max()) if A.shape == (1, 1) else float(np.linalg.norm(A, 2))


def unstructured_sensitivities(spec: PencilSpec) -> UnstructuredReport:
    """Exact sensitivities rho_j and their Vandermonde-condition bounds."""
    M = spec.order
    if M == 0:
        z = np.zeros(0)
        return UnstructuredReport(z, z, z, 0.0, 0.0, 0.0, 0.0, 0.0)
    lam, c = spec.nodes, spec.coeffs
    P = pencil_eigvectors(lam)
    H0, H1 = pencil_matrices(spec)
    n0 = _norm2(H0)
    n1 = _norm2(H1)
    pn2 = np.sum(np.abs(P) ** 2, axis=0)
    rho = pn2 * (np.abs(lam) * n0 + n1) / np.abs(c)

    V = vandermonde(lam, M)
    sv = np.linalg.svd(V, compute_uv=False)
    kappa = sv[0] / sv[-1]
    zeta = (np.abs(lam) * np.abs(c).max() + np.abs(c * lam).max()) / np.abs(c)
    # ||V^-1||_F^2 equals the sum of squared column norms of (V^T)^-1
    l1_bound = zeta.max() * sv[0] ** 2 * pn2.sum()
    return UnstructuredReport(
        rho=rho,
        zeta=zeta,
        bound=zeta * kappa**2,
        kappaV=float(kappa),
        l2_norm_rho=float(np.linalg.norm(rho)),
        l2_bound=float(np.linalg.norm(zeta) * kappa**2),
        l1_norm_rho=float(rho.sum()),
        l1_bound=float(l1_bound),
    )


def structured_sensitivities(spec: PencilSpec) -> StructuredReport:
    """First-order response matrix S (M x 2M) to Hankel-structured perturbations.

    Row j gives d lambda_j / d delta_m where delta_m perturbs the m-th
    measurement (entries delta_{k+l} of H(0) and delta_{k+l+1} of H(1)).
    """
    M = spec.order
    labels = spec.measurement_labels()
    if M == 0:
        return StructuredReport(np.zeros((0, 0), complex), np.zeros((0, 0)), np.zeros(0), labels)
    P = pencil_eigvectors(spec.nodes)
    S = np.zeros((M, 2 * M), dtype=complex)
    for j in range(M):
        p = P[:, j]
        # full convolution: conv[i] = sum_{a+b=i} p_a p_b, i = 0..2M-2
        conv = np.convolve(p, p)
        # measurement m (0-based) enters H(1) at a+b = m-1 and H(0) at a+b = m
        from_h1 = np.concatenate([[0], conv])
        from_h0 = np.concatenate([conv, [0]])
        S[j] = (from_h1 - spec.nodes[j] * from_h0) / spec.coeffs[j]
    eta_m = np.abs(S)
    return StructuredReport(S, eta_m, np.sqrt(np.sum(eta_m**2, axis=1)), labels)


def first_order_prediction(report: StructuredReport, delta) -> np.ndarray:
    """Predicted eigenvalue shifts S @ delta."""
    d = np.asarray(delta, dtype=complex)
    if d.shape != (report.S.shape[1],):
        raise InvalidInputError(f"delta must have length {report.S.shape[1]}")
    return report.S @ d


def hankel_perturbation(delta):
    """Hankel perturbations (dH(0), dH(1)) generated by a 2M-vector delta."""
    d = np.asarray(delta, dtype=complex)
    if d.ndim != 1 or d.size % 2:
        raise InvalidInputError("delta must be a 1-D vector of even length")
    M = d.size // 2
    i = np.add.outer(np.arange(M), np.arange(M))
    return d[i], d[i + 1]


def first_order_shift(spec: PencilSpec, dH0, dH1) -> np.ndarray:
    """Generic first-order shifts p^T (dH1 - lambda dH0) q / (p^T H(0) q) for each eigenvalue."""
    P = pencil_eigvectors(spec.nodes)
    out = np.empty(spec.order, dtype=complex)
    for j in range(spec.order):
        p = P[:, j]
        out[j] = p @ (dH1 - spec.nodes[j] * dH0) @ p / spec.coeffs[j]
    return out


def eigenvalue_shifts(spec: PencilSpec, dH0, dH1, dps: int = 60) -> np.ndarray:
    """Exact eigenvalue shifts of the perturbed square pencil.

    H(0) and H(1) are rebuilt from ``spec`` and the perturbed pencil is solved
    in ``dps``-digit arithmetic; shifts are formed before rounding to double,
    so second-order effects of tiny perturbations are resolved. No
    eigenvector formula is used. Entry j belongs to ``spec.nodes[j]``.
    """
    M = spec.order
    if M == 0:
        return np.zeros(0, dtype=complex)
    dH0 = np.asarray(dH0, dtype=complex)
    dH1 = np.asarray(dH1, dtype=complex)
    if dH0.shape != (M, M) or dH1.shape != (M, M):
        raise InvalidInputError(f"perturbations must be {M}x{M}")
    with mpmath.workdps(dps):
        lam = [mpmath.mpc(x) for x in spec.nodes]
        c = [mpmath.mpc(x) for x in spec.coeffs]
        A = mpmath.matrix(M, M)
        B = mpmath.matrix(M, M)
        for k in range(M):
            for l in range(M):
                A[k, l] = mpmath.fsum(c[j] * lam[j] ** (k + l) for j in range(M)) + mpmath.mpc(dH0[k, l])
                B[k, l] = mpmath.fsum(c[j] * lam[j] ** (k + l + 1) for j in range(M)) + mpmath.mpc(dH1[k, l])
        if M == 1:
            # mpmath.eig ignores left/right=False for 1x1 input
            ev = [B[0, 0] / A[0, 0]]
        else:
            ev = mpmath.eig(mpmath.inverse(A) * B, left=False, right=False)
        diff = [[e - l for e in ev] for l in lam]
        cost = np.array([[float(abs(d)) for d in row] for row in diff])
        rows, cols = linear_sum_assignment(cost)
        out = np.empty(M, dtype=complex)
        for r_, c_ in zip(rows, cols):
            out[r_] = complex(diff[r_][c_])
    return out


def perturbed_eigenvalues(spec: PencilSpec, dH0, dH1, dps: int = 60) -> np.ndarray:
    """Perturbed eigenvalues, entry j matched to ``spec.nodes[j]``."""
    return spec.nodes + eigenvalue_shifts(spec, dH0, dH1, dps)


@dataclass(frozen=True)
class SideReport:
    """Sensitivities for one side of the unit circle, labelled by the original poles."""

    spec: PencilSpec
    unstructured: UnstructuredReport
    structured: StructuredReport

    @property
    def poles(self) -> np.ndarray:
        return self.spec.poles


def rational_sensitivity_report(r: RationalFunction) -> dict[str, SideReport]:
    """Sensitivity reports for the inside and outside poles of ``r``.

    Outside values are computed for the pencil eigenvalues 1/z and reported
    against the poles z themselves.
    """
    r.check_off_circle()
    zi, gi, zo, go = r.split()
    out = {}
    for key, spec in (("inside", PencilSpec.inside(zi, gi)), ("outside", PencilSpec.outside(zo, go))):
        out[key] = SideReport(spec, unstructured_sensitivities(spec), structured_sensitivities(spec))
    return out
