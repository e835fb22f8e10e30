"""Seeded Monte-Carlo noise experiments for pole recovery.

Noise is real, multiplicative and Gaussian: each datum d becomes d * (1 + eps)
with eps ~ N(0, sigma^2). Every trial draws from its own PCG64 stream spawned
from the master seed, so reports do not depend on trial scheduling.
"""
from __future__ import annotations

import csv
import enum
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .aaa import aaa_fit, bary_to_rational
from .errors import InvalidInputError, RatPencilError
from .rational import (
    FourierWindow,
    RationalFunction,
    UnitCircleSamples,
    fourier_closed_form,
    match_poles,
    recover,
    recover_from_samples,
    sample_unit_circle,
)
from .sensitivity import rational_sensitivity_report

__all__ = [
    "NoiseTarget",
    "NoiseSpec",
    "ExperimentReport",
    "GENERATOR_NAME",
    "trial_generators",
    "perturb",
    "run_experiment",
    "compare_aaa",
    "sensitivity_ordering",
    "report_rows",
    "write_csv",
]

GENERATOR_NAME = "numpy.random.PCG64"


class NoiseTarget(str, enum.Enum):
    COEFFICIENTS = "coefficients"
    SAMPLES = "samples"


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float
    trials: int = 10
    seed: int = 0
    target: NoiseTarget = NoiseTarget.COEFFICIENTS

    def __post_init__(self):
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise InvalidInputError("sigma must be a finite nonnegative number")
        if int(self.trials) != self.trials or self.trials < 1:
            raise InvalidInputError("trials must be a positive integer")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise InvalidInputError("seed must be an integer in [0, 2**64)")
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "target", NoiseTarget(self.target))


def trial_generators(spec: NoiseSpec) -> list[np.random.Generator]:
    """One independent generator per trial, spawned from ``spec.seed``."""
    children = np.random.SeedSequence(spec.seed).spawn(spec.trials)
    return [np.random.Generator(np.random.PCG64(s)) for s in children]


def _scale(x: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    return x * (1 + sigma * rng.standard_normal(x.size))


def perturb(data, sigma: float, rng: np.random.Generator):
    """Return a multiplicatively perturbed copy of a window, sample set or array.

    A FourierWindow gets independent draws for its inside (``neg``) and
    outside (``pos``) halves, in that order.
    """
    if sigma < 0:
        raise InvalidInputError("sigma must be nonnegative")
    if isinstance(data, FourierWindow):
        neg = _scale(data.neg, sigma, rng)
        pos = _scale(data.pos, sigma, rng)
        return FourierWindow(data.N, neg, pos)
    if isinstance(data, UnitCircleSamples):
        return UnitCircleSamples(_scale(data.values, sigma, rng))
    x = np.asarray(data, dtype=complex)
    return _scale(x.ravel(), sigma, rng).reshape(x.shape)


@dataclass(frozen=True)
class ExperimentReport:
    """Per-pole error statistics over the successful trials.

    ``errors[t, j]`` is |z_j - z~_j| in trial t (NaN for failed trials).
    ``failures`` lists ``(trial, reason)``.
    """

    method: str
    poles: np.ndarray
    errors: np.ndarray
    e_z: np.ndarray
    e_gamma: np.ndarray
    failures: list
    config: dict = field(default_factory=dict)

    @property
    def ok(self) -> np.ndarray:
        return np.all(np.isfinite(self.errors), axis=1)

    @property
    def n_success(self) -> int:
        return int(self.ok.sum())

    def _stat(self, a: np.ndarray, fn):
        a = a[self.ok]
        if a.shape[0] == 0:
            return np.full(a.shape[1:], np.nan)
        return fn(a, axis=0)

    @property
    def min(self) -> np.ndarray:
        return self._stat(self.errors, np.min)

    @property
    def max(self) -> np.ndarray:
        return self._stat(self.errors, np.max)

    @property
    def average(self) -> np.ndarray:
        return self._stat(self.errors, np.mean)

    def summary(self, which: str) -> dict:
        """min/max/average of the trial-wise ``e_z`` or ``e_gamma``."""
        a = getattr(self, which)[self.ok]
        if a.size == 0:
            return {"min": np.nan, "max": np.nan, "average": np.nan}
        return {"min": float(a.min()), "max": float(a.max()), "average": float(a.mean())}


def _score(truth: RationalFunction, est: RationalFunction):
    m = match_poles(truth, est)
    if m.cardinality_mismatch:
        raise _TrialFailure(f"recovered {est.order} poles, expected {truth.order}")
    return m.error_for_truth(truth.order), m.e_z, m.e_gamma


class _TrialFailure(Exception):
    pass


def _run_trials(n_trials, body, workers):
    def guarded(t):
        try:
            return body(t), None
        except (RatPencilError, _TrialFailure, np.linalg.LinAlgError) as exc:
            return None, f"{type(exc).__name__}: {exc}"

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(guarded, range(n_trials)))
    return [guarded(t) for t in range(n_trials)]


def _assemble(method, truth, results, config):
    M = truth.order
    errors = np.full((len(results), M), np.nan)
    e_z = np.full(len(results), np.nan)
    e_g = np.full(len(results), np.nan)
    failures = []
    for t, (res, reason) in enumerate(results):
        if res is None:
            failures.append((t, reason))
            continue
        errors[t], e_z[t], e_g[t] = res
    return ExperimentReport(method, truth.poles.copy(), errors, e_z, e_g, failures, dict(config, method=method))


def _config(r, N, L, m1, m2, spec):
    return {
        "N": N,
        "L": L,
        "M1": m1,
        "M2": m2,
        "sigma": spec.sigma,
        "trials": spec.trials,
        "seed": spec.seed,
        "target": spec.target.value,
        "generator": GENERATOR_NAME,
    }


def _defaults(r, N, L, m1, m2):
    r.check_off_circle()
    if N < 1:
        raise InvalidInputError("N must be positive")
    zi, _, zo, _ = r.split()
    m1 = zi.size if m1 is None else m1
    m2 = zo.size if m2 is None else m2
    L = N if L is None else L
    if not 1 <= L <= 2 * N - 1:
        raise InvalidInputError(f"L={L} out of range for N={N}")
    if m1 < 0 or m2 < 0 or max(m1, m2) > L:
        raise InvalidInputError(f"pole counts ({m1}, {m2}) must lie in [0, L={L}]")
    return L, m1, m2


def run_experiment(r: RationalFunction, N: int, spec: NoiseSpec, L: int | None = None,
                   m1: int | None = None, m2: int | None = None, workers: int = 1) -> ExperimentReport:
    """Repeat perturb -> recover -> match for ``spec.trials`` trials.

    Pole counts default to the true ones and L defaults to N. Trials whose
    recovery fails are listed in ``failures`` and excluded from statistics.
    """
    L, m1, m2 = _defaults(r, N, L, m1, m2)
    rngs = trial_generators(spec)
    if spec.target is NoiseTarget.SAMPLES:
        clean = sample_unit_circle(r, N)
    else:
        clean = fourier_closed_form(r, N)

    def body(t):
        data = perturb(clean, spec.sigma, rngs[t])
        if spec.target is NoiseTarget.SAMPLES:
            return _score(r, recover_from_samples(data, L, m1, m2))
        return _score(r, recover(data, L, m1, m2))

    results = _run_trials(spec.trials, body, workers)
    return _assemble("hankel", r, results, _config(r, N, L, m1, m2, spec))


def compare_aaa(r: RationalFunction, N: int, spec: NoiseSpec, L: int | None = None,
                m1: int | None = None, m2: int | None = None, aaa_tol: float = 1e-13,
                workers: int = 1) -> tuple[ExperimentReport, ExperimentReport]:
    """Hankel-pencil and AAA recovery on the same noisy 4N unit-circle samples.

    AAA runs with M + 1 support points at most. ``spec.target`` is ignored:
    both methods always see noisy samples.
    """
    L, m1, m2 = _defaults(r, N, L, m1, m2)
    rngs = trial_generators(spec)
    clean = sample_unit_circle(r, N)
    noisy = [None] * spec.trials

    def sample(t):
        if noisy[t] is None:
            noisy[t] = perturb(clean, spec.sigma, rngs[t])
        return noisy[t]

    def hankel(t):
        return _score(r, recover_from_samples(sample(t), L, m1, m2))

    def aaa(t):
        s = sample(t)
        model = aaa_fit(s.points, s.values, max_terms=m1 + m2 + 1, rel_tol=aaa_tol)
        return _score(r, bary_to_rational(model))

    cfg = dict(_config(r, N, L, m1, m2, spec), target=NoiseTarget.SAMPLES.value)
    h = _assemble("hankel", r, _run_trials(spec.trials, hankel, workers), cfg)
    a = _assemble("aaa", r, _run_trials(spec.trials, aaa, workers), dict(cfg, L=None))
    return h, a


def sensitivity_ordering(r: RationalFunction, report: ExperimentReport) -> dict:
    """Does the most sensitive pole (by rho) on each side have the largest average error?

    Returns ``{side: bool}`` for sides with at least two poles.
    """
    sens = rational_sensitivity_report(r)
    avg = report.average
    out = {}
    for side, rep in sens.items():
        if rep.poles.size < 2:
            continue
        idx = np.array([int(np.argmin(np.abs(r.poles - p))) for p in rep.poles])
        out[side] = int(np.argmax(rep.unstructured.rho)) == int(np.argmax(avg[idx]))
    return out


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "{:.16e}".format(float(x))
    return str(x)


def report_rows(report: ExperimentReport, prefix: str = "") -> list[list[str]]:
    """CSV body rows: per-pole min/max/average, aggregate stats, then config."""
    rows = []
    stats = {"min": report.min, "max": report.max, "average": report.average}
    for j, p in enumerate(report.poles):
        for name, arr in stats.items():
            rows.append([_num(p.real), _num(p.imag), prefix + name, _num(arr[j])])
    for which in ("e_z", "e_gamma"):
        for name, v in report.summary(which).items():
            rows.append(["", "", f"{prefix}{which}_{name}", _num(v)])
    rows.append(["", "", prefix + "failed_trials", _num(len(report.failures))])
    for key, v in report.config.items():
        rows.append(["", "", f"{prefix}config.{key}", _num(v)])
    return rows


def write_csv(reports, out) -> None:
    """Write one report, or several with ``method:`` prefixes, to a path or text stream."""
    if isinstance(reports, ExperimentReport):
        body = report_rows(reports)
    else:
        body = [row for rep in reports for row in report_rows(rep, rep.method + ":")]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["pole_re", "pole_im", "stat", "value"])
    w.writerows(body)
    if hasattr(out, "write"):
        out.write(buf.getvalue())
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
