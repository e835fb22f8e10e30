"""JSON formats for functions, coefficient windows, samples and sensitivity reports.

Floats are written with 17 significant digits (``'{:.16e}'``) so that every
double round-trips exactly. Complex numbers are ``{"re": .., "im": ..}``.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .errors import InvalidInputError
from .rational import FourierWindow, RationalFunction, UnitCircleSamples
from .sensitivity import SideReport

__all__ = [
    "dumps",
    "load_json",
    "save_json",
    "rational_to_json",
    "rational_from_json",
    "window_to_json",
    "window_from_json",
    "samples_to_json",
    "samples_from_json",
    "data_from_json",
    "sensitivity_to_json",
]


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return "{:.16e}".format(x)


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """json.dumps replacement with 17-significant-digit floats."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(obj if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps(_c(obj), indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def save_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj) + "\n")


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path} is not valid JSON: {exc}") from exc


def _c(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _from_c(d) -> complex:
    if isinstance(d, (int, float)) and not isinstance(d, bool):
        return complex(d)
    try:
        return complex(float(d["re"]), float(d.get("im", 0.0)))
    except (TypeError, KeyError, ValueError) as exc:
        raise InvalidInputError(f"expected a complex number object, got {d!r}") from exc


def _clist(seq) -> np.ndarray:
    if not isinstance(seq, list):
        raise InvalidInputError("expected a JSON array of complex numbers")
    return np.array([_from_c(x) for x in seq], dtype=complex)


def _field(obj, key):
    if not isinstance(obj, dict) or key not in obj:
        raise InvalidInputError(f"missing field {key!r}")
    return obj[key]


def rational_to_json(r: RationalFunction) -> dict:
    return {"poles": [_c(z) for z in r.poles], "residues": [_c(g) for g in r.residues]}


def rational_from_json(obj) -> RationalFunction:
    r = RationalFunction(_clist(_field(obj, "poles")), _clist(_field(obj, "residues")))
    r.check_off_circle()
    return r


def window_to_json(fw: FourierWindow) -> dict:
    k = np.arange(1, 2 * fw.N + 1)
    return {
        "kind": "fourier",
        "N": fw.N,
        "neg": [dict(k=int(-i), **_c(v)) for i, v in zip(k, fw.neg)],
        "pos": [dict(k=int(i), **_c(v)) for i, v in zip(k, fw.pos)],
    }


def window_from_json(obj) -> FourierWindow:
    N = _field(obj, "N")
    if not isinstance(N, int) or isinstance(N, bool):
        raise InvalidInputError("N must be an integer")
    neg, pos = _field(obj, "neg"), _field(obj, "pos")
    for side, sign in ((neg, -1), (pos, 1)):
        if not isinstance(side, list):
            raise InvalidInputError("neg/pos must be arrays")
        ks = [e.get("k") for e in side if isinstance(e, dict)]
        if ks and any(k is not None for k in ks) and ks != [sign * i for i in range(1, len(side) + 1)]:
            raise InvalidInputError("coefficient indices must run k = ±1..±2N in order")
    return FourierWindow(N, _clist(neg), _clist(pos))


def samples_to_json(s: UnitCircleSamples) -> dict:
    return {"kind": "samples", "N": s.N, "values": [_c(v) for v in s.values]}


def samples_from_json(obj) -> UnitCircleSamples:
    s = UnitCircleSamples(_clist(_field(obj, "values")))
    if "N" in obj and obj["N"] != s.N:
        raise InvalidInputError(f"N={obj['N']} does not match {s.values.size} samples")
    return s


def data_from_json(obj):
    """Parse either a Fourier window or unit-circle samples, dispatching on ``kind``."""
    kind = obj.get("kind", "fourier") if isinstance(obj, dict) else None
    if kind == "fourier":
        return window_from_json(obj)
    if kind == "samples":
        return samples_from_json(obj)
    raise InvalidInputError(f"unknown data kind {kind!r}")


def _side_to_json(rep: SideReport) -> dict:
    u, s = rep.unstructured, rep.structured
    return {
        "poles": [_c(z) for z in rep.poles],
        "pencil_eigenvalues": [_c(z) for z in rep.spec.nodes],
        "rho": u.rho,
        "zeta": u.zeta,
        "bound": u.bound,
        "eta": s.eta,
        "eta_per_measurement": s.eta_per_measurement,
        "measurement_labels": s.measurements,
        "kappaV": u.kappaV,
        "l1_norm_rho": u.l1_norm_rho,
        "l1_bound": u.l1_bound,
        "l2_norm_rho": u.l2_norm_rho,
        "l2_bound": u.l2_bound,
        "S": [[_c(x) for x in row] for row in s.S],
    }


def sensitivity_to_json(report: dict) -> dict:
    return {side: _side_to_json(rep) for side, rep in report.items()}
