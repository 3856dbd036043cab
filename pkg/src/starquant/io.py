"""JSON documents for algebras, curves, trajectories and run reports.

Tensors are stored as nested arrays (never flattened) so files can be diffed
against printed multiplication tables.  Complex entries are ``[re, im]``
pairs.  Writing is deterministic: ``write(read(write(x)))`` is byte-identical
to ``write(x)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .algebra import AlgebraSpec, ProductCurve, check_star_axioms, curve_eval
from .errors import ParseError, SchemaVersionError

SCHEMA_VERSION = 1
SUPPORTED_VERSIONS = (1,)
CURVE_CHECK_SAMPLES = (0.0, 1.0)


def encode_array(a, is_complex: bool = False):
    a = np.asarray(a)
    if is_complex:
        a = a.astype(np.complex128)
        return np.stack([a.real, a.imag], axis=-1).astype(float).tolist()
    if np.iscomplexobj(a):
        raise ValueError("complex data in a real document")
    return np.asarray(a, dtype=np.float64).tolist()


def _decode(node, shape, path, is_complex):
    if not shape:
        if is_complex:
            if not (isinstance(node, list) and len(node) == 2 and all(_is_number(v) for v in node)):
                raise ParseError(path, "expected a [re, im] pair")
            return complex(float(node[0]), float(node[1]))
        if not _is_number(node):
            raise ParseError(path, f"expected a number, got {type(node).__name__}")
        return float(node)
    if not isinstance(node, list):
        raise ParseError(path, f"expected an array of {shape[0]} entries")
    if len(node) != shape[0]:
        raise ParseError(path, f"expected {shape[0]} entries, got {len(node)}")
    return [_decode(v, shape[1:], f"{path}[{i}]", is_complex) for i, v in enumerate(node)]


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def decode_array(node, shape, path: str, is_complex: bool = False) -> np.ndarray:
    out = np.array(_decode(node, tuple(shape), path, is_complex),
                   dtype=np.complex128 if is_complex else np.float64)
    return out.reshape(tuple(shape))


def algebra_to_document(alg: AlgebraSpec, curve: Optional[ProductCurve] = None) -> dict:
    cx = alg.field == "complex"
    doc = {
        "schemaVersion": SCHEMA_VERSION,
        "kind": "algebra",
        "dim": alg.dim,
        "field": alg.field,
        "grading": alg.grading,
        "basisNames": list(alg.basis_names),
        "parity": list(alg.parity),
        "product": encode_array(alg.bullet, cx),
        "unit": encode_array(alg.unit, cx),
        "involution": encode_array(alg.involution, cx),
        "conjugate": alg.conjugate,
        "poisson": encode_array(alg.poisson, cx),
    }
    if curve is not None:
        doc["curve"] = [encode_array(c, cx) for c in curve.coeffs]
    return doc


def dumps(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def write_algebra_file(path, alg: AlgebraSpec, curve: Optional[ProductCurve] = None) -> None:
    Path(path).write_text(dumps(algebra_to_document(alg, curve)))


def _check_version(doc):
    if not isinstance(doc, dict):
        raise ParseError("$", "document must be a JSON object")
    version = doc.get("schemaVersion")
    if version not in SUPPORTED_VERSIONS:
        raise SchemaVersionError(f"unsupported schemaVersion {version!r}; supported: {SUPPORTED_VERSIONS}")


def _require(doc, key, kind=None):
    if key not in doc:
        raise ParseError(key, "missing")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(key, f"expected {getattr(kind, '__name__', kind)}")
    return value


@dataclass
class LoadedAlgebra:
    algebra: AlgebraSpec
    curve: Optional[ProductCurve]
    report: object
    warnings: list = field(default_factory=list)

    @property
    def warning(self) -> bool:
        return bool(self.warnings)


def document_to_algebra(doc: dict) -> tuple:
    _check_version(doc)
    n = _require(doc, "dim", int)
    if n < 1:
        raise ParseError("dim", "must be positive")
    fld = _require(doc, "field", str)
    if fld not in ("real", "complex"):
        raise ParseError("field", f"unknown field {fld!r}")
    cx = fld == "complex"
    names = doc.get("basisNames") or [f"b{i}" for i in range(n)]
    if not isinstance(names, list) or len(names) != n or not all(isinstance(s, str) for s in names):
        raise ParseError("basisNames", f"expected {n} strings")
    parity = doc.get("parity") or [0] * n
    if not isinstance(parity, list) or len(parity) != n or not all(p in (0, 1) for p in parity):
        raise ParseError("parity", f"expected {n} entries of 0 or 1")
    grading = doc.get("grading", "bosonic")
    if grading not in ("bosonic", "fermionic"):
        raise ParseError("grading", f"unknown grading {grading!r}")
    conjugate = doc.get("conjugate", cx)
    if not isinstance(conjugate, bool):
        raise ParseError("conjugate", "expected a boolean")
    product = decode_array(_require(doc, "product"), (n, n, n), "product", cx)
    unit = decode_array(_require(doc, "unit"), (n,), "unit", cx)
    involution = decode_array(_require(doc, "involution"), (n, n), "involution", cx)
    if "poisson" in doc:
        poisson = decode_array(doc["poisson"], (n, n, n), "poisson", cx)
    else:
        poisson = np.zeros((n, n, n))
    alg = AlgebraSpec(
        dim=n, field=fld, bullet=product, unit=unit, involution=involution,
        poisson=poisson, conjugate=conjugate, grading=grading,
        parity=tuple(parity), basis_names=tuple(names),
    )
    curve = None
    if doc.get("curve") is not None:
        raw = doc["curve"]
        if not isinstance(raw, list) or not raw:
            raise ParseError("curve", "expected a non-empty list of coefficient tensors")
        curve = ProductCurve(tuple(
            decode_array(c, (n, n, n), f"curve[{m}]", cx) for m, c in enumerate(raw)
        ))
    return alg, curve


def _describe(alg, check) -> str:
    names = ", ".join(alg.basis_names[i] for i in check.witness)
    return f"{check.residual:.3g} at ({names})"


def parse_algebra_file(path, tol: float = 1e-12, curve_samples=CURVE_CHECK_SAMPLES) -> LoadedAlgebra:
    """Load and validate an algebra file.

    Axiom failures do not abort the load; they are collected in ``warnings``.

    Raises
    ------
    ParseError
        Malformed JSON or array shapes; the message names the document path.
    SchemaVersionError
        Unknown ``schemaVersion``.
    """
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError("$", f"invalid JSON ({exc})") from None
    alg, curve = document_to_algebra(doc)
    report = alg.validate(tol)
    warnings = [f"product {name}: {_describe(alg, c)}" for name, c in report.failures().items()]
    if curve is not None:
        for h in curve_samples:
            rep = check_star_axioms(alg, curve_eval(curve, h), tol)
            for name, c in rep.failures().items():
                warnings.append(f"curve at h={h:g} {name}: {_describe(alg, c)}")
    return LoadedAlgebra(alg, curve, report, warnings)


def json_number(x):
    """Finite floats pass through; NaN and infinities become strings."""
    x = float(x)
    return x if math.isfinite(x) else repr(x)


def trajectory_to_document(record, n: int, is_complex: bool, report: Optional[dict] = None) -> dict:
    from .constraints import coords_to_product

    samples = []
    for s in record.samples:
        samples.append({
            "h": json_number(s.h),
            "x": encode_array(coords_to_product(s.x, n, is_complex), is_complex),
            "v": encode_array(coords_to_product(s.v, n, is_complex), is_complex),
            "constraintDrift": json_number(s.constraint_drift),
            "multiplierNorm": json_number(s.multiplier_norm),
        })
    doc = {
        "schemaVersion": SCHEMA_VERSION,
        "kind": "trajectory",
        "dim": n,
        "field": "complex" if is_complex else "real",
        "status": record.status,
        "steps": record.steps,
        "samples": samples,
    }
    if report is not None:
        doc["report"] = report
    return doc


def read_trajectory_document(doc: dict):
    from .constraints import product_to_coords
    from .geodesic import TrajectoryRecord, TrajectorySample

    _check_version(doc)
    if doc.get("kind") != "trajectory":
        raise ParseError("kind", "expected 'trajectory'")
    n = _require(doc, "dim", int)
    cx = doc.get("field") == "complex"
    rec = TrajectoryRecord(status=doc.get("status", "completed"), steps=doc.get("steps", 0))
    for i, s in enumerate(_require(doc, "samples", list)):
        x = product_to_coords(decode_array(s["x"], (n, n, n), f"samples[{i}].x", cx))
        v = product_to_coords(decode_array(s["v"], (n, n, n), f"samples[{i}].v", cx))
        rec.samples.append(TrajectorySample(float(s["h"]), x, v, float(s["constraintDrift"]),
                                            float(s["multiplierNorm"])))
    return rec


@dataclass
class Verdict:
    name: str
    value: float
    threshold: float
    comparison: str = "<"

    @property
    def passed(self) -> bool:
        if self.comparison == "<":
            return self.value < self.threshold
        if self.comparison == ">":
            return self.value > self.threshold
        if self.comparison == "==":
            return self.value == self.threshold
        raise ValueError(f"unknown comparison {self.comparison!r}")

    def to_dict(self) -> dict:
        return {"name": self.name, "value": json_number(self.value),
                "threshold": json_number(self.threshold),
                "comparison": self.comparison, "passed": self.passed}


@dataclass
class RunReport:
    command: list
    config: dict
    results: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def deterministic_section(self) -> dict:
        return {
            "schemaVersion": SCHEMA_VERSION,
            "kind": "report",
            "command": list(self.command),
            "config": self.config,
            "results": self.results,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "passed": self.passed,
        }

    def to_document(self) -> dict:
        doc = self.deterministic_section()
        doc["timings"] = {k: round(float(v), 6) for k, v in self.timings.items()}
        return doc

    def deterministic_json(self) -> str:
        return dumps(self.deterministic_section())

    def write(self, path) -> None:
        Path(path).write_text(dumps(self.to_document()))


def recompute_verdicts(doc: dict) -> bool:
    """Re-derive each stored verdict from its stored value and threshold."""
    for v in doc["verdicts"]:
        verdict = Verdict(v["name"], float(v["value"]), float(v["threshold"]), v["comparison"])
        if verdict.passed != v["passed"]:
            return False
    return all(v["passed"] for v in doc["verdicts"]) == doc["passed"]
