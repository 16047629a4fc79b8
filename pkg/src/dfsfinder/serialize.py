"""JSON model and report documents.

Complex numbers are always written as two-element ``[re, im]`` arrays and
matrices as flat row-major lists of such pairs.  Both documents carry a
``schema_version``; parsers accept any minor revision of a known major
version and reject the rest.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from . import __version__
from .config import Tolerances
from .engine import IGC, RESTRICTED, AnalysisReport, DfsRecord
from .errors import DfsError, ModelFileError
from .linalg import Subspace
from .model import DiagonalLindblad, GksDissipator, MasterEquationModel

MODEL_FORMAT = "dfsfinder-model"
REPORT_FORMAT = "dfsfinder-report"
SCHEMA_VERSION = "1.0"
SUPPORTED_MAJOR = 1


def cpair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_pairs(m: np.ndarray) -> list[list[float]]:
    return [cpair(z) for z in np.asarray(m).ravel()]


def _complex(value: Any, where: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in value
    ):
        return complex(value[0], value[1])
    raise ModelFileError(where, f"expected [re, im], got {value!r}")


def _pairs_to_matrix(value: Any, rows: int, cols: int, where: str) -> np.ndarray:
    if not isinstance(value, list):
        raise ModelFileError(where, "expected a list of [re, im] pairs")
    if len(value) != rows * cols:
        raise ModelFileError(where, f"expected {rows * cols} entries, got {len(value)}")
    flat = np.array([_complex(v, f"{where}[{k}]") for k, v in enumerate(value)], dtype=complex)
    if not np.all(np.isfinite(flat)):
        raise ModelFileError(where, "entries must be finite")
    return flat.reshape(rows, cols)


def _check_version(doc: dict, fmt: str, where: str = "schema_version") -> None:
    if doc.get("format") != fmt:
        raise ModelFileError("format", f"expected {fmt!r}, got {doc.get('format')!r}")
    version = doc.get("schema_version")
    if not isinstance(version, str):
        raise ModelFileError(where, "missing or not a string")
    try:
        major = int(version.split(".")[0])
    except ValueError:
        raise ModelFileError(where, f"unparseable version {version!r}") from None
    if major != SUPPORTED_MAJOR:
        raise ModelFileError(where, f"unsupported major version {major} (supported: {SUPPORTED_MAJOR})")


# --- models -------------------------------------------------------------------


def model_to_dict(m: MasterEquationModel, tolerances: dict | None = None) -> dict:
    n = m.dim
    doc: dict[str, Any] = {
        "format": MODEL_FORMAT,
        "schema_version": SCHEMA_VERSION,
        "label": m.label,
        "dim": n,
        "h_eff": matrix_to_pairs(m.h_eff),
    }
    d = m.dissipator
    if isinstance(d, GksDissipator):
        doc["dissipator"] = {
            "gks": {"basis": [matrix_to_pairs(f) for f in d.basis], "A": matrix_to_pairs(d.coeff)}
        }
    else:
        doc["dissipator"] = {
            "diagonal": [{"lambda": rate, "J": matrix_to_pairs(j)} for rate, j in d.terms]
        }
    if m.truncated_fock:
        doc["truncated_fock"] = True
    if tolerances:
        doc["tolerances"] = dict(tolerances)
    return doc


def model_from_dict(doc: Any) -> tuple[MasterEquationModel, dict]:
    """Parse a model document; returns the model and its tolerance overrides."""
    if not isinstance(doc, dict):
        raise ModelFileError("<root>", "expected a JSON object")
    _check_version(doc, MODEL_FORMAT)
    n = doc.get("dim")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ModelFileError("dim", f"expected a positive integer, got {n!r}")
    h = _pairs_to_matrix(doc.get("h_eff"), n, n, "h_eff")
    if np.linalg.norm(h - h.conj().T) > 1e-10 * max(np.linalg.norm(h), 1.0):
        raise ModelFileError("h_eff", "matrix is not Hermitian")
    diss = doc.get("dissipator")
    if not isinstance(diss, dict) or len(diss) != 1:
        raise ModelFileError("dissipator", "expected an object with exactly one of 'gks' or 'diagonal'")
    try:
        if "gks" in diss:
            g = diss["gks"]
            if not isinstance(g, dict):
                raise ModelFileError("dissipator.gks", "expected an object with 'basis' and 'A'")
            basis_doc = g.get("basis")
            if not isinstance(basis_doc, list):
                raise ModelFileError("dissipator.gks.basis", "expected a list of matrices")
            basis = tuple(
                _pairs_to_matrix(f, n, n, f"dissipator.gks.basis[{k}]") for k, f in enumerate(basis_doc)
            )
            k = len(basis)
            a = _pairs_to_matrix(g.get("A"), k, k, "dissipator.gks.A")
            try:
                dissipator = GksDissipator(basis, a)
            except (DfsError, ValueError) as exc:
                raise ModelFileError("dissipator.gks", str(exc)) from None
        elif "diagonal" in diss:
            terms_doc = diss["diagonal"]
            if not isinstance(terms_doc, list):
                raise ModelFileError("dissipator.diagonal", "expected a list of {lambda, J} objects")
            terms = []
            for k, t in enumerate(terms_doc):
                where = f"dissipator.diagonal[{k}]"
                if not isinstance(t, dict):
                    raise ModelFileError(where, "expected an object")
                rate = t.get("lambda")
                if not isinstance(rate, (int, float)) or isinstance(rate, bool) or rate < 0:
                    raise ModelFileError(f"{where}.lambda", f"expected a non-negative number, got {rate!r}")
                terms.append((float(rate), _pairs_to_matrix(t.get("J"), n, n, f"{where}.J")))
            dissipator = DiagonalLindblad.from_terms(terms)
        else:
            raise ModelFileError("dissipator", f"unknown form {next(iter(diss))!r}")
    except ModelFileError:
        raise
    tolerances = doc.get("tolerances") or {}
    if not isinstance(tolerances, dict):
        raise ModelFileError("tolerances", "expected an object")
    try:
        Tolerances.from_mapping(tolerances)
    except (KeyError, ValueError, TypeError) as exc:
        raise ModelFileError("tolerances", str(exc)) from None
    label = doc.get("label", "")
    if not isinstance(label, str):
        raise ModelFileError("label", "expected a string")
    try:
        model = MasterEquationModel(
            h, dissipator, label=label, truncated_fock=bool(doc.get("truncated_fock", False))
        )
    except (DfsError, ValueError) as exc:
        raise ModelFileError("model", str(exc)) from None
    return model, tolerances


def dump_model(m: MasterEquationModel, tolerances: dict | None = None) -> str:
    return json.dumps(model_to_dict(m, tolerances), indent=1)


def load_model(text: str) -> tuple[MasterEquationModel, dict]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"line {exc.lineno}", exc.msg) from None
    return model_from_dict(doc)


# --- reports ------------------------------------------------------------------


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return cpair(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def record_to_dict(rec: DfsRecord) -> dict:
    return {
        "tuple": [cpair(c) for c in rec.eigenvalues],
        "dim": rec.dim,
        "basis": [matrix_to_pairs(v) for v in rec.subspace.vectors()],
        "classification": rec.classification,
        "g": None if rec.gamma_eigenvalue is None else cpair(rec.gamma_eigenvalue),
        "witness": rec.witness,
        "weighted_witness": rec.weighted_witness,
        "unweighted_witness": rec.unweighted_witness,
        "h_ev_restricted": matrix_to_pairs(rec.h_ev_restricted),
    }


def record_from_dict(doc: Any, ambient_dim: int, where: str) -> DfsRecord:
    if not isinstance(doc, dict):
        raise ModelFileError(where, "expected an object")
    cls = doc.get("classification")
    if cls not in (RESTRICTED, IGC):
        raise ModelFileError(f"{where}.classification", f"unknown class {cls!r}")
    tup = doc.get("tuple")
    if not isinstance(tup, list):
        raise ModelFileError(f"{where}.tuple", "expected a list")
    eigenvalues = tuple(_complex(c, f"{where}.tuple[{k}]") for k, c in enumerate(tup))
    basis_doc = doc.get("basis")
    if not isinstance(basis_doc, list) or not basis_doc:
        raise ModelFileError(f"{where}.basis", "expected a non-empty list of vectors")
    vecs = [_pairs_to_matrix(v, ambient_dim, 1, f"{where}.basis[{k}]")[:, 0] for k, v in enumerate(basis_doc)]
    basis = np.column_stack(vecs)
    k = basis.shape[1]
    g = doc.get("g")
    return DfsRecord(
        eigenvalues=eigenvalues,
        subspace=Subspace(basis),
        classification=cls,
        gamma_eigenvalue=None if g is None else _complex(g, f"{where}.g"),
        h_ev_restricted=_pairs_to_matrix(doc.get("h_ev_restricted"), k, k, f"{where}.h_ev_restricted"),
        witness=float(doc.get("witness", 0.0)),
        weighted_witness=float(doc.get("weighted_witness", 0.0)),
        unweighted_witness=float(doc.get("unweighted_witness", 0.0)),
    )


def report_to_dict(report: AnalysisReport, dim: int, verification: dict | None = None) -> dict:
    doc = {
        "format": REPORT_FORMAT,
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "model_label": report.model_label,
        "dim": dim,
        "tolerances": report.tolerances.to_dict(),
        "tuples_examined": report.tuples_examined,
        "records": [record_to_dict(r) for r in report.records],
        "notes": list(report.notes),
        "diagnostics": _jsonable(report.diagnostics),
    }
    if verification is not None:
        doc["verification"] = _jsonable(verification)
    return doc


def report_from_dict(doc: Any) -> tuple[AnalysisReport, int, dict | None]:
    """Parse a report document; returns the report, the ambient dimension and
    the stored verification summary (if any)."""
    if not isinstance(doc, dict):
        raise ModelFileError("<root>", "expected a JSON object")
    _check_version(doc, REPORT_FORMAT)
    dim = doc.get("dim")
    if not isinstance(dim, int) or dim < 1:
        raise ModelFileError("dim", "expected a positive integer")
    recs = doc.get("records")
    if not isinstance(recs, list):
        raise ModelFileError("records", "expected a list")
    try:
        tol = Tolerances.from_mapping(doc.get("tolerances") or {})
    except (KeyError, ValueError, TypeError) as exc:
        raise ModelFileError("tolerances", str(exc)) from None
    records = [record_from_dict(r, dim, f"records[{k}]") for k, r in enumerate(recs)]
    report = AnalysisReport(
        model_label=str(doc.get("model_label", "")),
        records=records,
        tuples_examined=int(doc.get("tuples_examined", len(records))),
        tolerances=tol,
        diagnostics=list(doc.get("diagnostics", [])),
        notes=list(doc.get("notes", [])),
    )
    return report, dim, doc.get("verification")


def dump_report(report: AnalysisReport, dim: int, verification: dict | None = None) -> str:
    return json.dumps(report_to_dict(report, dim, verification), indent=1)


def load_report(text: str) -> tuple[AnalysisReport, int, dict | None]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"line {exc.lineno}", exc.msg) from None
    return report_from_dict(doc)
