"""Serializable certificates: a statement, its witness, and the checks run.

Integers inside witnesses are written as decimal strings so that no JSON
consumer can lose precision.  ``digest`` is a sha256 over the canonical
witness encoding; re-checking compares it before replaying any identity.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

SCHEMA = "bscat-cert/1"
ENGINE_VERSION = "0.1.0"

VERIFIED = "VERIFIED"
REFUTED = "REFUTED"
INCOMPLETE = "INCOMPLETE"
MISMATCH = "MISMATCH"

STATEMENTS = {
    "order-p": "order of the Berstein-Schwarz class of Z_m and its q-divisibility",
    "bs-power": "nonvanishing of a cup power of the Berstein-Schwarz class",
    "bs-equal": "Cayley cocycle and connecting-homomorphism class agree",
    "decompose": "decomposition of the Berstein-Schwarz class of Z_pq through phi",
    "ber-nul": "vanishing of u*(beta^(n+1)) on a product of lens spaces",
    "cup-length": "cup-length lower bound on a product of lens spaces",
    "bounds": "lower and upper bounds for the LS-category of a product of lens spaces",
    "essential": "homology pushforward of a fundamental cycle",
    "olum": "Olum homotopy-equivalence congruence for lens spaces",
    "emss": "stable parallelizability congruences for lens spaces",
    "bezout": "Bezout pair k p + l q = 1",
    "diagonal": "verified diagonal approximation",
}


def encode(obj: Any) -> Any:
    """Recursively turn integers (and integer arrays) into decimal strings."""
    if isinstance(obj, np.ndarray):
        return [encode(x) for x in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(x) for x in obj]
    return obj


def decode_ints(obj: Any) -> Any:
    """Inverse of :func:`encode` for nested lists of decimal strings."""
    if isinstance(obj, list):
        return [decode_ints(x) for x in obj]
    if isinstance(obj, str):
        return int(obj)
    return obj


def int_vector(obj) -> np.ndarray:
    from .exactla import exact

    return exact(np.array([int(x) for x in obj], dtype=object))


def digest(witness: dict) -> str:
    blob = json.dumps(witness, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


@dataclass
class Certificate:
    statement_id: str
    parameters: dict
    status: str
    witness: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def check(self, description: str, ok: bool) -> bool:
        self.checks.append((description, bool(ok)))
        return bool(ok)

    @property
    def all_passed(self) -> bool:
        return all(ok for _, ok in self.checks)

    def to_dict(self) -> dict:
        w = encode(self.witness)
        return {
            "schema": SCHEMA,
            "statement_id": self.statement_id,
            "statement": STATEMENTS.get(self.statement_id, ""),
            "parameters": encode(self.parameters),
            "status": self.status,
            "witness": w,
            "digest": digest(w),
            "checks": [{"identity": d, "passed": ok} for d, ok in self.checks],
            "notes": list(self.notes),
            "versions": {"engine": ENGINE_VERSION, "schema": SCHEMA},
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent)

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json(indent=1))


class SchemaError(ValueError):
    """A certificate document does not follow the schema."""


def load(path_or_text: str) -> dict:
    try:
        with open(path_or_text) as fh:
            doc = json.load(fh)
    except (OSError, ValueError):
        try:
            doc = json.loads(path_or_text)
        except ValueError as exc:
            raise SchemaError(f"not a certificate: {exc}") from None
    validate_schema(doc)
    return doc


def validate_schema(doc: Any) -> None:
    if not isinstance(doc, dict):
        raise SchemaError("certificate must be a JSON object")
    for key in ("schema", "statement_id", "parameters", "status", "witness", "digest", "checks"):
        if key not in doc:
            raise SchemaError(f"missing field {key!r}")
    if doc["schema"] != SCHEMA:
        raise SchemaError(f"unknown schema {doc['schema']!r}")
    if doc["status"] not in (VERIFIED, REFUTED, INCOMPLETE):
        raise SchemaError(f"unknown status {doc['status']!r}")
    if not isinstance(doc["witness"], dict) or not isinstance(doc["parameters"], dict):
        raise SchemaError("witness and parameters must be objects")
