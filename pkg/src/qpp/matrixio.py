"""JSON wire format for matrices and machine-readable check reports.

A matrix file carries {rows, cols, data} with data a row-major list of
[re, im] pairs; floats use Python's shortest round-trip representation, so
one read/write normalization pass is byte-idempotent.  Reports bundle the
command, input hashes, tolerances, named checks with residuals and
thresholds, and any output matrices into a single canonical document.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .linalg import CMatrix, Tolerances, as_cmatrix


def matrix_to_payload(m: CMatrix, name: str | None = None) -> dict:
    m = as_cmatrix(m)
    rows, cols = m.shape
    flat = m.reshape(-1)
    payload = {
        "rows": int(rows),
        "cols": int(cols),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }
    if name is not None:
        payload["name"] = name
    return payload


def payload_to_matrix(payload: dict) -> CMatrix:
    try:
        rows = int(payload["rows"])
        cols = int(payload["cols"])
        data = payload["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix payload: {exc}") from exc
    if rows < 0 or cols < 0 or len(data) != rows * cols:
        raise ValueError(
            f"data length {len(data)} does not match {rows}x{cols}"
        )
    out = np.empty(rows * cols, dtype=np.complex128)
    for i, pair in enumerate(data):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ValueError(f"entry {i} is not a [re, im] pair")
        out[i] = complex(float(pair[0]), float(pair[1]))
    m = out.reshape(rows, cols)
    if m.size and not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    return m


def canonical_json(obj) -> str:
    """Stable serialization: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ": "), indent=1) + "\n"


def write_matrix(path, m: CMatrix, name: str | None = None) -> None:
    Path(path).write_text(canonical_json(matrix_to_payload(m, name)))


def read_matrix(path) -> CMatrix:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from exc
    return payload_to_matrix(payload)


def sha256_of_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def sha256_of_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class Check:
    """One named residual comparison; passes when residual <= threshold."""

    name: str
    residual: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.threshold)

    def to_payload(self) -> dict:
        return {
            "name": self.name,
            "residual": float(self.residual),
            "threshold": float(self.threshold),
            "pass": self.passed,
        }


@dataclass
class Report:
    """Aggregated result document for one CLI invocation."""

    command: str
    tolerances: Tolerances
    inputs: list[dict] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    outputs: list[dict] = field(default_factory=list)
    properties: dict = field(default_factory=dict)

    def add_input(self, name: str, path) -> None:
        self.inputs.append({"name": str(name), "sha256": sha256_of_file(path)})

    def check(self, name: str, residual: float, threshold: float) -> Check:
        c = Check(name=name, residual=float(residual), threshold=float(threshold))
        self.checks.append(c)
        return c

    def add_output(self, name: str, m: CMatrix) -> None:
        self.outputs.append(matrix_to_payload(m, name))

    @property
    def verdict(self) -> str:
        return "pass" if all(c.passed for c in self.checks) else "fail"

    def to_payload(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "tolerances": {
                "eq_tol": self.tolerances.eq_tol,
                "rank_rel_tol": self.tolerances.rank_rel_tol,
                "spec_tol": self.tolerances.spec_tol,
            },
            "checks": [c.to_payload() for c in self.checks],
            "outputs": self.outputs,
            "properties": self.properties,
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_payload())
