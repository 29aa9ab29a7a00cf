"""Claimed-vs-computed tables, findings, and the text/CSV/JSON renderers."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from .channels import ChannelSpec, build_channel
from .claims import CLAIMS, CLAIMS_VERSION, TABLE_IDS, Claim
from .measurement import GramReport
from .measures import (
    DEFAULT_SEED,
    DEFAULT_STARTS,
    concurrence,
    groverian,
    l1_coherence,
    marginal,
    negativity,
    p_max_optimize,
    tangle,
)

SCHEMA_VERSION = "1"
CSV_HEADER = ("table", "row", "column", "computed", "claimed", "delta")
FINDING_KINDS = ("gram-violation", "pmax-mismatch", "tangle-subscript")
SUBSCRIPT_TOL = 1e-9


@dataclass(frozen=True)
class Cell:
    row: str
    column: str
    computed: float
    claimed: float | None
    delta: float | None
    tol: float | None
    ok: bool | None
    source: str | None

    def to_dict(self) -> dict:
        return {
            "row": self.row, "column": self.column, "computed": self.computed,
            "claimed": self.claimed, "delta": self.delta, "tol": self.tol,
            "ok": self.ok, "source": self.source,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Cell":
        return cls(**d)


@dataclass(frozen=True)
class TableArtifact:
    table_id: str
    cells: tuple[Cell, ...]
    claims_version: str = CLAIMS_VERSION

    def cell(self, row: str, column: str) -> Cell:
        for c in self.cells:
            if (c.row, c.column) == (row, column):
                return c
        raise KeyError((row, column))

    @property
    def failures(self) -> list[Cell]:
        return [c for c in self.cells if c.ok is False]

    def to_dict(self) -> dict:
        return {
            "table_id": self.table_id,
            "claims_version": self.claims_version,
            "cells": [c.to_dict() for c in self.cells],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TableArtifact":
        return cls(d["table_id"], tuple(Cell.from_dict(c) for c in d["cells"]), d["claims_version"])


@dataclass(frozen=True)
class Finding:
    kind: str
    subject: str
    details: dict

    def __post_init__(self):
        if self.kind not in FINDING_KINDS:
            raise ValueError(f"unknown finding kind {self.kind!r}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "subject": self.subject, "details": self.details}

    @classmethod
    def from_dict(cls, d: dict) -> "Finding":
        return cls(d["kind"], d["subject"], d["details"])


def gram_finding(subject: str, report: GramReport) -> Finding:
    a, b, z = report.worst_pair()
    return Finding("gram-violation", subject, {
        "max_off_diagonal": report.max_off_diagonal,
        "worst_pair": [a, b],
        "overlap": [z.real, z.imag],
    })


def pmax_finding(subject: str, computed: float, claimed: float, oracle: float | None = None) -> Finding:
    details = {"computed": computed, "claimed": claimed, "delta": abs(computed - claimed)}
    if oracle is not None:
        details["oracle"] = oracle
    return Finding("pmax-mismatch", subject, details)


def subscript_finding(subject: str, residual: float, variant: float) -> Finding | None:
    """Flag states where C^2_BC in place of C^2_AC changes the residual tangle."""
    if abs(residual - variant) <= SUBSCRIPT_TOL:
        return None
    return Finding("tangle-subscript", subject, {
        "tau_residual_ac": residual,
        "tau_printed_bc": variant,
        "delta": abs(residual - variant),
    })


class _Evaluator:
    """Computes claimed quantities once per (state, quantity, marginal)."""

    def __init__(self, starts: int, seed: int):
        self.starts, self.seed = starts, seed
        self._cache: dict = {}

    def _state(self, spec: ChannelSpec):
        key = ("state", spec)
        if key not in self._cache:
            self._cache[key] = build_channel(spec).state
        return self._cache[key]

    def value(self, spec: ChannelSpec, quantity: str, m: str = ""):
        key = (spec, quantity, m)
        if key in self._cache:
            return self._cache[key]
        state = self._state(spec)
        if quantity == "concurrence":
            v = concurrence(marginal(state, m))
        elif quantity == "negativity":
            v = negativity(marginal(state, m))
        elif quantity == "coherence":
            v = l1_coherence(marginal(state, m))
        elif quantity == "tangle":
            v = tangle(state)
        elif quantity == "p_max":
            v = p_max_optimize(state, self.starts, self.seed).p
        elif quantity == "groverian":
            v = groverian(self.value(spec, "p_max"))
        else:
            raise ValueError(f"unknown quantity {quantity!r}")
        self._cache[key] = v
        return v


def _evaluate(claim: Claim, ev: _Evaluator) -> Cell:
    if claim.quantity == "tangle":
        values = [ev.value(claim.spec, "tangle").tau_poly]
    elif claim.marginals:
        values = [ev.value(claim.spec, claim.quantity, m) for m in claim.marginals]
    else:
        values = [ev.value(claim.spec, claim.quantity)]
    # a cell standing for several marginals reports the one furthest off
    computed = max(values, key=lambda v: abs(v - claim.value))
    delta = abs(computed - claim.value)
    return Cell(claim.row, claim.column, float(computed), claim.value, delta, claim.tol, delta <= claim.tol, claim.source)


def build_table(
    table_id: str,
    starts: int = DEFAULT_STARTS,
    seed: int = DEFAULT_SEED,
) -> tuple[TableArtifact, list[Finding]]:
    if table_id not in CLAIMS:
        raise ValueError(f"unknown table id {table_id!r} (known: {', '.join(TABLE_IDS)})")
    ev = _Evaluator(starts, seed)
    claims = CLAIMS[table_id]
    cells = tuple(_evaluate(c, ev) for c in claims)
    findings = []
    if table_id == "X":
        for claim, cell in zip(claims, cells):
            if claim.column == "P_max" and not cell.ok:
                findings.append(pmax_finding(claim.row, cell.computed, claim.value))
            if claim.column == "tau":
                t = ev.value(claim.spec, "tangle")
                f = subscript_finding(claim.row, t.tau_residual, t.tau_printed_variant)
                if f is not None:
                    findings.append(f)
    return TableArtifact(table_id, cells), findings


# ---- rendering ------------------------------------------------------------

def envelope(command: str, config: dict, results, findings: list[Finding], version: str) -> dict:
    return {
        "command": command,
        "config": config,
        "results": results,
        "findings": [f.to_dict() for f in findings],
        "version": version,
    }


def dumps_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _num(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dumps_csv(rows: list[tuple]) -> str:
    """Rows are (table, row, column, computed, claimed, delta)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([_num(v) for v in r])
    return buf.getvalue()


def table_csv_rows(artifact: TableArtifact) -> list[tuple]:
    return [(artifact.table_id, c.row, c.column, c.computed, c.claimed, c.delta) for c in artifact.cells]


def _fmt(v, digits: int = 6) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.{digits}g}"
    return str(v)


def align(headers: list[str], rows: list[list]) -> str:
    text = [[_fmt(v) for v in r] for r in rows]
    widths = [max(len(h), *(len(r[i]) for r in text)) if text else len(h) for i, h in enumerate(headers)]
    line = lambda cells: "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    out = [line(headers), line(["-" * w for w in widths])]
    out += [line(r) for r in text]
    return "\n".join(out) + "\n"


def table_text(artifact: TableArtifact) -> str:
    rows = [[c.row, c.column, c.computed, c.claimed, c.delta, "ok" if c.ok else "MISMATCH"] for c in artifact.cells]
    head = f"Table {artifact.table_id} (claims v{artifact.claims_version})\n"
    return head + align(["row", "column", "computed", "claimed", "delta", "status"], rows)


def findings_text(findings: list[Finding]) -> str:
    if not findings:
        return ""
    lines = ["", "findings:"]
    for f in findings:
        detail = ", ".join(f"{k}={_fmt(v) if not isinstance(v, list) else v}" for k, v in sorted(f.details.items()))
        lines.append(f"  [{f.kind}] {f.subject}: {detail}")
    return "\n".join(lines) + "\n"
