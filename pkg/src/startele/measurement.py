"""Sender-side outcome sets: construction, orthonormality audit, measurement."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import ChannelSpec, Family
from .tensor import ATOL, DimensionError, PureState

ORTHONORMAL_TOL = 1e-10
COMPLETION_CUTOFF = 1e-8


class NotOrthonormalError(ValueError):
    """The outcome set cannot be used as a projective measurement."""

    def __init__(self, report: "GramReport", message: str = "outcome set is not orthonormal"):
        super().__init__(f"{message} (max off-diagonal {report.max_off_diagonal:.6g})")
        self.report = report


@dataclass(frozen=True, eq=False)
class OutcomeSet:
    labels: tuple[str, ...]
    states: tuple[PureState, ...]
    declared_channel: ChannelSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "states", tuple(self.states))
        if len(self.labels) != len(self.states):
            raise ValueError("labels and states differ in length")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("outcome labels must be unique")
        if not self.states:
            raise ValueError("outcome set is empty")
        if len({s.dim for s in self.states}) != 1:
            raise DimensionError("outcome states differ in size")

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, label: str) -> PureState:
        return self.states[self.labels.index(label)]

    def matrix(self) -> np.ndarray:
        """Outcome states as rows."""
        return np.array([s.amplitudes for s in self.states])


@dataclass(frozen=True, eq=False)
class GramReport:
    gram: np.ndarray
    labels: tuple[str, ...]
    max_off_diagonal: float
    max_norm_deviation: float
    is_orthonormal: bool

    def worst_pair(self) -> tuple[str, str, complex]:
        g = np.abs(self.gram - np.diag(np.diag(self.gram)))
        i, j = np.unravel_index(int(np.argmax(g)), g.shape)
        i, j = sorted((int(i), int(j)))
        return self.labels[i], self.labels[j], complex(self.gram[i, j])

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "gram": [[[z.real, z.imag] for z in row] for row in self.gram.tolist()],
            "max_off_diagonal": self.max_off_diagonal,
            "max_norm_deviation": self.max_norm_deviation,
            "is_orthonormal": self.is_orthonormal,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GramReport":
        gram = np.array([[complex(re, im) for re, im in row] for row in d["gram"]])
        return cls(gram, tuple(d["labels"]), d["max_off_diagonal"], d["max_norm_deviation"], d["is_orthonormal"])

    def __eq__(self, other):
        if not isinstance(other, GramReport):
            return NotImplemented
        return (
            self.labels == other.labels
            and np.array_equal(self.gram, other.gram)
            and (self.max_off_diagonal, self.max_norm_deviation, self.is_orthonormal)
            == (other.max_off_diagonal, other.max_norm_deviation, other.is_orthonormal)
        )


@dataclass(frozen=True, eq=False)
class MeasurementResult:
    labels: tuple[str, ...]
    probabilities: tuple[float, ...]
    # None where the outcome has zero probability
    conditional_states: tuple[PureState | None, ...]
    residual_probability: float

    def probability(self, label: str) -> float:
        return self.probabilities[self.labels.index(label)]

    def conditional(self, label: str) -> PureState | None:
        return self.conditional_states[self.labels.index(label)]


def _set(spec: ChannelSpec, rows: list[tuple[str, dict[str, complex]]], scale: float) -> OutcomeSet:
    states = [PureState.from_kets({k: v * scale for k, v in kets.items()}, normalize=False) for _, kets in rows]
    return OutcomeSet(tuple(label for label, _ in rows), tuple(states), spec)


_R2 = math.sqrt(2)


def _ghz(spec):
    return _set(spec, [
        ("ghz1+", {"000": 1, "111": 1}),
        ("ghz1-", {"000": 1, "111": -1}),
        ("ghz2+", {"100": 1, "011": 1}),
        ("ghz2-", {"100": 1, "011": -1}),
    ], 1 / _R2)


def _w1(spec):
    return _set(spec, [
        ("w1+", {"010": 1, "001": 1, "100": _R2}),
        ("w1-", {"010": 1, "001": 1, "100": -_R2}),
        ("w2+", {"101": 1, "110": 1, "000": _R2}),
        ("w2-", {"101": 1, "110": 1, "000": -_R2}),
    ], 0.5)


def _w1_tilde(spec):
    return _set(spec, [
        ("wt1+", {"001": 1, "010": 1, "111": _R2}),
        ("wt1-", {"001": 1, "010": 1, "111": -_R2}),
        ("wt2+", {"101": 1, "110": 1, "011": _R2}),
        ("wt2-", {"101": 1, "110": 1, "011": -_R2}),
    ], 0.5)


def _star1(spec):
    return _set(spec, [
        ("s1+", {"000": 1, "010": 1, "110": 1, "111": -1}),
        ("s1-", {"000": 1, "010": 1, "110": -1, "111": 1}),
        ("s2+", {"100": 1, "110": 1, "010": 1, "011": -1}),
        ("s2-", {"100": 1, "110": 1, "010": -1, "011": 1}),
    ], 0.5)


def _wn(spec):
    n = spec.n
    b = math.sqrt(n) * np.exp(1j * spec.gamma)
    c = math.sqrt(n + 1) * np.exp(1j * spec.delta)
    return _set(spec, [
        ("wx+", {"010": 1, "001": b, "100": c}),
        ("wx-", {"010": 1, "001": b, "100": -c}),
        ("wy+", {"110": 1, "101": b, "000": c}),
        ("wy-", {"110": 1, "101": b, "000": -c}),
    ], 1 / math.sqrt(2 + 2 * n))


def _wn_tilde(spec):
    n = spec.n
    b = math.sqrt(n) * np.exp(-1j * spec.gamma)
    c = math.sqrt(n + 1) * np.exp(-1j * spec.delta)
    return _set(spec, [
        ("wtx+", {"001": 1, "010": b, "111": c}),
        ("wtx-", {"001": 1, "010": b, "111": -c}),
        ("wty+", {"101": 1, "110": b, "011": c}),
        ("wty-", {"101": 1, "110": b, "011": -c}),
    ], 1 / math.sqrt(2 + 2 * n))


def _union(spec, a: OutcomeSet, b: OutcomeSet) -> OutcomeSet:
    return OutcomeSet(a.labels + b.labels, a.states + b.states, spec)


def build_outcome_set(channel: ChannelSpec) -> OutcomeSet:
    fam = channel.family
    if fam is Family.GHZ:
        return _ghz(channel)
    if fam is Family.W1:
        return _w1(channel)
    if fam is Family.W1_TILDE:
        return _w1_tilde(channel)
    if fam is Family.STAR1:
        return _star1(channel)
    if fam is Family.WN:
        return _wn(channel)
    if fam is Family.WN_TILDE:
        return _wn_tilde(channel)
    if fam is Family.S_WWTILDE:
        return _union(channel, _w1(channel), _w1_tilde(channel))
    if fam is Family.WN_WNTILDE:
        return _union(channel, _wn(channel), _wn_tilde(channel))
    raise ValueError(f"no measurement basis is declared for channel {fam.value!r}")


def has_outcome_set(channel: ChannelSpec) -> bool:
    try:
        build_outcome_set(channel)
    except ValueError:
        return False
    return True


def gram_report(outcomes: OutcomeSet, tol: float = ORTHONORMAL_TOL) -> GramReport:
    m = outcomes.matrix()
    gram = m.conj() @ m.T
    diag = np.diag(gram)
    off = np.abs(gram - np.diag(diag))
    max_off = float(off.max()) if off.size else 0.0
    norm_dev = float(np.max(np.abs(diag.real - 1.0)))
    return GramReport(
        gram=gram,
        labels=outcomes.labels,
        max_off_diagonal=max_off,
        max_norm_deviation=norm_dev,
        is_orthonormal=float(np.max(np.abs(gram - np.eye(len(outcomes))))) < tol,
    )


def complete_basis(outcomes: OutcomeSet, tol: float = ORTHONORMAL_TOL) -> OutcomeSet:
    """Extend an orthonormal set to a full basis with labels aux-1, aux-2, ...

    Computational basis vectors are orthogonalized against the set in index
    order (two Gram-Schmidt passes); residuals shorter than 1e-8 are dropped.
    """
    report = gram_report(outcomes, tol)
    if not report.is_orthonormal:
        raise NotOrthonormalError(report, "cannot complete a non-orthonormal set")
    dim = outcomes.states[0].dim
    basis = [s.amplitudes for s in outcomes.states]
    added = []
    for i in range(dim):
        if len(basis) == dim:
            break
        v = np.zeros(dim, dtype=complex)
        v[i] = 1.0
        for _ in range(2):
            for b in basis:
                v = v - np.vdot(b, v) * b
        norm = np.linalg.norm(v)
        if norm < COMPLETION_CUTOFF:
            continue
        v = v / norm
        basis.append(v)
        added.append(PureState(v))
    labels = outcomes.labels + tuple(f"aux-{k + 1}" for k in range(len(added)))
    return OutcomeSet(labels, outcomes.states + tuple(added), outcomes.declared_channel)


def raw_projections(joint: PureState, outcomes: OutcomeSet) -> np.ndarray:
    """Rows <b| (x) 1 |joint> for each outcome b on the leading sender qubits."""
    sender = outcomes.states[0].num_qubits
    if joint.num_qubits != sender + 1:
        raise DimensionError(f"joint state must have {sender + 1} qubits")
    return outcomes.matrix().conj() @ joint.amplitudes.reshape(2**sender, 2)


def projective_measure(joint: PureState, basis: OutcomeSet, tol: float = ORTHONORMAL_TOL) -> MeasurementResult:
    """Born-rule measurement of the sender's qubits (all but the last)."""
    report = gram_report(basis, tol)
    if not report.is_orthonormal:
        raise NotOrthonormalError(report)
    proj = raw_projections(joint, basis)
    probs = np.sum(np.abs(proj) ** 2, axis=1)
    conditional = tuple(
        PureState(row / math.sqrt(p)) if p > ATOL**2 else None
        for row, p in zip(proj, probs)
    )
    return MeasurementResult(
        labels=basis.labels,
        probabilities=tuple(float(p) for p in probs),
        conditional_states=conditional,
        residual_probability=float(1.0 - probs.sum()),
    )
