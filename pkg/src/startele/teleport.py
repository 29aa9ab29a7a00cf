"""Teleportation protocol runner, correction tables and the P_max audit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import ChannelSpec, Family, build_channel
from .measurement import (
    ORTHONORMAL_TOL,
    GramReport,
    NotOrthonormalError,
    OutcomeSet,
    build_outcome_set,
    complete_basis,
    gram_report,
    projective_measure,
    raw_projections,
)
from .measures import DEFAULT_RESOLUTION, DEFAULT_SEED, DEFAULT_STARTS, groverian, p_max_optimize, p_max_oracle
from .tensor import ATOL, PureState, fidelity_pure, tensor_product

DEFAULT_INPUT_SEED = 20240
PERFECT_TOL = 1e-9
FIRE_TOL = 1e-12
DERIVE_TOL = 1e-10
ORACLE_AGREEMENT_TOL = 2e-3
JUNG_TOL = 1e-6

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
PHASES = (1, -1, 1j, -1j)
_PHASE_TEXT = {1: "", -1: "-", 1j: "i", -1j: "-i"}


class MissingCorrectionError(KeyError):
    pass


class OracleDisagreement(RuntimeError):
    pass


@dataclass(frozen=True)
class InputQubit:
    alpha: complex
    beta: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1) > ATOL:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1")

    @classmethod
    def normalized(cls, alpha: complex, beta: complex) -> "InputQubit":
        norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        if norm < ATOL:
            raise ValueError("alpha and beta are both zero")
        return cls(alpha / norm, beta / norm)

    @property
    def state(self) -> PureState:
        return PureState(np.array([self.alpha, self.beta]))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta])

    def to_dict(self) -> dict:
        return {"alpha": [self.alpha.real, self.alpha.imag], "beta": [self.beta.real, self.beta.imag]}

    @classmethod
    def from_dict(cls, d: dict) -> "InputQubit":
        return cls(complex(*d["alpha"]), complex(*d["beta"]))


def haar_inputs(count: int, seed: int = DEFAULT_INPUT_SEED) -> list[InputQubit]:
    """``count`` Haar-random qubits from a fixed seed."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(count, 2)) + 1j * rng.normal(size=(count, 2))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return [InputQubit(a, b) for a, b in v]


@dataclass(frozen=True)
class Correction:
    pauli: str
    phase: complex = 1

    def __post_init__(self):
        if self.pauli not in PAULI:
            raise ValueError(f"unknown Pauli letter {self.pauli!r}")
        if complex(self.phase) not in PHASES:
            raise ValueError(f"phase must be one of +-1, +-i, got {self.phase!r}")
        object.__setattr__(self, "phase", complex(self.phase))

    @property
    def matrix(self) -> np.ndarray:
        return self.phase * PAULI[self.pauli]

    @classmethod
    def parse(cls, text: str) -> "Correction":
        """Parse the gate names used in the tables: I, Z, X, iY, -iY, -Z."""
        t = text.strip()
        for phase, prefix in sorted(_PHASE_TEXT.items(), key=lambda kv: -len(kv[1])):
            if prefix and t.startswith(prefix) and t[len(prefix):] in PAULI:
                return cls(t[len(prefix):], phase)
        return cls(t, 1)

    def __str__(self) -> str:
        return _PHASE_TEXT[self.phase] + self.pauli


@dataclass(frozen=True)
class CorrectionTable:
    entries: dict[str, Correction]

    def __getitem__(self, label: str) -> Correction:
        return self.entries[label]

    def __contains__(self, label: str) -> bool:
        return label in self.entries

    def to_dict(self) -> dict:
        return {k: str(v) for k, v in self.entries.items()}

    @classmethod
    def from_dict(cls, d: dict) -> "CorrectionTable":
        return cls({k: Correction.parse(v) for k, v in d.items()})


# "What Bob gets" columns, as the linear map (alpha, beta) -> Bob's qubit
_BOB = {
    "a0+b1": np.array([[1, 0], [0, 1]]),
    "a0-b1": np.array([[1, 0], [0, -1]]),
    "a1+b0": np.array([[0, 1], [1, 0]]),
    "b0-a1": np.array([[0, 1], [-1, 0]]),
    "a1-b0": np.array([[0, -1], [1, 0]]),
    "-a0+b1": np.array([[-1, 0], [0, 1]]),
}

_TABLE_I = [("ghz1+", "a0+b1", "I"), ("ghz1-", "a0-b1", "Z"), ("ghz2+", "a1+b0", "X"), ("ghz2-", "b0-a1", "iY")]
_TABLE_II = [("w1+", "a0+b1", "I"), ("w1-", "a0-b1", "Z"), ("w2+", "a1+b0", "X"), ("w2-", "b0-a1", "iY")]
_TABLE_III = [("wt1+", "a1+b0", "X"), ("wt1-", "a1-b0", "-iY"), ("wt2+", "a0+b1", "I"), ("wt2-", "-a0+b1", "-Z")]
_TABLE_IV = [("s1+", "a0+b1", "I"), ("s1-", "a0-b1", "Z"), ("s2+", "a1+b0", "X"), ("s2-", "b0-a1", "iY")]
_TABLE_VI = [("wx+", "a0+b1", "I"), ("wx-", "a0-b1", "Z"), ("wy+", "a1+b0", "X"), ("wy-", "b0-a1", "iY")]
_TABLE_VII = [("wtx+", "a1+b0", "X"), ("wtx-", "a1-b0", "-iY"), ("wty+", "a0+b1", "I"), ("wty-", "-a0+b1", "-Z")]

CORRECTION_TABLES: dict[Family, tuple[str, list[tuple[str, str, str]]]] = {
    Family.GHZ: ("I", _TABLE_I),
    Family.W1: ("II", _TABLE_II),
    Family.W1_TILDE: ("III", _TABLE_III),
    Family.STAR1: ("IV", _TABLE_IV),
    Family.S_WWTILDE: ("V", _TABLE_II + _TABLE_III),
    Family.WN: ("VI", _TABLE_VI),
    Family.WN_TILDE: ("VII", _TABLE_VII),
    Family.WN_WNTILDE: ("VIII", _TABLE_VI + _TABLE_VII),
}


def _table_rows(channel: ChannelSpec):
    try:
        return CORRECTION_TABLES[channel.family][1]
    except KeyError:
        raise ValueError(f"no correction table is given for channel {channel.id!r}") from None


def paper_correction_table(channel: ChannelSpec) -> CorrectionTable:
    return CorrectionTable({label: Correction.parse(gate) for label, _, gate in _table_rows(channel)})


def decomposition_residual(channel: ChannelSpec, qubit: InputQubit) -> float:
    """Largest entrywise gap between the joint state and its expansion.

    The expansion is rebuilt from the outcome states and the tabulated
    receiver states: prefactor * sum_b |b> (x) K_b (alpha, beta).
    """
    rows = _table_rows(channel)
    outcomes = build_outcome_set(channel)
    joint = tensor_product(qubit.state, build_channel(channel).state)
    prefactor = 0.5 if len(rows) == 4 else 1 / (2 * math.sqrt(2))
    rhs = np.zeros(joint.dim, dtype=complex)
    for label, bob, _ in rows:
        rhs += prefactor * np.kron(outcomes[label].amplitudes, _BOB[bob] @ qubit.vector)
    return float(np.max(np.abs(rhs - joint.amplitudes)))


@dataclass(frozen=True)
class OutcomeRow:
    label: str
    # None in analysis mode: the outcome set carries no Born-rule statistics
    probability: float | None
    fidelity: float | None
    correction: str

    def to_dict(self) -> dict:
        return {"label": self.label, "probability": self.probability, "fidelity": self.fidelity,
                "correction": self.correction}

    @classmethod
    def from_dict(cls, d: dict) -> "OutcomeRow":
        return cls(**d)


@dataclass(frozen=True)
class ProtocolReport:
    channel: ChannelSpec
    input: InputQubit
    mode: str
    rows: tuple[OutcomeRow, ...]
    total_probability: float | None
    residual_probability: float | None
    min_fidelity: float
    decomposition_residual: float | None
    gram: GramReport | None = field(default=None, compare=True)

    @property
    def perfect(self) -> bool:
        return (
            self.mode == "projective"
            and abs(self.total_probability - 1) <= PERFECT_TOL
            and abs(self.min_fidelity - 1) <= PERFECT_TOL
        )

    def to_dict(self) -> dict:
        return {
            "channel": self.channel.to_dict(),
            "input": self.input.to_dict(),
            "mode": self.mode,
            "rows": [r.to_dict() for r in self.rows],
            "total_probability": self.total_probability,
            "residual_probability": self.residual_probability,
            "min_fidelity": self.min_fidelity,
            "decomposition_residual": self.decomposition_residual,
            "perfect": self.perfect,
            "gram": self.gram.to_dict() if self.gram is not None else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProtocolReport":
        return cls(
            channel=ChannelSpec.from_dict(d["channel"]),
            input=InputQubit.from_dict(d["input"]),
            mode=d["mode"],
            rows=tuple(OutcomeRow.from_dict(r) for r in d["rows"]),
            total_probability=d["total_probability"],
            residual_probability=d["residual_probability"],
            min_fidelity=d["min_fidelity"],
            decomposition_residual=d["decomposition_residual"],
            gram=GramReport.from_dict(d["gram"]) if d["gram"] is not None else None,
        )


def _corrected_fidelity(bob: np.ndarray, correction: Correction, qubit: InputQubit) -> float:
    return fidelity_pure(PureState.normalized(correction.matrix @ bob), qubit.state)


def run_protocol(
    channel: ChannelSpec,
    qubit: InputQubit,
    corrections: CorrectionTable | None = None,
    basis: OutcomeSet | None = None,
    tol: float = ORTHONORMAL_TOL,
) -> ProtocolReport:
    """Teleport ``qubit`` through ``channel`` and score every outcome.

    Orthonormal outcome sets are completed to a full basis and measured
    projectively.  Otherwise the run switches to analysis mode: Bob's state
    for each outcome is the renormalized raw projection, probabilities are
    withheld, and the report can never be perfect.
    """
    outcomes = basis if basis is not None else build_outcome_set(channel)
    if corrections is None:
        corrections = paper_correction_table(channel)
    joint = tensor_product(qubit.state, build_channel(channel).state)
    residual = None
    if channel.family in CORRECTION_TABLES and basis is None:
        residual = decomposition_residual(channel, qubit)
    report = gram_report(outcomes, tol)
    rows = []

    if report.is_orthonormal:
        result = projective_measure(joint, complete_basis(outcomes, tol), tol)
        for label, p, bob in zip(result.labels, result.probabilities, result.conditional_states):
            declared = label in outcomes.labels
            if p <= FIRE_TOL:
                if declared:
                    rows.append(OutcomeRow(label, p, None, str(corrections.entries.get(label, "?"))))
                continue
            if label not in corrections:
                raise MissingCorrectionError(f"outcome {label!r} fired (p={p:.3g}) but has no correction")
            fid = _corrected_fidelity(bob.amplitudes, corrections[label], qubit)
            rows.append(OutcomeRow(label, p, fid, str(corrections[label])))
        total = sum(r.probability for r in rows if r.label in outcomes.labels)
        mode, gram, resid_p = "projective", None, 1.0 - total
    else:
        for label, proj in zip(outcomes.labels, raw_projections(joint, outcomes)):
            if np.linalg.norm(proj) <= ATOL:
                rows.append(OutcomeRow(label, None, None, str(corrections.entries.get(label, "?"))))
                continue
            if label not in corrections:
                raise MissingCorrectionError(f"outcome {label!r} has no correction")
            fid = _corrected_fidelity(proj, corrections[label], qubit)
            rows.append(OutcomeRow(label, None, fid, str(corrections[label])))
        mode, gram, total, resid_p = "analysis", report, None, None

    fids = [r.fidelity for r in rows if r.fidelity is not None]
    return ProtocolReport(
        channel=channel,
        input=qubit,
        mode=mode,
        rows=tuple(rows),
        total_probability=total,
        residual_probability=resid_p,
        min_fidelity=min(fids) if fids else 0.0,
        decomposition_residual=residual,
        gram=gram,
    )


@dataclass(frozen=True)
class DerivedCorrections:
    channel: ChannelSpec
    # None marks an outcome for which no candidate reaches fidelity 1
    entries: dict[str, Correction | None]
    # Pauli letters that succeed (any phase) per outcome
    successes: dict[str, tuple[str, ...]]

    @property
    def failures(self) -> list[str]:
        return [k for k, v in self.entries.items() if v is None]

    def table(self) -> CorrectionTable:
        if self.failures:
            raise ValueError(f"no correction found for {self.failures}")
        return CorrectionTable(dict(self.entries))


def derive_corrections(
    channel: ChannelSpec,
    basis: OutcomeSet | None = None,
    samples: int = 8,
    seed: int = DEFAULT_INPUT_SEED,
) -> DerivedCorrections:
    """Search the 16 (Pauli, phase) candidates for each outcome.

    A candidate succeeds when it restores every one of ``samples`` seeded
    inputs with fidelity 1 (within 1e-10).  The phase recorded is the one
    that restores the input exactly when such a phase exists.
    """
    outcomes = basis if basis is not None else build_outcome_set(channel)
    report = gram_report(outcomes)
    if not report.is_orthonormal:
        raise NotOrthonormalError(report)
    state = build_channel(channel).state
    inputs = haar_inputs(samples, seed)
    bobs = []
    for q in inputs:
        joint = tensor_product(q.state, state)
        bobs.append(projective_measure(joint, outcomes))

    entries: dict[str, Correction | None] = {}
    successes: dict[str, tuple[str, ...]] = {}
    for i, label in enumerate(outcomes.labels):
        ok_letters, chosen = [], None
        for letter in PAULI:
            cands = [Correction(letter, ph) for ph in PHASES]
            good = True
            exact = {c: True for c in cands}
            for q, res in zip(inputs, bobs):
                bob = res.conditional_states[i]
                if bob is None or _corrected_fidelity(bob.amplitudes, cands[0], q) < 1 - DERIVE_TOL:
                    good = False
                    break
                for c in cands:
                    if exact[c] and not np.allclose(c.matrix @ bob.amplitudes, q.vector, rtol=0, atol=1e-9):
                        exact[c] = False
            if good:
                ok_letters.append(letter)
                if chosen is None:
                    chosen = next((c for c in cands if exact[c]), cands[0])
        entries[label] = chosen
        successes[label] = tuple(ok_letters)
    return DerivedCorrections(channel, entries, successes)


def check_corrections(
    channel: ChannelSpec,
    corrections: CorrectionTable,
    samples: int = 8,
    seed: int = DEFAULT_INPUT_SEED,
) -> dict[str, bool]:
    """Per-outcome verdict: does the given correction restore every sampled input?"""
    verdict: dict[str, bool] = {}
    for q in haar_inputs(samples, seed):
        rep = run_protocol(channel, q, corrections)
        for row in rep.rows:
            if row.fidelity is None:
                continue
            verdict[row.label] = verdict.get(row.label, True) and row.fidelity >= 1 - DERIVE_TOL
    return verdict


# P_max values as printed in the tangle/Groverian summary table
CLAIMED_PMAX = {
    Family.GHZ: 0.5,
    Family.W1: 0.5,
    Family.W1_TILDE: 0.5,
    Family.WN: 0.5,
    Family.WN_TILDE: 0.5,
    Family.WN_WNTILDE: 0.25,
    Family.S_WWTILDE: 0.25,
    Family.STAR1: 0.25,
}


@dataclass(frozen=True)
class JungAudit:
    channel: ChannelSpec
    p_max: float
    groverian: float
    oracle_p_max: float
    oracle_gap: float
    perfect_teleport: bool
    protocol_mode: str
    paper_claimed_p_max: float | None

    @property
    def oracle_agrees(self) -> bool:
        return (
            self.p_max >= self.oracle_p_max - JUNG_TOL
            and abs(self.p_max - self.oracle_p_max) <= ORACLE_AGREEMENT_TOL
        )

    @property
    def pmax_mismatch(self) -> bool:
        return self.paper_claimed_p_max is not None and abs(self.p_max - self.paper_claimed_p_max) > JUNG_TOL

    @property
    def is_half(self) -> bool:
        return abs(self.p_max - 0.5) <= JUNG_TOL

    @property
    def contradicts_conjecture(self) -> bool:
        return self.perfect_teleport != self.is_half

    def to_dict(self) -> dict:
        return {
            "channel": self.channel.to_dict(),
            "p_max": self.p_max,
            "groverian": self.groverian,
            "oracle_p_max": self.oracle_p_max,
            "oracle_gap": self.oracle_gap,
            "perfect_teleport": self.perfect_teleport,
            "protocol_mode": self.protocol_mode,
            "paper_claimed_p_max": self.paper_claimed_p_max,
            "oracle_agrees": self.oracle_agrees,
            "pmax_mismatch": self.pmax_mismatch,
            "contradicts_conjecture": self.contradicts_conjecture,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "JungAudit":
        return cls(
            channel=ChannelSpec.from_dict(d["channel"]),
            p_max=d["p_max"],
            groverian=d["groverian"],
            oracle_p_max=d["oracle_p_max"],
            oracle_gap=d["oracle_gap"],
            perfect_teleport=d["perfect_teleport"],
            protocol_mode=d["protocol_mode"],
            paper_claimed_p_max=d["paper_claimed_p_max"],
        )


def jung_audit(
    channel: ChannelSpec,
    starts: int = DEFAULT_STARTS,
    seed: int = DEFAULT_SEED,
    resolution: int = DEFAULT_RESOLUTION,
    samples: int = 16,
    input_seed: int = DEFAULT_INPUT_SEED,
) -> JungAudit:
    state = build_channel(channel).state
    opt = p_max_optimize(state, starts=starts, seed=seed)
    oracle = p_max_oracle(state, resolution)

    if channel.family in CORRECTION_TABLES:
        reports = [run_protocol(channel, q) for q in haar_inputs(samples, input_seed)]
        perfect = all(r.perfect for r in reports)
        mode = reports[0].mode
    else:
        perfect, mode = False, "none"

    return JungAudit(
        channel=channel,
        p_max=opt.p,
        groverian=groverian(opt.p),
        oracle_p_max=oracle.value,
        oracle_gap=oracle.gap,
        perfect_teleport=perfect,
        protocol_mode=mode,
        paper_claimed_p_max=CLAIMED_PMAX.get(channel.family),
    )
