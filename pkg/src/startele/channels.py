"""Catalog of the tripartite channel states and the star-class test."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .tensor import ATOL, PureState, QubitLabel, apply_one_qubit_unitary, partial_trace, qubit_index

TWO_PI = 2 * math.pi
STAR_TOL = 1e-9


class Family(str, Enum):
    GHZ = "ghz"
    W_PROTOTYPE = "w"
    W_TILDE_PROTOTYPE = "w-tilde"
    WN = "wn"
    WN_TILDE = "wn-tilde"
    W1 = "w1"
    W1_TILDE = "w1-tilde"
    W_WTILDE = "w-wtilde"
    WN_WNTILDE = "wn-wntilde"
    S_WWTILDE = "s-wwtilde"
    STAR = "star"
    STAR1 = "star1"


PARAMETRIC = frozenset({Family.WN, Family.WN_TILDE, Family.WN_WNTILDE})
STAR_TYPE = frozenset({Family.STAR, Family.STAR1, Family.S_WWTILDE, Family.WN_WNTILDE})


@dataclass(frozen=True)
class ChannelSpec:
    family: Family
    n: float = 1.0
    gamma: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.family in PARAMETRIC and not self.n > 0:
            raise ValueError(f"{self.family.value} needs n > 0, got {self.n}")
        for name in ("gamma", "delta"):
            phase = getattr(self, name)
            if not 0 <= phase < TWO_PI:
                raise ValueError(f"{name} must lie in [0, 2pi), got {phase}")

    @classmethod
    def parse(cls, channel_id: str, n: float = 1.0, gamma: float = 0.0, delta: float = 0.0) -> "ChannelSpec":
        try:
            family = Family(channel_id.lower())
        except ValueError:
            known = ", ".join(f.value for f in Family)
            raise ValueError(f"unknown channel {channel_id!r} (known: {known})") from None
        if family not in PARAMETRIC:
            n, gamma, delta = 1.0, 0.0, 0.0
        return cls(family, float(n), float(gamma), float(delta))

    @property
    def id(self) -> str:
        return self.family.value

    def to_dict(self) -> dict:
        return {"family": self.family.value, "n": self.n, "gamma": self.gamma, "delta": self.delta}

    @classmethod
    def from_dict(cls, d: dict) -> "ChannelSpec":
        return cls(Family(d["family"]), d["n"], d["gamma"], d["delta"])


@dataclass(frozen=True, eq=False)
class ChannelState:
    spec: ChannelSpec
    state: PureState
    center: int | None = None


@dataclass(frozen=True)
class StarReport:
    center: int
    center_loss_concurrence: float
    peripheral_loss_concurrences: tuple[float, float]
    center_loss_separable: bool
    peripheral_loss_entangled: bool

    @property
    def is_star(self) -> bool:
        return self.center_loss_separable and self.peripheral_loss_entangled


def _kets(d: dict[str, complex]) -> PureState:
    # amplitudes are given already normalized; a 1e-12 slip means a typo
    return PureState.from_kets(d, normalize=False)


def _wn(n: float, gamma: float, delta: float) -> PureState:
    norm = math.sqrt(2 + 2 * n)
    return _kets({
        "100": 1 / norm,
        "010": math.sqrt(n) * np.exp(1j * gamma) / norm,
        "001": math.sqrt(n + 1) * np.exp(1j * delta) / norm,
    })


def _wn_tilde(n: float, gamma: float, delta: float) -> PureState:
    norm = math.sqrt(2 + 2 * n)
    return _kets({
        "011": 1 / norm,
        "101": math.sqrt(n) * np.exp(-1j * gamma) / norm,
        "110": math.sqrt(n + 1) * np.exp(-1j * delta) / norm,
    })


def _wn_wntilde(n: float, gamma: float, delta: float) -> PureState:
    norm = math.sqrt(4 + 4 * n)
    g, d = np.exp(1j * gamma), np.exp(1j * delta)
    return _kets({
        "100": 1 / norm,
        "010": math.sqrt(n) * g / norm,
        "001": math.sqrt(n + 1) * d / norm,
        "011": 1 / norm,
        "101": math.sqrt(n) * g.conjugate() / norm,
        "110": math.sqrt(n + 1) * d.conjugate() / norm,
    })


_R2 = math.sqrt(2)
_R3 = math.sqrt(3)
_R6 = math.sqrt(6)

_FIXED = {
    Family.GHZ: {"000": 1 / _R2, "111": 1 / _R2},
    Family.W_PROTOTYPE: {"001": 1 / _R3, "010": 1 / _R3, "100": 1 / _R3},
    Family.W_TILDE_PROTOTYPE: {"110": 1 / _R3, "101": 1 / _R3, "011": 1 / _R3},
    Family.W1: {"100": 0.5, "010": 0.5, "001": _R2 / 2},
    Family.W1_TILDE: {"011": 0.5, "101": 0.5, "110": _R2 / 2},
    Family.W_WTILDE: {k: 1 / _R6 for k in ("001", "010", "100", "110", "101", "011")},
    Family.S_WWTILDE: {
        "100": 1 / (2 * _R2), "010": 1 / (2 * _R2), "001": 0.5,
        "011": 1 / (2 * _R2), "101": 1 / (2 * _R2), "110": 0.5,
    },
    Family.STAR: {"000": 0.5, "100": 0.5, "101": 0.5, "111": 0.5},
    Family.STAR1: {"000": 0.5, "100": 0.5, "101": 0.5, "111": -0.5},
}


def build_channel(spec: ChannelSpec) -> ChannelState:
    fam = spec.family
    if fam in _FIXED:
        state = _kets(_FIXED[fam])
    elif fam is Family.WN:
        state = _wn(spec.n, spec.gamma, spec.delta)
    elif fam is Family.WN_TILDE:
        state = _wn_tilde(spec.n, spec.gamma, spec.delta)
    elif fam is Family.WN_WNTILDE:
        state = _wn_wntilde(spec.n, spec.gamma, spec.delta)
    else:
        raise ValueError(f"unknown family {fam!r}")
    return ChannelState(spec, state, 2 if fam in STAR_TYPE else None)


_SIGMA_Y = np.array([[0, -1j], [1j, 0]])


def spin_flip(state: PureState, signed: bool = False) -> PureState:
    """Complement every ket bitwise and conjugate its amplitude.

    With ``signed=True`` the textbook sigma_y^{(x)k} |psi*> is returned
    instead, which differs by (-1)^(Hamming weight) and a global i^k.
    """
    flipped = PureState(state.amplitudes[::-1].conj())
    if not signed:
        return flipped
    out = PureState(state.amplitudes.conj())
    for q in range(state.num_qubits):
        out = apply_one_qubit_unitary(out, _SIGMA_Y, q)
    return out


def superpose_equal(a: PureState, b: PureState) -> PureState:
    if a.dim != b.dim:
        raise ValueError("superposed states must have equal qubit counts")
    vec = a.amplitudes + b.amplitudes
    if np.linalg.norm(vec) < ATOL:
        raise ValueError("superposition cancels to the zero vector")
    return PureState.normalized(vec)


def classify_star(ch: ChannelState | PureState, candidate_center: QubitLabel = 2) -> StarReport:
    from .measures import concurrence

    state = ch.state if isinstance(ch, ChannelState) else ch
    if state.num_qubits != 3:
        raise ValueError("star classification needs a 3-qubit state")
    c = qubit_index(candidate_center, 3)
    others = [q for q in range(3) if q != c]
    center_loss = concurrence(partial_trace(state, others))
    peripheral = tuple(
        concurrence(partial_trace(state, [q for q in range(3) if q != p]))
        for p in others
    )
    return StarReport(
        center=c,
        center_loss_concurrence=center_loss,
        peripheral_loss_concurrences=peripheral,
        center_loss_separable=center_loss <= STAR_TOL,
        peripheral_loss_entangled=all(v > STAR_TOL for v in peripheral),
    )
