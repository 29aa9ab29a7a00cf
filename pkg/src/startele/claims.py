"""Published values the tables are checked against, in one place.

Each claim names the state, the quantity, the marginals it covers and the
tolerance it is compared at: 5e-3 for numbers printed to two or three
decimals, 1e-9 for closed forms, 1e-6 for optimizer-backed P_max and G.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channels import ChannelSpec, Family

CLAIMS_VERSION = "1"

ROUNDED = 5e-3
EXACT = 1e-9
OPTIMIZED = 1e-6

N_SWEEP = (1, 2, 3, 5)

R2 = math.sqrt(2)


@dataclass(frozen=True)
class Claim:
    table: str
    row: str
    column: str
    spec: ChannelSpec
    quantity: str
    marginals: tuple[str, ...]
    value: float
    tol: float
    source: str


def _spec(family: Family, n: float = 1.0) -> ChannelSpec:
    return ChannelSpec(family, n)


_IX_STATES = [
    ("W1", _spec(Family.W1), (0.5, 0.71, 0.103, 0.25)),
    ("Star1", _spec(Family.STAR1), (0.0, 0.5, 0.0, 0.232)),
    ("S_ww", _spec(Family.S_WWTILDE), (0.0, 0.5, 0.0, 0.232)),
]


def _table_ix() -> list[Claim]:
    out = []
    for row, spec, (c_ab, c_bc, n_ab, n_bc) in _IX_STATES:
        for col, qty, marg, val in (
            ("C(AB)", "concurrence", ("AB",), c_ab),
            ("C(BC)=C(AC)", "concurrence", ("BC", "AC"), c_bc),
            ("N(AB)", "negativity", ("AB",), n_ab),
            ("N(BC)=N(AC)", "negativity", ("BC", "AC"), n_bc),
        ):
            out.append(Claim("IX", row, col, spec, qty, marg, val, ROUNDED, "Table IX"))
    return out


_COHERENCE = [
    ("Star1", _spec(Family.STAR1), {
        "A": 0.5, "B": 0.5, "C": 0.5, "AB": 1.0, "AC": 1.5, "BC": 1.5, "ABC": 3.0,
    }),
    ("S_ww", _spec(Family.S_WWTILDE), {
        "A": 1 / R2, "B": 1 / R2, "C": 0.5,
        "AB": R2 + 0.5, "AC": R2 + 0.5, "BC": R2 + 0.5, "ABC": 2 + 2 * R2,
    }),
    ("W1", _spec(Family.W1), {
        "A": 0.0, "B": 0.0, "C": 0.0,
        "AB": 0.75, "AC": 0.25 + 1 / R2, "BC": 1 / R2, "ABC": 0.5 + R2,
    }),
]


def _coherence() -> list[Claim]:
    return [
        Claim("coherence", row, f"C_l1({m})", spec, "coherence", (m,), val, EXACT, f"l1-coherence block, {row}")
        for row, spec, cells in _COHERENCE
        for m, val in cells.items()
    ]


def _table_x() -> list[Claim]:
    rows: list[tuple[str, ChannelSpec, float, float]] = [
        ("GHZ", _spec(Family.GHZ), 0.5, 1.0),
        ("W1", _spec(Family.W1), 0.5, 0.0),
        ("W1~", _spec(Family.W1_TILDE), 0.5, 0.0),
    ]
    for n in N_SWEEP:
        rows.append((f"W_n (n={n})", _spec(Family.WN, n), 0.5, 0.0))
    for n in N_SWEEP:
        rows.append((f"W_n~ (n={n})", _spec(Family.WN_TILDE, n), 0.5, 0.0))
    for n in N_SWEEP:
        rows.append((f"W_nW_n~ (n={n})", _spec(Family.WN_WNTILDE, n), 0.25, 1 / (2 * (n + 1))))
    rows += [
        ("S_ww", _spec(Family.S_WWTILDE), 0.25, 0.25),
        ("Star1", _spec(Family.STAR1), 0.25, 0.25),
    ]
    out = []
    for row, spec, pmax, tau in rows:
        out += [
            Claim("X", row, "P_max", spec, "p_max", (), pmax, OPTIMIZED, "Table X"),
            Claim("X", row, "G", spec, "groverian", (), math.sqrt(1 - pmax), OPTIMIZED, "Table X"),
            Claim("X", row, "tau", spec, "tangle", (), tau, EXACT, "Table X"),
        ]
    return out


CLAIMS: dict[str, list[Claim]] = {
    "IX": _table_ix(),
    "X": _table_x(),
    "coherence": _coherence(),
}
TABLE_IDS = tuple(CLAIMS)
