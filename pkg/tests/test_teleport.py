import json
import math

import numpy as np
import pytest

from startele.channels import ChannelSpec, Family
from startele.measurement import NotOrthonormalError
from startele.teleport import (
    CORRECTION_TABLES,
    Correction,
    CorrectionTable,
    InputQubit,
    JungAudit,
    MissingCorrectionError,
    ProtocolReport,
    check_corrections,
    decomposition_residual,
    derive_corrections,
    haar_inputs,
    jung_audit,
    paper_correction_table,
    run_protocol,
)


def spec(family, n=1.0, gamma=0.0, delta=0.0):
    return ChannelSpec(family, n, gamma, delta)


def test_input_qubit():
    q = InputQubit.normalized(3, 4j)
    assert q.alpha == pytest.approx(0.6) and q.beta == pytest.approx(0.8j)
    with pytest.raises(ValueError):
        InputQubit(1, 1)
    with pytest.raises(ValueError):
        InputQubit.normalized(0, 0)
    assert InputQubit.from_dict(json.loads(json.dumps(q.to_dict()))) == q


def test_haar_inputs_are_seeded():
    a, b = haar_inputs(5, seed=7), haar_inputs(5, seed=7)
    assert a == b
    assert a != haar_inputs(5, seed=8)


def test_correction_parse_and_matrix():
    assert Correction.parse("iY") == Correction("Y", 1j)
    assert Correction.parse("-iY") == Correction("Y", -1j)
    assert Correction.parse("-Z") == Correction("Z", -1)
    assert str(Correction("Y", 1j)) == "iY"
    # iY is the real matrix [[0, 1], [-1, 0]]
    assert np.allclose(Correction("Y", 1j).matrix, [[0, 1], [-1, 0]])
    with pytest.raises(ValueError):
        Correction("Q")
    with pytest.raises(ValueError):
        Correction("X", 2)


def test_printed_correction_tables():
    ghz = paper_correction_table(spec(Family.GHZ)).entries
    assert ghz == {"ghz1+": Correction("I"), "ghz1-": Correction("Z"), "ghz2+": Correction("X"),
                   "ghz2-": Correction("Y", 1j)}
    wt = paper_correction_table(spec(Family.W1_TILDE)).entries
    assert wt == {"wt1+": Correction("X"), "wt1-": Correction("Y", -1j), "wt2+": Correction("I"),
                  "wt2-": Correction("Z", -1)}
    wn = paper_correction_table(spec(Family.WN, 3)).entries
    assert wn == {"wx+": Correction("I"), "wx-": Correction("Z"), "wy+": Correction("X"),
                  "wy-": Correction("Y", 1j)}


def test_correction_table_round_trip():
    t = paper_correction_table(spec(Family.W1_TILDE))
    assert CorrectionTable.from_dict(json.loads(json.dumps(t.to_dict()))) == t


def test_ghz_protocol_any_input():
    for q in [InputQubit(1, 0), InputQubit(0, 1)] + haar_inputs(4, seed=1):
        rep = run_protocol(spec(Family.GHZ), q)
        assert rep.perfect
        assert rep.mode == "projective"
        assert rep.total_probability == pytest.approx(1, abs=1e-12)
        assert [r.probability for r in rep.rows] == pytest.approx([0.25] * 4, abs=1e-12)


def test_w1_protocol_example():
    rep = run_protocol(spec(Family.W1), InputQubit(0.6, 0.8))
    assert rep.perfect
    assert rep.min_fidelity == pytest.approx(1, abs=1e-12)


def test_star1_protocol_is_analysis_only():
    rep = run_protocol(spec(Family.STAR1), InputQubit(0.6, 0.8))
    assert rep.mode == "analysis"
    assert not rep.perfect
    assert rep.total_probability is None
    assert all(r.probability is None for r in rep.rows)
    assert min(r.fidelity for r in rep.rows) < 1 - 1e-3
    assert rep.gram is not None and rep.gram.max_off_diagonal == pytest.approx(0.5)


@pytest.mark.parametrize("family", [Family.S_WWTILDE, Family.WN_WNTILDE])
def test_eight_element_sets_are_analysis_only(family):
    rep = run_protocol(spec(family, 2.0), InputQubit(0.6, 0.8))
    assert rep.mode == "analysis" and not rep.perfect
    assert len(rep.rows) == 8


@pytest.mark.parametrize("family", sorted(CORRECTION_TABLES, key=lambda f: f.value))
def test_decomposition_identity(family):
    for q in haar_inputs(4, seed=99):
        assert decomposition_residual(spec(family, 2.0), q) < 1e-12


def test_phased_wn_protocols_are_perfect():
    for fam in (Family.WN, Family.WN_TILDE):
        for q in haar_inputs(4, seed=3):
            assert run_protocol(spec(fam, 2.5, 0.8, 5.1), q).perfect


PERFECT_CASES = [(Family.GHZ, 1), (Family.W1, 1), (Family.W1_TILDE, 1)] + [
    (fam, n) for fam in (Family.WN, Family.WN_TILDE) for n in (1, 2, 3, 5)
]


@pytest.mark.parametrize("family,n", PERFECT_CASES)
def test_linearity_over_inputs(family, n):
    for q in [InputQubit(1, 0), InputQubit(0, 1)] + haar_inputs(16):
        rep = run_protocol(spec(family, n), q)
        assert rep.perfect
        assert abs(rep.min_fidelity - 1) < 1e-10
        for row in rep.rows:
            assert abs(row.probability - 0.25) < 1e-10
        assert rep.residual_probability < 1e-12


def test_missing_correction_raises():
    partial = CorrectionTable({"ghz1+": Correction("I"), "ghz1-": Correction("Z"), "ghz2+": Correction("X")})
    with pytest.raises(MissingCorrectionError):
        run_protocol(spec(Family.GHZ), InputQubit(0.6, 0.8), partial)


def _same_up_to_phase(a: Correction, b: Correction) -> bool:
    return a.pauli == b.pauli


@pytest.mark.parametrize("family,n", PERFECT_CASES)
def test_derived_corrections_match_tables(family, n):
    derived = derive_corrections(spec(family, n))
    printed = paper_correction_table(spec(family, n))
    assert not derived.failures
    for label, corr in printed.entries.items():
        assert _same_up_to_phase(derived.entries[label], corr), label
        assert len(derived.successes[label]) == 1


def test_derived_phase_matches_exact_restoration():
    derived = derive_corrections(spec(Family.GHZ))
    # ghz2- leaves beta|0> - alpha|1>; -iY restores it exactly, the table's iY up to a sign
    assert derived.entries["ghz2-"] == Correction("Y", -1j)
    assert derived.entries["ghz1+"] == Correction("I")


def test_swapped_corrections_fail():
    printed = paper_correction_table(spec(Family.W1)).entries
    swapped = dict(printed)
    swapped["w1+"], swapped["w2+"] = printed["w2+"], printed["w1+"]
    verdict = check_corrections(spec(Family.W1), CorrectionTable(swapped))
    assert verdict == {"w1+": False, "w1-": True, "w2+": False, "w2-": True}


def test_derive_refuses_non_orthonormal():
    with pytest.raises(NotOrthonormalError):
        derive_corrections(spec(Family.STAR1))


def test_protocol_report_round_trip():
    for fam in (Family.GHZ, Family.STAR1, Family.WN):
        rep = run_protocol(spec(fam, 2.0, 0.3, 0.2), InputQubit.normalized(0.3 + 0.1j, -0.5))
        again = ProtocolReport.from_dict(json.loads(json.dumps(rep.to_dict())))
        assert again == rep


def test_jung_audit_ghz():
    a = jung_audit(spec(Family.GHZ))
    assert a.p_max == pytest.approx(0.5, abs=1e-6)
    assert a.groverian == pytest.approx(1 / math.sqrt(2), abs=1e-6)
    assert a.perfect_teleport and a.oracle_agrees
    assert not a.contradicts_conjecture


def test_jung_audit_w1():
    a = jung_audit(spec(Family.W1))
    assert a.p_max == pytest.approx(0.5, abs=1e-6)
    assert a.perfect_teleport


def test_jung_audit_s_wwtilde():
    a = jung_audit(spec(Family.S_WWTILDE))
    assert a.paper_claimed_p_max == 0.25
    assert a.p_max >= (24 + 16 * math.sqrt(2)) / 64 - 1e-12
    assert a.pmax_mismatch
    assert not a.perfect_teleport
    assert a.protocol_mode == "analysis"
    assert a.oracle_agrees


@pytest.mark.parametrize("family", [Family.GHZ, Family.STAR1, Family.W_PROTOTYPE])
def test_jung_audit_groverian_identity_and_round_trip(family):
    a = jung_audit(spec(family))
    assert abs(a.groverian**2 + a.p_max - 1) < 1e-12
    assert JungAudit.from_dict(json.loads(json.dumps(a.to_dict()))) == a
