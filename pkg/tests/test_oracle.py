import numpy as np
import pytest

from bqtsim.ghz import GhzOutcome
from bqtsim.oracle import (
    DUPLICATE,
    MATCH,
    PHASE_ONLY,
    PUBLISHED_CORRECTIONS,
    SUBSTANTIVE,
    check_table,
    collapsed_label,
    derive_collapsed_states,
    derive_correction,
    derive_correction_table,
    diff_against_published,
    load_table,
    parse_label,
    published_collapsed_state,
    published_correction_table,
    random_draws,
)
from bqtsim.protocol import InputCoefficients


@pytest.fixture(scope="module")
def diff():
    return diff_against_published()


def kron_factors(c, left, right):
    """Two-qubit factors given as {ket: amp} dicts, tensored."""
    def vec(d):
        v = np.zeros(4, dtype=complex)
        for k, a in d.items():
            v[int(k, 2)] = a
        return v

    return np.kron(vec(left), vec(right))


def test_first_collapsed_state():
    c = InputCoefficients.random(0)
    s = derive_collapsed_states(c)[(0, 0)]
    expected = kron_factors(c, {"00": c.alpha, "11": c.beta}, {"00": c.gamma, "11": c.delta})
    assert abs(abs(np.vdot(expected, s.amps)) ** 2 - 1) < 1e-12


def test_flipped_collapsed_states():
    c = InputCoefficients.random(1)
    col = derive_collapsed_states(c)
    # Alice eta2+, Bob zeta1+: Bob's block flips (the alpha/beta factor)
    s = col[(2, 0)]
    e = kron_factors(c, {"11": c.alpha, "00": c.beta}, {"00": c.gamma, "11": c.delta})
    assert abs(abs(np.vdot(e, s.amps)) ** 2 - 1) < 1e-12
    # Alice eta2+, Bob zeta1-: sign lands on the gamma/delta factor
    s = col[(2, 1)]
    e = kron_factors(c, {"11": c.alpha, "00": c.beta}, {"00": c.gamma, "11": -c.delta})
    assert abs(abs(np.vdot(e, s.amps)) ** 2 - 1) < 1e-12


def test_collapsed_states_are_products():
    c = InputCoefficients.random(2)
    for s in derive_collapsed_states(c).values():
        sv = np.linalg.svd(s.amps.reshape(4, 4), compute_uv=False)
        assert sv[1] < 1e-10
        assert abs(s.norm() - 1) < 1e-12


def test_collapsed_labels():
    assert collapsed_label(parse_label("η1+"), parse_label("ζ1+")) == "ψ1+"
    assert collapsed_label(parse_label("η2-"), parse_label("ζ1+")) == "ψ6-"
    assert collapsed_label(parse_label("η2+"), parse_label("ζ2-")) == "ψ8+"
    with pytest.raises(ValueError):
        parse_label("x1+")


def test_published_collapsed_matches_for_psi1():
    c = InputCoefficients.random(3)
    pub = published_collapsed_state("ψ1-", c)
    der = derive_collapsed_states(c)[(1, 1)]
    assert np.allclose(pub.amps, der.amps, atol=1e-10)


def test_correction_examples():
    draws = random_draws(3, seed=4)
    fa, fb = derive_correction(GhzOutcome(3, 0, 1), GhzOutcome(3, 0, 1), draws)
    assert (fa.kinds, fb.kinds) == ("II", "II")
    fa, fb = derive_correction(0, 2, draws)
    assert (fa.kinds, fb.kinds) == ("XX", "II")
    fa, fb = derive_correction(1, 1, draws)
    assert (fa.kinds, fb.kinds) == ("IZ", "IZ")


def test_derived_table_weight_and_completeness():
    t = derive_correction_table(3)
    assert t.is_complete()
    for fa, fb in t.entries.values():
        assert fa.weight <= 2 and fb.weight <= 2
        assert all(op.phase_exp == 0 for op in (*fa.ops, *fb.ops))


def test_corrections_independent_of_coefficients():
    t0 = derive_correction_table(3, seed=0)
    for seed in (1, 2, 3, 4):
        assert derive_correction_table(3, seed=seed, draws=1).same_kinds(t0)


def test_derived_table_valid_on_fresh_draws():
    for n in (3, 4):
        t = derive_correction_table(n)
        assert check_table(t, random_draws(20, seed=99)) == []


def test_single_draw_search_equals_multi_draw():
    c = InputCoefficients.random(8)
    for a in range(4):
        for b in range(4):
            one = derive_correction(a, b, c)
            many = derive_correction(a, b, random_draws(5, seed=8))
            assert (one[0].kinds, one[1].kinds) == (many[0].kinds, many[1].kinds)


def test_published_table_restores_every_row():
    t = published_correction_table()
    assert t.is_complete()
    assert check_table(t, random_draws(5, seed=3)) == []
    assert load_table("published").n == 3
    with pytest.raises(ValueError):
        load_table("published", 4)
    with pytest.raises(ValueError):
        load_table("nowhere")


def test_diff_first_row_match(diff):
    (row,) = diff.find("correction", "(η1+,ζ1+)")[:1]
    assert row.status == MATCH
    assert row.derived == "σ0⊗σ0 ; σ0⊗σ0"
    assert row.published == "σ0⊗σ0 ; σ0⊗σ0"


def test_diff_flags_psi6(diff):
    for label in ("ψ6+", "ψ6-"):
        (row,) = [r for r in diff.by_table("collapsed") if r.key.startswith(label)]
        assert row.status == SUBSTANTIVE
        assert "ψ5" in row.note
    for label in ("ψ5+", "ψ5-"):
        (row,) = [r for r in diff.by_table("collapsed") if r.key.startswith(label)]
        assert row.status == MATCH
    assert any("ψ5" in n and "ψ6" in n for n in diff.notes)


def test_diff_flags_duplicate(diff):
    rows = diff.find("correction", "(η2+,ζ1+)")
    assert [r.status for r in rows] == [MATCH, DUPLICATE]
    assert "row 9" in rows[1].note


def test_diff_classifies_every_row(diff):
    assert len(diff.by_table("collapsed")) == 16
    assert len(diff.by_table("correction")) == len(PUBLISHED_CORRECTIONS) == 17
    statuses = {MATCH, PHASE_ONLY, SUBSTANTIVE, DUPLICATE}
    assert all(r.status in statuses for r in diff.rows)
    assert diff.derived_rows == 16
    # every printed correction restores both states, so none is substantive
    assert not [r for r in diff.by_table("correction") if r.status == SUBSTANTIVE]


def test_diff_render_and_dict(diff):
    text = diff.render()
    assert "duplicate" in text and "substantive mismatch" in text
    d = diff.to_dict()
    assert len(d["rows"]) == 33
