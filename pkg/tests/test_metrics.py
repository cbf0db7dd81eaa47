from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bqtsim.metrics import (
    COMPARISON,
    ProtocolMetrics,
    efficiency,
    general_row,
    parse_bqt,
    render_percent,
    render_table,
    table3,
    transcript_metrics,
)
from bqtsim.protocol import InputCoefficients, run_bqt


def test_efficiency_examples():
    assert efficiency(ProtocolMetrics(6, 6, 2, 4)) == 50
    assert efficiency(ProtocolMetrics(3, 5, 0, 4)) == Fraction(100, 3)
    assert efficiency(ProtocolMetrics(5, 8, 0, 8)) == Fraction(125, 4)


def test_efficiency_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        efficiency(ProtocolMetrics(1, 0, 0, 0))
    with pytest.raises(ValueError):
        ProtocolMetrics(-1, 1, 1, 1)


@pytest.mark.parametrize(
    "value, text",
    [(Fraction(50), "50"), (Fraction(125, 4), "31.25"), (Fraction(100, 3), "33.3"), (Fraction(400, 14), "28.5"), (Fraction(81, 2), "40.5")],
)
def test_render_percent(value, text):
    assert render_percent(value) == text


def test_parse_bqt():
    assert parse_bqt("2<->3") == 5
    assert parse_bqt("3↔1") == 4


def test_every_row_matches_printed():
    rows = table3()
    assert len(rows) == 8
    for r in rows:
        assert r.matches, (r.protocol, r.eta, r.printed_eta)
    assert [r.eta for r in rows[-2:]] == ["50", "50"]


@pytest.mark.parametrize("n", range(2, 40))
def test_general_row_is_fifty(n):
    assert general_row(n).metrics.eta == 50


def test_general_row_guard():
    with pytest.raises(ValueError):
        general_row(1)


@given(st.integers(1, 50), st.integers(1, 50), st.integers(0, 10), st.integers(0, 50))
def test_efficiency_monotone(qt, qs, qa, bt):
    base = efficiency(ProtocolMetrics(qt, qs, qa, bt))
    assert efficiency(ProtocolMetrics(qt + 1, qs, qa, bt)) > base
    assert efficiency(ProtocolMetrics(qt, qs + 1, qa, bt)) < base
    assert efficiency(ProtocolMetrics(qt, qs, qa + 1, bt)) < base
    assert efficiency(ProtocolMetrics(qt, qs, qa, bt + 1)) < base


def test_render_table_lists_rows():
    text = render_table(table3())
    assert text.count("\n") == len(COMPARISON) + 2
    assert "NO\n" not in text


def test_transcript_metrics():
    tr = run_bqt(3, InputCoefficients.random(0), branches=(0, 0))
    m = transcript_metrics(tr)
    assert (m.q_t, m.q_s, m.q_a, m.b_t) == (6, 6, 2, 4)
    assert m.render() == "50"


def test_nothing_teleported_is_zero():
    m = ProtocolMetrics(0, 6, 2, 4)
    assert m.eta == 0 and m.render() == "0"
