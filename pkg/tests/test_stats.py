import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import rankdata

from imogwo.stats import (COMPARISON_COLUMNS, ObjectiveSample, UndefinedGainError,
                          comparison_rows, gain, rows_to_csv, summarize, wilcoxon_rank_sum)


def exact_rank_sum_p(a, b) -> float:
    """Two-sided exact p by enumerating every split of the pooled midranks."""
    pooled = np.concatenate([a, b])
    r = rankdata(pooled)
    na = len(a)
    centre = na * (len(pooled) + 1) / 2
    w = r[:na].sum()
    sums = np.array([r[list(c)].sum() for c in itertools.combinations(range(len(pooled)), na)])
    return float(np.mean(np.abs(sums - centre) >= abs(w - centre) - 1e-9))


def test_summarize_examples():
    assert summarize([2, 2, 2]) == (2.0, 0.0, 2.0, 2.0)
    mean, std, mx, mn = summarize([1, 3])
    assert (mean, mx, mn) == (2.0, 3.0, 1.0)
    assert std == 1.0          # population convention
    with pytest.raises(ValueError):
        summarize([])


def test_summarize_spreadsheet_oracle():
    v = np.random.default_rng(0).normal(5, 2, 30)
    mean = sum(v) / 30
    std = (sum((x - mean) ** 2 for x in v) / 30) ** 0.5
    got = summarize(ObjectiveSample("X", "f1", v))
    assert got[0] == pytest.approx(mean, abs=1e-9)
    assert got[1] == pytest.approx(std, abs=1e-9)
    assert got[2:] == (max(v), min(v))


def test_identical_samples():
    a = np.random.default_rng(1).random(10)
    assert wilcoxon_rank_sum(a, a)[1] == "="
    assert wilcoxon_rank_sum([3.0, 3.0, 3.0], [3.0, 3.0]) == (1.0, "=")


def test_clear_separation_is_plus():
    rng = np.random.default_rng(2)
    p, verdict = wilcoxon_rank_sum(rng.normal(6.6, 1, 30), rng.normal(11.0, 1, 30))
    assert p < 0.05 and verdict == "+"
    assert p < 1e-8


def test_swap_flips_verdict_keeps_p():
    rng = np.random.default_rng(3)
    a, b = rng.normal(0, 1, 30), rng.normal(1, 1, 30)
    pa, va = wilcoxon_rank_sum(a, b)
    pb, vb = wilcoxon_rank_sum(b, a)
    assert pa == pytest.approx(pb, rel=1e-12)
    assert (va, vb) == ("+", "-")


def _five_vs_five_fixtures():
    rng = np.random.default_rng(4)
    fixtures = [(rng.normal(0, 1, 5), rng.normal(shift, 1, 5))
                for shift in np.linspace(0, 3, 300)]
    fixtures += [
        (np.arange(1.0, 6.0), np.arange(6.0, 11.0)),
        (np.array([1.0, 3, 5, 7, 9]), np.array([2.0, 4, 6, 8, 10])),
        (np.array([1.0, 2, 3, 4, 6]), np.array([5.0, 6, 7, 8, 9])),      # one tie
        (np.array([0.5, 1, 1.5, 2, 9]), np.array([2.0, 2.5, 3, 3.5, 4])),  # one tie
    ]
    return fixtures


def test_matches_exact_permutation_oracle_five_vs_five():
    worst = max(abs(wilcoxon_rank_sum(a, b)[0] - exact_rank_sum_p(a, b))
                for a, b in _five_vs_five_fixtures())
    assert worst <= 0.02


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=12),
       st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=12))
def test_p_in_unit_interval(a, b):
    p, verdict = wilcoxon_rank_sum(a, b)
    assert 0.0 <= p <= 1.0 and verdict in "+=-"


def test_small_samples_rejected():
    with pytest.raises(ValueError):
        wilcoxon_rank_sum([1.0], [1.0, 2.0])


def test_gain_table_values():
    assert gain([8.01], [17.16]) == pytest.approx(53.32, abs=0.01)
    assert gain([0.55], [0.61]) == pytest.approx(9.83, abs=0.01)
    assert gain([4.0, 4.0], [4.0]) == 0.0
    with pytest.raises(UndefinedGainError):
        gain([1.0], [0.0])


def test_gain_antisymmetry():
    a, b = 3.0, 5.0
    assert gain([a], [b]) * b == pytest.approx(-gain([b], [a]) * a)


def test_comparison_rows_and_csv():
    rng = np.random.default_rng(5)
    samples = {"IMOGWO": rng.normal(1, 0.1, (30, 3)), "MOGWO": rng.normal(2, 0.1, (30, 3))}
    rows = comparison_rows(samples, "IMOGWO")
    assert len(rows) == 6
    ref = [r for r in rows if r.algorithm == "IMOGWO"]
    assert all(r.p_value is None and r.gain_pct > 0 for r in ref)
    assert all(r.verdict == "+" for r in rows if r.algorithm == "MOGWO")
    text = rows_to_csv(rows)
    assert text.splitlines()[0] == ",".join(COMPARISON_COLUMNS)
    assert len(text.splitlines()) == 7
    with pytest.raises(ValueError):
        comparison_rows({"A": np.ones((3, 3)), "B": np.ones((4, 3))}, "A")
