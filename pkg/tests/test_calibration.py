import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voicesim.calibration import (
    as_calibrated,
    calibrate_set,
    count_epsilon,
    format_calibrated,
    logit,
    pav_apply,
    pav_fit,
    pool_ties,
)
from voicesim.cohort import build_manifest
from voicesim.errors import DegenerateLabels, LengthMismatch, ScoreOutsideTrainingSupport
from voicesim.models import Domain, Label, MatrixKind
from voicesim.score_ingest import parse_scores
from voicesim.synth import exhaustive_isotonic

T, I = Label.TARGET, Label.IMPOSTOR


def block_posterior(cmap, score):
    for bp in cmap.breakpoints:
        if bp.score_low <= score <= bp.score_high:
            return bp.posterior
    raise AssertionError(f"{score} not covered")


def test_pool_ties_merges_equal_scores():
    unique, hits, counts = pool_ties(np.array([2.0, 1.0, 2.0, 3.0]), np.array([1.0, 0.0, 0.0, 1.0]))
    np.testing.assert_array_equal(unique, [1.0, 2.0, 3.0])
    np.testing.assert_array_equal(hits, [0.0, 1.0, 1.0])
    np.testing.assert_array_equal(counts, [1.0, 2.0, 1.0])


def test_separated_scores_hit_the_clamp():
    cmap = pav_fit([0.1, 0.2, 0.8, 0.9], [I, I, T, T])
    eps = count_epsilon(4)
    assert eps == 0.1
    assert [bp.posterior for bp in cmap.breakpoints] == [eps, 1 - eps]
    assert cmap.prior_log_odds == 0.0
    assert pav_apply(cmap, 0.9) == pytest.approx(math.log(9))
    assert pav_apply(cmap, 0.1) == pytest.approx(-math.log(9))


def test_violators_are_pooled():
    # the target at 1 and impostor at 2 violate monotonicity
    cmap = pav_fit([0, 1, 2, 3], [I, T, I, T], epsilon=1e-6)
    assert [bp.posterior for bp in cmap.breakpoints] == [1e-6, 0.5, 1 - 1e-6]
    assert (cmap.breakpoints[1].score_low, cmap.breakpoints[1].score_high) == (1.0, 2.0)


def test_equal_rates_share_a_block():
    cmap = pav_fit([0, 1, 2, 3], [T, I, T, I], epsilon=1e-6)
    assert len(cmap.breakpoints) == 1
    assert cmap.breakpoints[0].posterior == 0.5


def test_all_tied_scores_give_zero_llr():
    score_set_scores = [0.0] * 7
    labels = [T, T, I, I, I, I, I]
    cmap = pav_fit(score_set_scores, labels)
    assert pav_apply(cmap, 0.0) == 0.0


def test_prior_mode_none_keeps_posterior_log_odds():
    cmap = pav_fit([0.0] * 4, [T, I, I, I], prior_mode='none')
    assert pav_apply(cmap, 0.0) == pytest.approx(logit(0.25))


def test_degenerate_and_length_errors():
    with pytest.raises(DegenerateLabels):
        pav_fit([1.0, 2.0], [T, T])
    with pytest.raises(DegenerateLabels):
        pav_fit([1.0, 2.0], [I, I])
    with pytest.raises(LengthMismatch):
        pav_fit([1.0, 2.0, 3.0], [T, I])


def test_unseen_score_warns_and_uses_nearest_block():
    cmap = pav_fit([0.0, 1.0, 5.0, 6.0], [I, I, T, T])
    with pytest.warns(ScoreOutsideTrainingSupport):
        assert pav_apply(cmap, 4.0) == pav_apply(cmap, 5.0)
    with pytest.warns(ScoreOutsideTrainingSupport):
        assert pav_apply(cmap, -10.0) == pav_apply(cmap, 0.0)


def test_pav_matches_exhaustive_isotonic_fit():
    rng = np.random.default_rng(20240917)
    checked = 0
    while checked < 1000:
        n = int(rng.integers(2, 11))
        scores = rng.integers(0, 6, size=n).astype(float)
        labels = rng.integers(0, 2, size=n)
        if labels.sum() in (0, n):
            continue
        cmap = pav_fit(scores, labels.astype(bool), epsilon=1e-12)
        expected = exhaustive_isotonic(scores.tolist(), labels.astype(float).tolist())
        for score, fit in expected.items():
            clamped = min(max(fit, 1e-12), 1 - 1e-12)
            assert block_posterior(cmap, score) == pytest.approx(clamped, abs=1e-9)
        checked += 1


labelled_scores = st.lists(
    st.tuples(st.integers(-5, 5), st.booleans()), min_size=2, max_size=40
).filter(lambda rows: 0 < sum(t for _, t in rows) < len(rows))


@settings(max_examples=100)
@given(labelled_scores)
def test_posteriors_are_monotone_and_clamped(rows):
    scores = [float(s) for s, _ in rows]
    labels = [t for _, t in rows]
    cmap = pav_fit(scores, labels)
    posteriors = [bp.posterior for bp in cmap.breakpoints]
    assert posteriors == sorted(posteriors)
    assert all(a < b for a, b in zip(posteriors, posteriors[1:]))
    assert all(cmap.epsilon <= p <= 1 - cmap.epsilon for p in posteriors)
    highs = [bp.score_high for bp in cmap.breakpoints]
    assert highs == sorted(highs)


@settings(max_examples=100)
@given(labelled_scores)
def test_calibrated_llrs_are_monotone_in_score(rows):
    entries = [(f"u{k}", 'a' if target else f"b{k}", Domain.ORIGINAL)
               for k, (_, target) in enumerate(rows)]
    entries.append(('ref', 'a', Domain.ORIGINAL))
    manifest = build_manifest(entries)
    text = ''.join(f"ref u{k} {s}\n" for k, (s, _) in enumerate(rows))
    oo, _, _ = parse_scores(text, manifest)
    calibrated = calibrate_set(oo)
    by_score = sorted(zip(oo.scores(), (c.llr for c in calibrated)))
    llrs = [llr for _, llr in by_score]
    assert llrs == sorted(llrs)


def test_pre_calibrated_and_llr_file_format():
    manifest = build_manifest([('u1', 'a', Domain.ORIGINAL), ('u2', 'a', Domain.ORIGINAL),
                               ('u3', 'b', Domain.ORIGINAL)])
    oo, _, _ = parse_scores("u1 u2 0.1\nu1 u3 -2.5\n", manifest, kind=MatrixKind.OO)
    trials = as_calibrated(oo)
    assert [t.llr for t in trials] == [0.1, -2.5]
    assert format_calibrated(trials) == "u1 u2 0.1\nu1 u3 -2.5\n"


@settings(max_examples=100)
@given(st.data())
def test_fit_ignores_trial_order(data):
    rows = data.draw(labelled_scores)
    order = data.draw(st.permutations(range(len(rows))))
    scores = [float(s) for s, _ in rows]
    labels = [T if t else I for _, t in rows]
    shuffled = pav_fit([scores[k] for k in order], [labels[k] for k in order])
    assert shuffled == pav_fit(scores, labels)
