import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import O, P, all_pairs, constant_trials
from voicesim.cohort import reorder_speakers
from voicesim.errors import EmptyCell, MalformedLine, SpeakerOrderMismatch, UnknownSegment
from voicesim.models import CalibratedTrial, MatrixKind, SimilarityMatrix
from voicesim.similarity import (
    build_all,
    build_matrix,
    check_same_speakers,
    export_matrix,
    parse_matrix,
    sigmoid,
)
from voicesim.synth import SynthConfig, SynthScenario, generate, pipeline_matrices


@settings(max_examples=100)
@given(st.floats(-700, 700, allow_nan=False))
def test_sigmoid_symmetry(y):
    assert sigmoid(-y) == pytest.approx(1.0 - sigmoid(y), abs=1e-15)
    assert 0.0 <= sigmoid(y) <= 1.0


def test_sigmoid_values():
    assert sigmoid(0.0) == 0.5
    assert sigmoid(math.log(3)) == pytest.approx(0.75)


def test_zero_llrs_give_half_everywhere(manifest_3x2):
    trials = constant_trials(all_pairs(manifest_3x2, O, O), 0.0)
    m = build_matrix(MatrixKind.OO, manifest_3x2, trials)
    np.testing.assert_array_equal(m.cells, np.full((3, 3), 0.5))


def test_both_orientations_averaged_before_cell_mean(manifest_2x2):
    trials = [
        CalibratedTrial('s0-u0', 's0-u1', 1.0),
        CalibratedTrial('s0-u1', 's0-u0', 3.0),
        CalibratedTrial('s1-u0', 's1-u1', -1.0),
        CalibratedTrial('s0-u0', 's1-u0', 0.0),
        CalibratedTrial('s0-u0', 's1-u1', 0.0),
        CalibratedTrial('s0-u1', 's1-u0', 0.0),
        CalibratedTrial('s1-u1', 's0-u1', 4.0),
    ]
    m = build_matrix(MatrixKind.OO, manifest_2x2, trials)
    assert m.cells[0, 0] == pytest.approx(sigmoid(2.0))
    assert m.cells[1, 1] == pytest.approx(sigmoid(-1.0))
    assert m.cells[0, 1] == pytest.approx(sigmoid(1.0))
    assert m.cells[1, 0] == m.cells[0, 1]
    # one unordered pair on each diagonal cell stands for two ordered pairs
    assert m.pair_counts.tolist() == [[2, 4], [4, 2]]


def test_same_segment_with_itself_is_ignored(manifest_2x2):
    trials = constant_trials(all_pairs(manifest_2x2, O, O), 0.0)
    trials.append(CalibratedTrial('s0-u0', 's0-u0', 50.0))
    m = build_matrix(MatrixKind.OO, manifest_2x2, trials)
    assert m.cells[0, 0] == 0.5


def test_missing_pair_is_empty_cell(manifest_2x2):
    trials = [CalibratedTrial('s0-u0', 's0-u1', 1.0), CalibratedTrial('s1-u0', 's1-u1', 1.0)]
    with pytest.raises(EmptyCell) as exc:
        build_matrix(MatrixKind.OO, manifest_2x2, trials)
    assert exc.value.context['kind'] == 'OO'


def test_wrong_domain_trial_rejected(manifest_2x2):
    with pytest.raises(UnknownSegment):
        build_matrix(MatrixKind.PP, manifest_2x2, [CalibratedTrial('s0-u0', 's0-u1', 1.0)])


def test_op_same_slot_pairs_kept_by_default_and_excludable(manifest_2x2):
    pairs = all_pairs(manifest_2x2, O, P, skip_same_slot=False)
    trials = []
    for a, b in pairs:
        same_slot = manifest_2x2.slot_of(a, O) == manifest_2x2.slot_of(b, P)
        trials.append(CalibratedTrial(a, b, 6.0 if same_slot else 0.0, O, P))

    kept = build_matrix(MatrixKind.OP, manifest_2x2, trials, exclude_op_self_pairs=False)
    # keys on the diagonal: (u0,u0) and (u1,u1) at llr 6, (u0,u1) at llr 0
    assert kept.cells[0, 0] == pytest.approx(sigmoid(4.0))
    assert kept.pair_counts[0, 0] == 4

    dropped = build_matrix(MatrixKind.OP, manifest_2x2, trials, exclude_op_self_pairs=True)
    assert dropped.cells[0, 0] == 0.5
    assert dropped.cells[0, 1] == 0.5


def test_op_matrix_is_symmetric_even_from_asymmetric_trials(manifest_2x2):
    trials = [
        CalibratedTrial(a, b, float(k), O, P)
        for k, (a, b) in enumerate(all_pairs(manifest_2x2, O, P))
    ]
    m = build_matrix(MatrixKind.OP, manifest_2x2, trials)
    assert m.cells[0, 1] == m.cells[1, 0]


@settings(max_examples=100)
@given(st.lists(st.floats(-30, 30, allow_nan=False), min_size=30, max_size=30))
def test_matrices_are_symmetric_and_inside_unit_interval(llrs):
    from conftest import cohort_entries
    from voicesim.cohort import build_manifest

    manifest = build_manifest(cohort_entries(3, 2))
    pairs = all_pairs(manifest, O, P)
    trials = [CalibratedTrial(a, b, llr, O, P) for (a, b), llr in zip(pairs, llrs)]
    m = build_matrix(MatrixKind.OP, manifest, trials)
    np.testing.assert_array_equal(m.cells, m.cells.T)
    assert np.all((m.cells > 0.0) & (m.cells < 1.0))


def test_permuting_speakers_permutes_matrices():
    cohort = generate(SynthConfig(n_speakers=4, segments_per_speaker=3, seed=11,
                                  scenario=SynthScenario.SHIFT))
    base = pipeline_matrices(cohort)
    order = ('spk02', 'spk00', 'spk03', 'spk01')
    permuted_cohort = type(cohort)(
        config=cohort.config,
        manifest=reorder_speakers(cohort.manifest, order),
        embeddings_o=cohort.embeddings_o,
        embeddings_p=cohort.embeddings_p,
    )
    permuted = pipeline_matrices(permuted_cohort)
    index = [cohort.manifest.speaker_index(s) for s in order]
    for m, p in zip(base, permuted):
        assert p.speakers == order
        np.testing.assert_allclose(p.cells, m.cells[np.ix_(index, index)], rtol=0, atol=1e-12)


def test_build_all_returns_oo_op_pp(manifest_2x2):
    sets = [
        constant_trials(all_pairs(manifest_2x2, O, O), 1.0, O, O),
        constant_trials(all_pairs(manifest_2x2, O, P), 0.0, O, P),
        constant_trials(all_pairs(manifest_2x2, P, P), -1.0, P, P),
    ]
    oo, op, pp = build_all(manifest_2x2, sets)
    assert [m.kind for m in (oo, op, pp)] == list(MatrixKind)
    assert pp.cells[0, 0] == pytest.approx(sigmoid(-1.0))


def test_matrix_table_round_trip():
    m = SimilarityMatrix(MatrixKind.OP, ('a', 'b'), np.array([[0.25, 0.1234567], [0.1234567, 0.9]]))
    text = export_matrix(m)
    assert text.splitlines()[0] == "OP\ta\tb"
    assert text.splitlines()[1] == "a\t0.250000\t0.123457"
    again = parse_matrix(text)
    assert again.kind == MatrixKind.OP
    assert again.speakers == ('a', 'b')
    np.testing.assert_allclose(again.cells, m.cells, atol=5e-7)


def test_parse_matrix_errors():
    with pytest.raises(MalformedLine):
        parse_matrix("XX\ta\na\t0.5\n")
    with pytest.raises(MalformedLine):
        parse_matrix("OO\ta\tb\na\t0.5\t0.5\n")
    with pytest.raises(MalformedLine):
        parse_matrix("OO\ta\na\t1.5\n")


def test_check_same_speakers():
    a = SimilarityMatrix(MatrixKind.OO, ('x', 'y'), np.full((2, 2), 0.5))
    b = SimilarityMatrix(MatrixKind.PP, ('y', 'x'), np.full((2, 2), 0.5))
    with pytest.raises(SpeakerOrderMismatch):
        check_same_speakers(a, b)


def test_reordered_protected_list_excludes_the_real_self_pairs():
    from voicesim.cohort import build_manifest

    manifest = build_manifest([('u1', 'a', O), ('u2', 'a', O), ('w1', 'b', O), ('w2', 'b', O),
                               ('u2', 'a', P), ('u1', 'a', P), ('w1', 'b', P), ('w2', 'b', P)])
    trials = [
        CalibratedTrial(a, b, 8.0 if a == b else 0.0, O, P)
        for a in ('u1', 'u2', 'w1', 'w2') for b in ('u2', 'u1', 'w1', 'w2')
    ]
    dropped = build_matrix(MatrixKind.OP, manifest, trials, exclude_op_self_pairs=True)
    np.testing.assert_array_equal(dropped.cells, np.full((2, 2), 0.5))

    kept = build_matrix(MatrixKind.OP, manifest, trials, exclude_op_self_pairs=False)
    # two self pairs at 8 and one cross pair at 0 on each diagonal cell
    assert kept.cells[0, 0] == pytest.approx(sigmoid(16.0 / 3.0))
    assert kept.cells[0, 0] == kept.cells[1, 1]


def cross_speaker_trials(manifest, llrs):
    """Zero llrs inside each speaker, `llrs` over the s0/s1 pairs in all_pairs order"""
    pairs = all_pairs(manifest, O, O)
    cross = [(a, b) for a, b in pairs if a.split('-')[0] == 's0' and b.split('-')[0] == 's1']
    same = [(a, b) for a, b in pairs if a.split('-')[0] == b.split('-')[0]]
    return constant_trials(same, 0.0) + [
        CalibratedTrial(a, b, llr) for (a, b), llr in zip(cross, llrs)
    ]


def test_cross_speaker_cell_averages_every_segment_pair(manifest_2x2):
    m = build_matrix(MatrixKind.OO, manifest_2x2, cross_speaker_trials(manifest_2x2, [0, 1, 2, 3]))
    assert m.cells[0, 1] == pytest.approx(0.81757, abs=1e-5)
    assert m.cells[0, 0] == 0.5


def test_llrs_are_averaged_before_the_sigmoid(manifest_2x2):
    m = build_matrix(MatrixKind.OO, manifest_2x2, cross_speaker_trials(manifest_2x2, [0, 4, 0, 4]))
    assert m.cells[0, 1] == pytest.approx(0.88080, abs=1e-5)
    assert m.cells[0, 1] != pytest.approx((sigmoid(0.0) + sigmoid(4.0)) / 2)


def test_one_segment_per_speaker_leaves_the_diagonal_empty():
    from conftest import cohort_entries
    from voicesim.cohort import build_manifest

    manifest = build_manifest(cohort_entries(2, 1))
    trials = constant_trials(all_pairs(manifest, O, O), 1.0)
    with pytest.raises(EmptyCell) as exc:
        build_matrix(MatrixKind.OO, manifest, trials)
    assert (exc.value.context['row'], exc.value.context['column']) == (0, 0)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(list(SynthScenario)),
       st.permutations(('spk00', 'spk01', 'spk02')))
def test_speaker_permutations_permute_every_matrix(seed, scenario, order):
    cohort = generate(SynthConfig(n_speakers=3, segments_per_speaker=2, embedding_dim=4,
                                  seed=seed, scenario=scenario))
    base = pipeline_matrices(cohort)
    permuted = pipeline_matrices(type(cohort)(
        config=cohort.config,
        manifest=reorder_speakers(cohort.manifest, order),
        embeddings_o=cohort.embeddings_o,
        embeddings_p=cohort.embeddings_p,
    ))
    index = [cohort.manifest.speaker_index(s) for s in order]
    for m, p in zip(base, permuted):
        assert p.speakers == tuple(order)
        np.testing.assert_allclose(p.cells, m.cells[np.ix_(index, index)], rtol=0, atol=1e-12)
