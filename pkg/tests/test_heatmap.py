import re

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import GOLDEN_DIR
from voicesim.errors import OutOfRange, SpeakerOrderMismatch
from voicesim.heatmap import (
    ColorMap,
    CompositeLayout,
    ScatterPoint,
    color_of,
    composite_raster,
    decode_ppm,
    render_composite,
    render_scatter,
    render_single,
)
from voicesim.models import MatrixKind, SimilarityMatrix
from voicesim.similarity import export_matrix, parse_matrix
from voicesim.synth import SynthConfig, SynthScenario, generate, pipeline_matrices


def matrix(cells, kind=MatrixKind.OO, speakers=None):
    cells = np.asarray(cells, dtype=float)
    speakers = speakers or tuple(f"s{i}" for i in range(len(cells)))
    return SimilarityMatrix(kind, speakers, cells)


def test_colormap_endpoints_and_midpoint():
    assert color_of(0.0) == (255, 247, 0)
    assert color_of(1.0) == (209, 20, 20)
    assert color_of(0.5) == (232, 134, 10)


@pytest.mark.parametrize('s', [-0.01, 1.0001, float('nan')])
def test_color_out_of_range(s):
    with pytest.raises(OutOfRange):
        color_of(s)


@settings(max_examples=100)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_color_channels_are_monotone(a, b):
    lo, hi = sorted((a, b))
    r1, g1, b1 = color_of(lo)
    r2, g2, b2 = color_of(hi)
    assert r2 <= r1 and g2 <= g1 and b2 >= b1


def test_single_speaker_composite():
    half = matrix([[0.5]])
    raster = composite_raster(half, matrix([[0.5]], MatrixKind.OP), matrix([[0.5]], MatrixKind.PP),
                              CompositeLayout(cell_size=1))
    assert raster.shape == (3, 3, 3)
    for y, x in [(0, 0), (0, 2), (2, 0), (2, 2)]:
        assert tuple(raster[y, x]) == (232, 134, 10)
    assert not raster[1, :].any() and not raster[:, 1].any()


def test_composite_quadrants_and_transpose():
    oo = matrix([[1.0, 0.0], [0.0, 1.0]])
    op = matrix([[0.0, 1.0], [0.5, 0.0]], MatrixKind.OP)
    pp = matrix([[0.5, 0.5], [0.5, 0.5]], MatrixKind.PP)
    raster = composite_raster(oo, op, pp, CompositeLayout(cell_size=2))
    assert raster.shape == (9, 9, 3)
    assert tuple(raster[0, 0]) == (209, 20, 20)
    # OP row 0, column 1 lands top-right; its transpose bottom-left
    assert tuple(raster[0, 7]) == color_of(1.0)
    assert tuple(raster[7, 0]) == color_of(1.0)
    assert tuple(raster[2, 5]) == color_of(0.5)
    assert tuple(raster[5, 2]) == color_of(0.5)


def test_symmetric_inputs_give_symmetric_raster():
    cells = np.array([[0.9, 0.2, 0.1], [0.2, 0.8, 0.3], [0.1, 0.3, 0.7]])
    raster = composite_raster(matrix(cells), matrix(cells, MatrixKind.OP),
                              matrix(cells, MatrixKind.PP), CompositeLayout(cell_size=3))
    assert raster.shape[:2] == (2 * 3 * 3 + 1, 2 * 3 * 3 + 1)
    np.testing.assert_array_equal(raster, raster.transpose(1, 0, 2))


def test_ppm_encoding_and_determinism():
    oo = matrix([[0.9, 0.1], [0.1, 0.9]])
    args = (oo, matrix(oo.cells, MatrixKind.OP), matrix(oo.cells, MatrixKind.PP),
            CompositeLayout(cell_size=4))
    first = render_composite(*args)
    assert first.startswith(b"P6\n17 17\n255\n")
    assert first == render_composite(*args)
    assert decode_ppm(first).shape == (17, 17, 3)


def test_svg_output():
    oo = matrix([[0.9, 0.1], [0.1, 0.9]])
    svg = render_composite(oo, matrix(oo.cells, MatrixKind.OP), matrix(oo.cells, MatrixKind.PP),
                           CompositeLayout(cell_size=8, title='ldtf'), fmt='svg')
    text = svg.decode('utf-8')
    assert text.startswith('<?xml')
    assert text.rstrip().endswith('</svg>')
    assert '>ldtf</text>' in text
    assert text.count('<rect') > 8
    assert '>1.0</text>' in text


def test_render_single_distinct_cells():
    m = matrix([[0.0, 0.25], [0.75, 1.0]])
    pixels = decode_ppm(render_single(m, CompositeLayout(cell_size=1)))
    assert pixels.shape == (2, 2, 3)
    assert len({tuple(p) for row in pixels for p in row}) == 4
    assert tuple(pixels[1, 1]) == (209, 20, 20)


def test_speaker_order_mismatch():
    a = matrix(np.full((2, 2), 0.5))
    b = matrix(np.full((2, 2), 0.5), MatrixKind.OP, speakers=('s1', 's0'))
    with pytest.raises(SpeakerOrderMismatch):
        render_composite(a, b, a)


def test_custom_colormap():
    cmap = ColorMap(low_rgb=(0, 0, 0), high_rgb=(255, 255, 255))
    assert cmap.color(0.5) == (128, 128, 128)


def test_scatter_skips_undefined_points():
    svg = render_scatter([
        ScatterPoint('ldtf', 'primary', 99.5, -9.2),
        ScatterPoint('ldtm', 'secondary', 55.4, -1.1),
        ScatterPoint('vdtf', 'secondary', 60.0, float('-inf')),
    ]).decode('utf-8')
    assert '>ldtf</text>' in svg and '>ldtm</text>' in svg
    assert '>vdtf</text>' not in svg
    assert '<polygon' in svg


def test_golden_composite():
    config = SynthConfig(n_speakers=2, segments_per_speaker=2, embedding_dim=16,
                         within_speaker_std=0.01, scenario=SynthScenario.IDEAL, seed=7)
    matrices = [parse_matrix(export_matrix(m)) for m in pipeline_matrices(generate(config))]
    image = render_composite(*matrices, CompositeLayout(cell_size=1), fmt='ppm')
    assert image == (GOLDEN_DIR / 'ideal_n2_composite.ppm').read_bytes()


def test_colorbar_ticks_every_fifth():
    oo = matrix([[0.9, 0.1], [0.1, 0.9]])
    svg = render_composite(oo, matrix(oo.cells, MatrixKind.OP), matrix(oo.cells, MatrixKind.PP),
                           CompositeLayout(cell_size=8), fmt='svg').decode('utf-8')
    ticks = re.findall(r'>(\d\.\d)</text>', svg)
    assert ticks == ['0.0', '0.2', '0.4', '0.6', '0.8', '1.0']
