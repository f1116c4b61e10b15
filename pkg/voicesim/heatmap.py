"""
Heatmaps of voice similarity matrices.

The composite view puts M_OO top-left, M_OP top-right, its transpose
bottom-left and M_PP bottom-right, separated by one-pixel black lines.
PPM output is the bare raster; SVG output adds half-axis labels, a colorbar
and an optional title.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from voicesim import config
from voicesim.errors import OutOfRange
from voicesim.models import SimilarityMatrix
from voicesim.similarity import check_same_speakers

logger = logging.getLogger(__name__)

RGB = Tuple[int, int, int]
SEPARATOR_RGB: RGB = (0, 0, 0)


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class ColorMap:
    low_rgb: RGB = (255, 247, 0)
    high_rgb: RGB = (209, 20, 20)

    def color(self, s: float) -> RGB:
        if not 0.0 <= s <= 1.0:
            raise OutOfRange(f"similarity {s!r} is outside [0, 1]", value=s)
        return tuple(
            round_half_up(lo + s * (hi - lo)) for lo, hi in zip(self.low_rgb, self.high_rgb)
        )


DEFAULT_COLORMAP = ColorMap()


@dataclass(frozen=True)
class CompositeLayout:
    cell_size: int = config.CELL_SIZE
    separator: int = 1
    # SVG only
    margin: int = 24
    colorbar_width: int = 14
    title: Optional[str] = None

    def __post_init__(self):
        if self.cell_size < 1:
            raise ValueError("cell_size must be a positive integer")


def color_of(s: float) -> RGB:
    return DEFAULT_COLORMAP.color(s)


def _matrix_raster(cells: np.ndarray, cell_size: int, cmap: ColorMap) -> np.ndarray:
    n = cells.shape[0]
    raster = np.empty((n, n, 3), dtype=np.uint8)
    for i in range(n):
        for j in range(n):
            raster[i, j] = cmap.color(float(cells[i, j]))
    return np.repeat(np.repeat(raster, cell_size, axis=0), cell_size, axis=1)


def composite_raster(m_oo: SimilarityMatrix, m_op: SimilarityMatrix, m_pp: SimilarityMatrix,
                     layout: CompositeLayout = CompositeLayout(),
                     cmap: ColorMap = DEFAULT_COLORMAP) -> np.ndarray:
    """(H, W, 3) uint8 raster of the four quadrants with separators"""
    check_same_speakers(m_oo, m_op, m_pp)
    half = m_oo.n * layout.cell_size
    sep = layout.separator
    side = 2 * half + sep
    raster = np.empty((side, side, 3), dtype=np.uint8)
    raster[:, :] = SEPARATOR_RGB

    op = _matrix_raster(m_op.cells, layout.cell_size, cmap)
    raster[:half, :half] = _matrix_raster(m_oo.cells, layout.cell_size, cmap)
    raster[:half, half + sep:] = op
    raster[half + sep:, :half] = op.transpose(1, 0, 2)
    raster[half + sep:, half + sep:] = _matrix_raster(m_pp.cells, layout.cell_size, cmap)
    return raster


def encode_ppm(raster: np.ndarray) -> bytes:
    height, width = raster.shape[:2]
    header = f"P6\n{width} {height}\n255\n".encode('ascii')
    return header + np.ascontiguousarray(raster, dtype=np.uint8).tobytes()


def decode_ppm(data: bytes) -> np.ndarray:
    """Inverse of encode_ppm (only the layout encode_ppm writes)"""
    magic, dims, maxval, body = data.split(b'\n', 3)
    if magic != b'P6' or maxval != b'255':
        raise ValueError("not a binary 8-bit PPM")
    width, height = (int(v) for v in dims.split())
    return np.frombuffer(body, dtype=np.uint8).reshape(height, width, 3)


def _hex(rgb: RGB) -> str:
    return '#%02x%02x%02x' % rgb


class SvgCanvas:
    """Accumulates SVG elements; coordinates are written with fixed precision"""

    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.parts: List[str] = []

    def rect(self, x: float, y: float, w: float, h: float, fill: str, extra: str = ''):
        self.parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" fill="{fill}"'
            f'{" " + extra if extra else ""}/>'
        )

    def line(self, x1: float, y1: float, x2: float, y2: float, stroke: str = '#000000',
             width: float = 1.0):
        self.parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{stroke}" stroke-width="{width:.2f}"/>'
        )

    def text(self, x: float, y: float, string: str, size: int = 11, anchor: str = 'middle'):
        escaped = string.replace('&', '&amp;').replace('<', '&lt;').replace('>', '&gt;')
        self.parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-family="sans-serif" font-size="{size}" '
            f'text-anchor="{anchor}">{escaped}</text>'
        )

    def polygon(self, points: Sequence[Tuple[float, float]], fill: str):
        coords = ' '.join(f"{x:.2f},{y:.2f}" for x, y in points)
        self.parts.append(f'<polygon points="{coords}" fill="{fill}"/>')

    def to_bytes(self) -> bytes:
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">\n'
        )
        return (head + '\n'.join(self.parts) + '\n</svg>\n').encode('utf-8')


def _draw_colorbar(canvas: SvgCanvas, x: float, y: float, height: float, width: float,
                   cmap: ColorMap, steps: int = 50):
    """Vertical colorbar, S=1 at the top, ticks every 0.2"""
    step = height / steps
    for k in range(steps):
        s = 1.0 - (k + 0.5) / steps
        canvas.rect(x, y + k * step, width, step, _hex(cmap.color(s)))
    for tick in range(6):
        s = tick / 5
        ty = y + (1.0 - s) * height
        canvas.line(x + width, ty, x + width + 3, ty)
        canvas.text(x + width + 5, ty + 4, f"{s:.1f}", size=9, anchor='start')
    canvas.text(x + width / 2, y - 6, 'S(i,j)', size=10)


def _draw_cells(canvas: SvgCanvas, cells: np.ndarray, x0: float, y0: float, cell: float,
                cmap: ColorMap):
    n = cells.shape[0]
    for i in range(n):
        for j in range(n):
            canvas.rect(x0 + j * cell, y0 + i * cell, cell, cell,
                        _hex(cmap.color(float(cells[i, j]))))


def _svg_frame(core: int, layout: CompositeLayout) -> Tuple[SvgCanvas, float, float]:
    margin = layout.margin
    top = margin + (16 if layout.title else 0)
    width = margin + core + 12 + layout.colorbar_width + 32
    height = top + core + margin
    canvas = SvgCanvas(width, height)
    if layout.title:
        canvas.text(margin + core / 2, margin, layout.title, size=13)
    return canvas, margin, top


def composite_svg(m_oo: SimilarityMatrix, m_op: SimilarityMatrix, m_pp: SimilarityMatrix,
                  layout: CompositeLayout = CompositeLayout(),
                  cmap: ColorMap = DEFAULT_COLORMAP) -> bytes:
    check_same_speakers(m_oo, m_op, m_pp)
    cell = layout.cell_size
    half = m_oo.n * cell
    sep = layout.separator
    core = 2 * half + sep
    canvas, x0, y0 = _svg_frame(core, layout)

    canvas.rect(x0, y0, core, core, _hex(SEPARATOR_RGB))
    _draw_cells(canvas, m_oo.cells, x0, y0, cell, cmap)
    _draw_cells(canvas, m_op.cells, x0 + half + sep, y0, cell, cmap)
    _draw_cells(canvas, m_op.cells.T, x0, y0 + half + sep, cell, cmap)
    _draw_cells(canvas, m_pp.cells, x0 + half + sep, y0 + half + sep, cell, cmap)

    for k, tag in enumerate(('O', 'P')):
        centre = k * (half + sep) + half / 2
        canvas.text(x0 + centre, y0 + core + 14, tag)
        canvas.text(x0 - 10, y0 + centre + 4, tag)
    _draw_colorbar(canvas, x0 + core + 12, y0, core, layout.colorbar_width, cmap)
    return canvas.to_bytes()


def render_composite(m_oo: SimilarityMatrix, m_op: SimilarityMatrix, m_pp: SimilarityMatrix,
                     layout: CompositeLayout = CompositeLayout(), fmt: str = 'ppm',
                     cmap: ColorMap = DEFAULT_COLORMAP) -> bytes:
    """Composite quadrant view as PPM (P6) or SVG bytes"""
    if fmt == 'ppm':
        return encode_ppm(composite_raster(m_oo, m_op, m_pp, layout, cmap))
    if fmt == 'svg':
        return composite_svg(m_oo, m_op, m_pp, layout, cmap)
    raise ValueError(f"unknown image format {fmt!r}")


def render_single(m: SimilarityMatrix, layout: CompositeLayout = CompositeLayout(),
                  fmt: str = 'ppm', cmap: ColorMap = DEFAULT_COLORMAP) -> bytes:
    """One matrix on its own, without separators"""
    if fmt == 'ppm':
        return encode_ppm(_matrix_raster(m.cells, layout.cell_size, cmap))
    if fmt == 'svg':
        core = m.n * layout.cell_size
        canvas, x0, y0 = _svg_frame(core, layout)
        _draw_cells(canvas, m.cells, x0, y0, layout.cell_size, cmap)
        canvas.text(x0 + core / 2, y0 + core + 14, m.kind.value[1])
        canvas.text(x0 - 10, y0 + core / 2 + 4, m.kind.value[0])
        _draw_colorbar(canvas, x0 + core + 12, y0, core, layout.colorbar_width, cmap)
        return canvas.to_bytes()
    raise ValueError(f"unknown image format {fmt!r}")


class ScatterPoint(NamedTuple):
    label: str
    system: str
    deid_percent: Optional[float]
    gvd_db: Optional[float]


_MARKERS = (('triangle', '#1f4fd1'), ('square', '#d11414'), ('circle', '#2a8a2a'))


def render_scatter(points: Sequence[ScatterPoint], width: int = 420, height: int = 320) -> bytes:
    """DeID (x, percent) against G_VD (y, dB), one marker shape per system"""
    plotted = [p for p in points
               if p.deid_percent is not None and p.gvd_db is not None and math.isfinite(p.gvd_db)]
    for p in points:
        if p not in plotted:
            logger.warning(f"Skipping {p.system}/{p.label} in scatter: metric undefined or -inf")

    x_lo = min([0.0] + [p.deid_percent for p in plotted])
    x_hi = max([100.0] + [p.deid_percent for p in plotted])
    y_lo = math.floor(min([-15.0] + [p.gvd_db for p in plotted]))
    y_hi = math.ceil(max([5.0] + [p.gvd_db for p in plotted]))

    left, right, top, bottom = 50, 110, 20, 40
    plot_w, plot_h = width - left - right, height - top - bottom
    canvas = SvgCanvas(width, height)

    def to_xy(deid: float, gvd: float) -> Tuple[float, float]:
        x = left + (deid - x_lo) / (x_hi - x_lo) * plot_w
        y = top + (y_hi - gvd) / (y_hi - y_lo) * plot_h
        return x, y

    canvas.line(left, top + plot_h, left + plot_w, top + plot_h)
    canvas.line(left, top, left, top + plot_h)
    zero_y = to_xy(x_lo, 0.0)[1]
    canvas.line(left, zero_y, left + plot_w, zero_y, stroke='#999999', width=0.5)
    for k in range(6):
        value = x_lo + k * (x_hi - x_lo) / 5
        x, _ = to_xy(value, y_lo)
        canvas.text(x, top + plot_h + 14, f"{value:.0f}", size=9)
    for value in range(int(y_lo), int(y_hi) + 1, 5 if y_hi - y_lo > 10 else 1):
        _, y = to_xy(x_lo, value)
        canvas.text(left - 6, y + 3, str(value), size=9, anchor='end')
    canvas.text(left + plot_w / 2, height - 6, 'DeID [%]', size=11)
    canvas.text(14, top + plot_h / 2, 'G_VD [dB]', size=11)

    systems = list(dict.fromkeys(p.system for p in points))
    for index, system in enumerate(systems):
        shape, colour = _MARKERS[index % len(_MARKERS)]
        for p in plotted:
            if p.system != system:
                continue
            x, y = to_xy(p.deid_percent, p.gvd_db)
            _draw_marker(canvas, shape, x, y, colour)
            canvas.text(x + 6, y - 4, p.label, size=8, anchor='start')
        legend_y = top + 12 + 16 * index
        _draw_marker(canvas, shape, left + plot_w + 14, legend_y - 3, colour)
        canvas.text(left + plot_w + 24, legend_y, system, size=10, anchor='start')
    return canvas.to_bytes()


def _draw_marker(canvas: SvgCanvas, shape: str, x: float, y: float, colour: str, r: float = 4.0):
    if shape == 'triangle':
        canvas.polygon([(x, y - r), (x - r, y + r), (x + r, y + r)], colour)
    elif shape == 'square':
        canvas.rect(x - r, y - r, 2 * r, 2 * r, colour)
    else:
        canvas.polygon([(x + r * math.cos(a), y + r * math.sin(a))
                        for a in (k * math.pi / 4 for k in range(8))], colour)
