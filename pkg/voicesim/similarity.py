"""
Voice similarity matrices.

Cell (i, j) is the sigmoid of the mean calibrated llr over all admissible
segment pairs between speaker i and speaker j. Pairs are keyed by segment
slots (speaker index, position within that speaker's segment list), so the
two orientations of a comparison always land on one key and are averaged
into a single contribution before the cell mean is taken.
"""
import logging
import math
from collections import defaultdict
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from voicesim import config
from voicesim.errors import EmptyCell, MalformedLine, SpeakerOrderMismatch, UnknownSegment
from voicesim.models import (
    CalibratedTrial,
    CohortManifest,
    MatrixKind,
    SimilarityMatrix,
)

logger = logging.getLogger(__name__)

CELL_PRECISION = 6
# Largest double strictly below 1.0; cells stay inside the open interval
_CELL_MAX = math.nextafter(1.0, 0.0)
_CELL_MIN = math.nextafter(0.0, 1.0)

Slot = Tuple[int, int]


def sigmoid(y: float) -> float:
    if y >= 0:
        return 1.0 / (1.0 + math.exp(-y))
    z = math.exp(y)
    return z / (1.0 + z)


def _pair_key(manifest: CohortManifest, kind: MatrixKind,
              trial: CalibratedTrial) -> Optional[Tuple[Slot, Slot]]:
    """Unordered slot pair for a trial, or None when the pair is excluded"""
    left_domain, right_domain = trial.left_domain, trial.right_domain
    if MatrixKind.for_domains(left_domain, right_domain) != kind:
        raise UnknownSegment(
            f"trial {trial.left} {trial.right} does not belong to a {kind.value} matrix")
    for segment, domain in ((trial.left, left_domain), (trial.right, right_domain)):
        if manifest.speaker_of(segment, domain) is None:
            raise UnknownSegment(f"segment {segment!r} is not in the manifest", segment=segment)

    if kind != MatrixKind.OP and trial.left == trial.right:
        # the same segment compared with itself
        return None
    left = manifest.slot_of(trial.left, left_domain)
    right = manifest.slot_of(trial.right, right_domain)
    return (left, right) if left <= right else (right, left)


def build_matrix(kind: MatrixKind, manifest: CohortManifest,
                 trials: Sequence[CalibratedTrial], *,
                 exclude_op_self_pairs: Optional[bool] = None) -> SimilarityMatrix:
    """
    Build one voice similarity matrix from calibrated trials.

    Raises:
        EmptyCell: a speaker pair without any admissible llr
    """
    if exclude_op_self_pairs is None:
        exclude_op_self_pairs = config.EXCLUDE_OP_SELF_PAIRS

    contributions: Dict[Tuple[Slot, Slot], List[float]] = defaultdict(list)
    excluded = 0
    for trial in trials:
        key = _pair_key(manifest, kind, trial)
        if key is None or (kind == MatrixKind.OP and exclude_op_self_pairs and key[0] == key[1]):
            excluded += 1
            continue
        contributions[key].append(trial.llr)

    n = manifest.n_speakers
    per_cell: Dict[Tuple[int, int], List[float]] = defaultdict(list)
    self_pairs: Dict[int, int] = defaultdict(int)
    for (left, right), llrs in contributions.items():
        if left == right:
            self_pairs[left[0]] += 1
        pair_llr = math.fsum(llrs) / len(llrs)
        i, j = left[0], right[0]
        per_cell[(i, j)].append(pair_llr)
        if i != j:
            per_cell[(j, i)].append(pair_llr)

    cells = np.empty((n, n), dtype=np.float64)
    counts = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            values = per_cell.get((i, j))
            if not values:
                raise EmptyCell(
                    f"no admissible llr for speakers "
                    f"{manifest.speaker_order[i]!r}/{manifest.speaker_order[j]!r} in {kind.value}",
                    row=i, column=j, kind=kind.value)
            mean_llr = math.fsum(values) / len(values)
            cells[i, j] = min(max(sigmoid(mean_llr), _CELL_MIN), _CELL_MAX)
            # cells count ordered pairs: a same-speaker slot pair stands for both orders
            counts[i, j] = 2 * len(values) - self_pairs[i] if i == j else len(values)

    logger.debug(f"Built {kind.value} matrix: {n} speakers, {len(contributions)} pairs, "
                 f"{excluded} excluded trials")
    return SimilarityMatrix(kind=kind, speakers=manifest.speaker_order, cells=cells,
                            pair_counts=counts)


def build_all(manifest: CohortManifest, calibrated_sets: Sequence[Sequence[CalibratedTrial]], *,
              exclude_op_self_pairs: Optional[bool] = None
              ) -> Tuple[SimilarityMatrix, SimilarityMatrix, SimilarityMatrix]:
    """Build M_OO, M_OP and M_PP from calibrated sets given in that order"""
    if len(calibrated_sets) != 3:
        raise ValueError("expected calibrated OO, OP and PP sets")
    return tuple(
        build_matrix(kind, manifest, trials, exclude_op_self_pairs=exclude_op_self_pairs)
        for kind, trials in zip(MatrixKind, calibrated_sets)
    )


def check_same_speakers(*matrices: SimilarityMatrix):
    first = matrices[0].speakers
    for m in matrices[1:]:
        if m.speakers != first:
            raise SpeakerOrderMismatch(
                f"{m.kind.value} matrix speaker order differs from {matrices[0].kind.value}")


def export_matrix(m: SimilarityMatrix) -> str:
    """Tab-separated table: kind + speaker header, then one row per speaker"""
    lines = ['\t'.join([m.kind.value, *m.speakers])]
    for speaker, row in zip(m.speakers, m.cells):
        lines.append('\t'.join([speaker, *(f"{v:.{CELL_PRECISION}f}" for v in row)]))
    return '\n'.join(lines) + '\n'


def parse_matrix(text: str) -> SimilarityMatrix:
    rows = [line.split('\t') for line in text.splitlines() if line.strip()]
    if not rows:
        raise MalformedLine("matrix table is empty", line=1)
    header = rows[0]
    try:
        kind = MatrixKind(header[0])
    except ValueError:
        raise MalformedLine(f"unknown matrix kind {header[0]!r}", line=1)
    speakers = tuple(header[1:])
    if len(rows) - 1 != len(speakers):
        raise MalformedLine(f"expected {len(speakers)} rows, got {len(rows) - 1}", line=len(rows))

    cells = []
    for line_no, (speaker, row) in enumerate(zip(speakers, rows[1:]), 2):
        if row[0] != speaker or len(row) != len(speakers) + 1:
            raise MalformedLine(f"row does not match header for speaker {speaker!r}", line=line_no)
        try:
            cells.append([float(v) for v in row[1:]])
        except ValueError:
            raise MalformedLine("non-numeric cell", line=line_no)
    try:
        return SimilarityMatrix(kind=kind, speakers=speakers, cells=np.array(cells))
    except ValueError as e:
        raise MalformedLine(str(e))
