"""
Trial-score and embedding files, and the cosine stand-in scorer.
"""
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from voicesim.errors import (
    AmbiguousSegment,
    DimensionMismatch,
    DuplicateSegment,
    DuplicateTrial,
    MalformedLine,
    UnknownSegment,
    ZeroNormVector,
)
from voicesim.records import parse_number, records
from voicesim.models import (
    CohortManifest,
    Domain,
    EmbeddingTable,
    Label,
    MatrixKind,
    ScoreSet,
    SegmentId,
    Trial,
)

logger = logging.getLogger(__name__)


def read_input(path: Union[str, Path]) -> str:
    """
    Read a UTF-8 input file.

    Raises:
        MalformedLine: the file is not valid UTF-8 (line of the first bad byte)
    """
    data = Path(path).read_bytes()
    try:
        return data.decode('utf-8')
    except UnicodeDecodeError as e:
        raise MalformedLine(f"{path}: not valid UTF-8 at byte {e.start}",
                            line=data[:e.start].count(b'\n') + 1, path=str(path))


def _resolve(manifest: CohortManifest, segment: SegmentId, domain: Optional[Domain],
             line_no: int) -> Domain:
    if domain is not None:
        if manifest.speaker_of(segment, domain) is None:
            raise UnknownSegment(
                f"line {line_no}: segment {segment!r} is not in the {domain.name.lower()} manifest",
                segment=segment, line=line_no)
        return domain
    found = manifest.domains_of(segment)
    if not found:
        raise UnknownSegment(f"line {line_no}: segment {segment!r} is not in the manifest",
                             segment=segment, line=line_no)
    if len(found) > 1:
        raise AmbiguousSegment(
            f"line {line_no}: segment {segment!r} exists in both domains; pass the score set kind",
            segment=segment, line=line_no)
    return found[0]


def label_trial(manifest: CohortManifest, trial: Trial) -> Label:
    same = (manifest.speaker_of(trial.left, trial.left_domain)
            == manifest.speaker_of(trial.right, trial.right_domain))
    return Label.TARGET if same else Label.IMPOSTOR


def make_score_set(kind: MatrixKind, trials: Iterable[Trial], manifest: CohortManifest) -> ScoreSet:
    trials = tuple(trials)
    return ScoreSet(kind=kind, trials=trials,
                    labels=tuple(label_trial(manifest, t) for t in trials))


def parse_scores(lines: str, manifest: CohortManifest,
                 kind: Optional[MatrixKind] = None) -> List[ScoreSet]:
    """
    Parse `<seg-left> <seg-right> <score>` lines into the OO, OP and PP sets.

    With `kind` given, the left column belongs to the first domain of the kind
    and the right column to the second; otherwise each segment's domain is
    looked up in the manifest. Returns the three sets in OO, OP, PP order
    (unused kinds are empty).
    """
    buckets: Dict[MatrixKind, List[Trial]] = {k: [] for k in MatrixKind}
    seen = set()

    for line_no, fields in records(lines):
        if len(fields) != 3:
            raise MalformedLine(f"expected 3 fields, got {len(fields)}", line=line_no)
        left, right, token = fields
        score = parse_number(token, line_no)

        fixed_left, fixed_right = kind.domains if kind else (None, None)
        left_domain = _resolve(manifest, left, fixed_left, line_no)
        right_domain = _resolve(manifest, right, fixed_right, line_no)

        key = (left, left_domain, right, right_domain)
        if key in seen:
            raise DuplicateTrial(f"line {line_no}: trial {left} {right} listed twice",
                                 line=line_no, left=left, right=right)
        seen.add(key)

        trial_kind = MatrixKind.for_domains(left_domain, right_domain)
        if trial_kind == MatrixKind.OP and left_domain == Domain.PROTECTED:
            # OP trials are stored original-first
            left, right = right, left
            left_domain, right_domain = right_domain, left_domain
        buckets[trial_kind].append(Trial(left, right, score, left_domain, right_domain))

    sets = [make_score_set(k, buckets[k], manifest) for k in MatrixKind]
    logger.debug("Parsed scores: " + ', '.join(f"{s.kind.value}={len(s)}" for s in sets))
    return sets


def parse_embeddings(lines: str, domain: Optional[Domain] = None) -> EmbeddingTable:
    """Parse `<seg-id> v1 ... vd` lines"""
    rows: Dict[SegmentId, np.ndarray] = {}
    dim = None
    for line_no, fields in records(lines):
        if len(fields) < 2:
            raise MalformedLine("expected a segment id followed by at least one value", line=line_no)
        segment, values = fields[0], fields[1:]
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise DimensionMismatch(f"expected {dim} values, got {len(values)}", line=line_no)
        if segment in rows:
            raise DuplicateSegment(f"line {line_no}: segment {segment!r} listed twice",
                                   segment=segment, line=line_no)
        rows[segment] = np.array([parse_number(v, line_no, field='embedding value') for v in values],
                                 dtype=np.float64)
    return EmbeddingTable(rows=rows, domain=domain)


def format_embeddings(table: EmbeddingTable) -> str:
    return ''.join(
        segment + ' ' + ' '.join(repr(float(v)) for v in vector) + '\n'
        for segment, vector in table.rows.items()
    )


def _lookup(table: EmbeddingTable, segment: SegmentId) -> np.ndarray:
    if segment not in table:
        raise UnknownSegment(f"segment {segment!r} has no embedding", segment=segment)
    return table.vector(segment)


def score_cosine(table: EmbeddingTable, pairs: Sequence[Tuple[SegmentId, SegmentId]],
                 scale: float = 1.0, right_table: Optional[EmbeddingTable] = None) -> List[Trial]:
    """
    Score segment pairs with scale * cosine similarity.

    Left segments are looked up in `table`, right segments in `right_table`
    (defaults to `table`). Trial domains come from the tables.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")
    right_table = table if right_table is None else right_table
    left_domain = table.domain or Domain.ORIGINAL
    right_domain = right_table.domain or left_domain

    norms: Dict[Tuple[int, SegmentId], float] = {}

    def norm_of(which: EmbeddingTable, segment: SegmentId) -> float:
        key = (id(which), segment)
        if key not in norms:
            value = float(np.sqrt(np.sum(_lookup(which, segment) ** 2)))
            if value == 0.0:
                raise ZeroNormVector(f"segment {segment!r} has a zero-norm embedding",
                                     segment=segment)
            norms[key] = value
        return norms[key]

    trials = []
    for left, right in pairs:
        x, y = _lookup(table, left), _lookup(right_table, right)
        if len(x) != len(y):
            raise DimensionMismatch(f"embeddings of {left!r} and {right!r} differ in dimension")
        dot = float(np.sum(x * y))
        cosine = dot / (norm_of(table, left) * norm_of(right_table, right))
        # +0.0 folds -0.0 into 0.0 so orthogonal pairs tie exactly
        trials.append(Trial(left, right, scale * cosine + 0.0, left_domain, right_domain))
    return trials
