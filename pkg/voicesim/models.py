from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Optional, Tuple

import numpy as np

SegmentId = str
SpeakerId = str


class Domain(Enum):
    ORIGINAL = 'O'
    PROTECTED = 'P'

    @classmethod
    def parse(cls, tag: str) -> 'Domain':
        """Accept 'O'/'P' as well as the spelled-out names"""
        lowered = tag.strip().lower()
        if lowered in ('o', 'original'):
            return cls.ORIGINAL
        if lowered in ('p', 'protected'):
            return cls.PROTECTED
        raise ValueError(f"Unknown domain tag: {tag!r}")


class MatrixKind(Enum):
    OO = 'OO'
    OP = 'OP'
    PP = 'PP'

    @property
    def domains(self) -> Tuple[Domain, Domain]:
        return {
            MatrixKind.OO: (Domain.ORIGINAL, Domain.ORIGINAL),
            MatrixKind.OP: (Domain.ORIGINAL, Domain.PROTECTED),
            MatrixKind.PP: (Domain.PROTECTED, Domain.PROTECTED),
        }[self]

    @classmethod
    def for_domains(cls, left: Domain, right: Domain) -> 'MatrixKind':
        if left == right:
            return cls.OO if left == Domain.ORIGINAL else cls.PP
        return cls.OP


class Label(Enum):
    TARGET = 1
    IMPOSTOR = 0


@dataclass(frozen=True)
class ManifestEntry:
    segment: SegmentId
    speaker: SpeakerId
    domain: Domain


@dataclass(frozen=True)
class CohortManifest:
    """Segment -> speaker bookkeeping for both domains.

    Build instances with cohort.build_manifest, which enforces the
    invariants; the lookups below are derived once and never mutated.
    """
    entries: Tuple[ManifestEntry, ...]
    speaker_order: Tuple[SpeakerId, ...]
    _speaker_of: Dict[Tuple[Domain, SegmentId], SpeakerId] = field(
        init=False, repr=False, compare=False)
    _segments: Dict[Tuple[SpeakerId, Domain], Tuple[SegmentId, ...]] = field(
        init=False, repr=False, compare=False)
    _index: Dict[SpeakerId, int] = field(init=False, repr=False, compare=False)
    _position: Dict[Tuple[Domain, SegmentId], int] = field(
        init=False, repr=False, compare=False)

    def __post_init__(self):
        speaker_of = {}
        segments: Dict[Tuple[SpeakerId, Domain], list] = {}
        for entry in self.entries:
            speaker_of[(entry.domain, entry.segment)] = entry.speaker
            segments.setdefault((entry.speaker, entry.domain), []).append(entry.segment)
        object.__setattr__(self, '_speaker_of', speaker_of)
        object.__setattr__(self, '_segments', {k: tuple(v) for k, v in segments.items()})
        object.__setattr__(self, '_index', {s: i for i, s in enumerate(self.speaker_order)})
        position = {
            (domain, seg): pos
            for (_, domain), segs in segments.items()
            for pos, seg in enumerate(segs)
        }
        for (speaker, domain), segs in segments.items():
            originals = segments.get((speaker, Domain.ORIGINAL), [])
            # shared ids pair each protected segment with its own original
            if domain == Domain.PROTECTED and set(segs) == set(originals):
                for seg in segs:
                    position[(domain, seg)] = position[(Domain.ORIGINAL, seg)]
        object.__setattr__(self, '_position', position)

    @property
    def n_speakers(self) -> int:
        return len(self.speaker_order)

    @property
    def domains(self) -> FrozenSet[Domain]:
        return frozenset(entry.domain for entry in self.entries)

    def has_speaker(self, speaker: SpeakerId) -> bool:
        return speaker in self._index

    def speaker_index(self, speaker: SpeakerId) -> int:
        return self._index[speaker]

    def speaker_of(self, segment: SegmentId, domain: Domain) -> Optional[SpeakerId]:
        return self._speaker_of.get((domain, segment))

    def domains_of(self, segment: SegmentId) -> Tuple[Domain, ...]:
        return tuple(d for d in Domain if (d, segment) in self._speaker_of)

    def segments(self, speaker: SpeakerId, domain: Domain) -> Tuple[SegmentId, ...]:
        return self._segments.get((speaker, domain), ())

    def slot_of(self, segment: SegmentId, domain: Domain) -> Tuple[int, int]:
        """
        (speaker index, position of the segment within that speaker's list).

        A protected segment whose id also names one of the speaker's original
        segments takes that original's position, whatever order utt2spk_p
        lists them in; otherwise both lists are paired by position.
        """
        speaker = self._speaker_of[(domain, segment)]
        return self._index[speaker], self._position[(domain, segment)]


@dataclass(frozen=True)
class Trial:
    left: SegmentId
    right: SegmentId
    raw_score: float
    left_domain: Domain
    right_domain: Domain


@dataclass(frozen=True)
class ScoreSet:
    kind: MatrixKind
    trials: Tuple[Trial, ...]
    labels: Tuple[Label, ...]

    @property
    def n_targets(self) -> int:
        return sum(1 for label in self.labels if label == Label.TARGET)

    @property
    def n_impostors(self) -> int:
        return len(self.labels) - self.n_targets

    def scores(self) -> np.ndarray:
        return np.array([t.raw_score for t in self.trials], dtype=np.float64)

    def __len__(self) -> int:
        return len(self.trials)


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    rows: Dict[SegmentId, np.ndarray]
    domain: Optional[Domain] = None

    @property
    def dim(self) -> int:
        return len(next(iter(self.rows.values()))) if self.rows else 0

    def __len__(self) -> int:
        return len(self.rows)

    def __contains__(self, segment: SegmentId) -> bool:
        return segment in self.rows

    def vector(self, segment: SegmentId) -> np.ndarray:
        return self.rows[segment]


@dataclass(frozen=True)
class Breakpoint:
    score_low: float
    score_high: float
    posterior: float


@dataclass(frozen=True)
class CalibrationMap:
    breakpoints: Tuple[Breakpoint, ...]
    prior_log_odds: float
    epsilon: float


@dataclass(frozen=True)
class CalibratedTrial:
    left: SegmentId
    right: SegmentId
    llr: float
    left_domain: Domain = Domain.ORIGINAL
    right_domain: Domain = Domain.ORIGINAL


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    kind: MatrixKind
    speakers: Tuple[SpeakerId, ...]
    cells: np.ndarray
    pair_counts: Optional[np.ndarray] = None

    def __post_init__(self):
        cells = np.array(self.cells, dtype=np.float64)
        n = len(self.speakers)
        if cells.shape != (n, n):
            raise ValueError(f"cells must be {n}x{n}, got {cells.shape}")
        if not np.all((cells >= 0.0) & (cells <= 1.0)):
            raise ValueError("similarity cells must lie in [0, 1]")
        cells.setflags(write=False)
        object.__setattr__(self, 'cells', cells)
        if self.pair_counts is not None:
            counts = np.array(self.pair_counts, dtype=np.int64)
            if counts.shape != (n, n):
                raise ValueError(f"pair_counts must be {n}x{n}, got {counts.shape}")
            counts.setflags(write=False)
            object.__setattr__(self, 'pair_counts', counts)

    @property
    def n(self) -> int:
        return len(self.speakers)


class Flag(Enum):
    ASSUMPTION_VIOLATED_OP_GT_OO = 'AssumptionViolatedOPgtOO'
    ZERO_DDIAG_OO = 'ZeroDdiagOO'
    ZERO_DDIAG_PP = 'ZeroDdiagPP'


@dataclass(frozen=True)
class MetricsReport:
    ddiag_oo: float
    ddiag_op: float
    ddiag_pp: float
    deid_percent: Optional[float]
    gvd_db: Optional[float]
    flags: FrozenSet[Flag]
    n_speakers: int
    set_name: str = ''
