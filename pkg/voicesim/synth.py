"""
Synthetic cohorts for exercising the evaluation chain end to end.

Speakers are Gaussian voices in the leading half of the embedding space.
Protected segments are derived per scenario:

    nop       copies of the original embeddings
    collapse  every speaker mapped onto one shared pseudo-voice, segments
              spread around it by collapse_std (within_speaker_std by default)
    ideal     every speaker mapped onto its own fresh pseudo-voice
    shift     originals plus a shared deterministic offset

Pseudo-voices of the collapse and ideal scenarios live in the trailing half
of the space, so they are orthogonal to every original voice.

The module also carries the brute-force oracles used by the test-suite: an
exhaustive isotonic search, a min-max isotonic formula and a nested-loop
similarity computation that shares nothing with the main pipeline past the
cosine scores.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from voicesim.calibration import calibrate_set, count_epsilon, logit
from voicesim.cohort import build_manifest
from voicesim.errors import InvalidConfig, TooLargeForOracle
from voicesim.metrics import report
from voicesim.models import (
    CohortManifest,
    Domain,
    EmbeddingTable,
    ManifestEntry,
    MatrixKind,
    MetricsReport,
    SegmentId,
    SimilarityMatrix,
    Trial,
)
from voicesim.score_ingest import make_score_set, score_cosine
from voicesim.similarity import build_all

logger = logging.getLogger(__name__)

ORACLE_MAX_SPEAKERS = 4
ORACLE_MAX_SEGMENTS = 3
PROTECTED_SUFFIX = '-p'

Pair = Tuple[SegmentId, SegmentId]


class SynthScenario(Enum):
    NOP = 'nop'
    COLLAPSE = 'collapse'
    IDEAL = 'ideal'
    SHIFT = 'shift'


@dataclass(frozen=True)
class SynthConfig:
    n_speakers: int = 10
    segments_per_speaker: int = 5
    embedding_dim: int = 16
    between_speaker_std: float = 1.0
    within_speaker_std: float = 0.1
    scenario: SynthScenario = SynthScenario.NOP
    seed: int = 0
    # offset per leading dimension, in units of between_speaker_std
    shift_scale: float = 0.5
    # per-segment spread around the shared collapse pseudo-voice; None uses within_speaker_std
    collapse_std: Optional[float] = None

    @property
    def collapse_spread(self) -> float:
        return self.within_speaker_std if self.collapse_std is None else self.collapse_std


@dataclass(frozen=True)
class SynthCohort:
    config: SynthConfig
    manifest: CohortManifest
    embeddings_o: EmbeddingTable
    embeddings_p: EmbeddingTable


def speaker_name(index: int) -> str:
    return f"spk{index:02d}"


def segment_name(speaker: int, position: int, domain: Domain = Domain.ORIGINAL) -> SegmentId:
    name = f"{speaker_name(speaker)}-seg{position:02d}"
    return name + PROTECTED_SUFFIX if domain == Domain.PROTECTED else name


def validate_config(config: SynthConfig):
    """
    Raises:
        InvalidConfig: with the offending field in its context
    """
    checks = [
        (config.n_speakers >= 2, 'n_speakers', "at least 2 speakers are needed"),
        (config.segments_per_speaker >= 2, 'segments_per_speaker',
         "at least 2 segments per speaker are needed"),
        (config.embedding_dim >= 1, 'embedding_dim', "embedding_dim must be positive"),
        (config.between_speaker_std > 0, 'between_speaker_std', "std must be positive"),
        (config.within_speaker_std > 0, 'within_speaker_std', "std must be positive"),
        (math.isfinite(config.shift_scale), 'shift_scale', "shift_scale must be finite"),
        (config.collapse_std is None or config.collapse_std >= 0, 'collapse_std',
         "collapse_std must not be negative"),
        (isinstance(config.scenario, SynthScenario), 'scenario', "unknown scenario"),
        (0 <= config.seed < 2 ** 64, 'seed', "seed must be a 64-bit unsigned integer"),
    ]
    for ok, name, message in checks:
        if not ok:
            raise InvalidConfig(f"{message} (got {getattr(config, name)!r})", field=name)
    if config.scenario in (SynthScenario.COLLAPSE, SynthScenario.IDEAL) and config.embedding_dim < 2:
        raise InvalidConfig(f"the {config.scenario.value} scenario needs embedding_dim >= 2",
                            field='embedding_dim')


def generate(config: SynthConfig) -> SynthCohort:
    """Draw a cohort; one PCG64 stream seeded with config.seed, consumed in a fixed order"""
    validate_config(config)
    rng = np.random.default_rng(config.seed)
    n, segs, dim = config.n_speakers, config.segments_per_speaker, config.embedding_dim
    voice_dims = (dim + 1) // 2
    pseudo_dims = dim - voice_dims

    means = np.zeros((n, dim))
    means[:, :voice_dims] = rng.normal(0.0, config.between_speaker_std, (n, voice_dims))
    original = np.repeat(means[:, None, :], segs, axis=1)
    original[:, :, :voice_dims] += rng.normal(0.0, config.within_speaker_std, (n, segs, voice_dims))

    scenario = config.scenario
    if scenario == SynthScenario.NOP:
        protected = original.copy()
    elif scenario == SynthScenario.SHIFT:
        protected = original.copy()
        protected[:, :, :voice_dims] += config.shift_scale * config.between_speaker_std
    else:
        protected = np.zeros_like(original)
        if scenario == SynthScenario.COLLAPSE:
            pseudo = np.repeat(rng.normal(0.0, config.between_speaker_std, (1, pseudo_dims)), n, axis=0)
            spread = config.collapse_spread
        else:
            pseudo = rng.normal(0.0, config.between_speaker_std, (n, pseudo_dims))
            spread = config.within_speaker_std
        protected[:, :, voice_dims:] = pseudo[:, None, :]
        if spread > 0:
            protected[:, :, voice_dims:] += rng.normal(0.0, spread, (n, segs, pseudo_dims))

    entries = []
    rows_o: Dict[SegmentId, np.ndarray] = {}
    rows_p: Dict[SegmentId, np.ndarray] = {}
    for domain, rows, values in ((Domain.ORIGINAL, rows_o, original),
                                 (Domain.PROTECTED, rows_p, protected)):
        for i in range(n):
            for k in range(segs):
                segment = segment_name(i, k, domain)
                entries.append(ManifestEntry(segment, speaker_name(i), domain))
                rows[segment] = values[i, k].copy()

    logger.info(f"Generated {scenario.value} cohort: {n} speakers x {segs} segments, "
                f"dim {dim}, seed {config.seed}")
    return SynthCohort(
        config=config,
        manifest=build_manifest(entries),
        embeddings_o=EmbeddingTable(rows_o, Domain.ORIGINAL),
        embeddings_p=EmbeddingTable(rows_p, Domain.PROTECTED),
    )


def trial_pairs(cohort: SynthCohort) -> Dict[MatrixKind, List[Pair]]:
    """
    Exhaustive trial lists.

    OO and PP hold every ordered pair of distinct segments; OP pairs every
    original segment with every protected segment except the one derived
    from it.
    """
    manifest = cohort.manifest
    slots_o = [(e.segment, manifest.slot_of(e.segment, e.domain))
               for e in manifest.entries if e.domain == Domain.ORIGINAL]
    slots_p = [(e.segment, manifest.slot_of(e.segment, e.domain))
               for e in manifest.entries if e.domain == Domain.PROTECTED]

    def cross(left, right):
        return [(a, b) for a, slot_a in left for b, slot_b in right if slot_a != slot_b]

    return {
        MatrixKind.OO: cross(slots_o, slots_o),
        MatrixKind.OP: cross(slots_o, slots_p),
        MatrixKind.PP: cross(slots_p, slots_p),
    }


def score_trials(cohort: SynthCohort, scale: float = 1.0) -> Dict[MatrixKind, List[Trial]]:
    pairs = trial_pairs(cohort)
    return {
        MatrixKind.OO: score_cosine(cohort.embeddings_o, pairs[MatrixKind.OO], scale),
        MatrixKind.OP: score_cosine(cohort.embeddings_o, pairs[MatrixKind.OP], scale,
                                    right_table=cohort.embeddings_p),
        MatrixKind.PP: score_cosine(cohort.embeddings_p, pairs[MatrixKind.PP], scale),
    }


def pipeline_matrices(cohort: SynthCohort, scale: float = 1.0
                      ) -> Tuple[SimilarityMatrix, SimilarityMatrix, SimilarityMatrix]:
    trials = score_trials(cohort, scale)
    calibrated = [
        calibrate_set(make_score_set(kind, trials[kind], cohort.manifest))
        for kind in MatrixKind
    ]
    return build_all(cohort.manifest, calibrated)


def run_pipeline(cohort: SynthCohort, scale: float = 1.0) -> MetricsReport:
    """score_cosine -> calibrate_set -> build_all -> report"""
    m_oo, m_op, m_pp = pipeline_matrices(cohort, scale)
    return report(m_oo, m_op, m_pp, set_name=cohort.config.scenario.value)


def regime_violations(result: MetricsReport, regime: Dict[str, Any]) -> List[str]:
    """
    Compare a report against one scenario entry of the regime golden file.

    Each metric maps to any of `equals`, `min` and `max`; `flags` is the
    sorted list of expected flag names. Returns one message per broken bound.
    """
    problems = []
    for key in ('deid_percent', 'gvd_db'):
        bounds = regime.get(key)
        if not bounds:
            continue
        value = getattr(result, key)
        if value is None:
            problems.append(f"{key} is undefined")
            continue
        if 'equals' in bounds and value != bounds['equals']:
            problems.append(f"{key} = {value!r}, expected {bounds['equals']!r}")
        if 'min' in bounds and not value >= bounds['min']:
            problems.append(f"{key} = {value!r} below {bounds['min']!r}")
        if 'max' in bounds and not value <= bounds['max']:
            problems.append(f"{key} = {value!r} above {bounds['max']!r}")
    if 'flags' in regime:
        flags = sorted(flag.value for flag in result.flags)
        if flags != regime['flags']:
            problems.append(f"flags = {flags}, expected {regime['flags']}")
    return problems


# Oracles

def _pooled_groups(scores: Sequence[float], targets: Sequence[float]):
    groups: Dict[float, List[float]] = {}
    for s, t in zip(scores, targets):
        groups.setdefault(s, [0.0, 0.0])
        groups[s][0] += t
        groups[s][1] += 1.0
    keys = sorted(groups)
    return keys, [groups[k][0] for k in keys], [groups[k][1] for k in keys]


def exhaustive_isotonic(scores: Sequence[float], targets: Sequence[float]) -> Dict[float, float]:
    """
    Least-squares non-decreasing fit by trying every contiguous partition
    of the tie-pooled scores. Exponential; meant for a dozen distinct scores.
    """
    keys, hits, counts = _pooled_groups(scores, targets)
    g = len(keys)
    best_cost, best_fit = math.inf, None
    for cuts in itertools.product((False, True), repeat=g - 1):
        bounds = [0] + [k + 1 for k, cut in enumerate(cuts) if cut] + [g]
        means = []
        cost = 0.0
        for lo, hi in zip(bounds, bounds[1:]):
            total, weight = sum(hits[lo:hi]), sum(counts[lo:hi])
            mean = total / weight
            means.append(mean)
            # squared error of 0/1 labels around the block mean
            cost += total * (1.0 - mean) ** 2 + (weight - total) * mean ** 2
        if any(a > b for a, b in zip(means, means[1:])):
            continue
        if cost < best_cost:
            best_cost = cost
            best_fit = [m for (lo, hi), m in zip(zip(bounds, bounds[1:]), means) for _ in range(lo, hi)]
    return dict(zip(keys, best_fit))


def minmax_isotonic(scores: Sequence[float], targets: Sequence[float]) -> Dict[float, float]:
    """Isotonic fit via fit_k = max_{i<=k} min_{j>=k} mean(i..j)"""
    keys, hits, counts = _pooled_groups(scores, targets)
    g = len(keys)
    fit = [-math.inf] * g
    for i in range(g):
        total = weight = 0.0
        means = []
        for j in range(i, g):
            total += hits[j]
            weight += counts[j]
            means.append(total / weight)
        # suffix minimum: min over j >= k of mean(i..j)
        running = math.inf
        suffix = [0.0] * len(means)
        for idx in range(len(means) - 1, -1, -1):
            running = min(running, means[idx])
            suffix[idx] = running
        for k in range(i, g):
            fit[k] = max(fit[k], suffix[k - i])
    return dict(zip(keys, fit))


def _oracle_llrs(trials: Sequence[Trial], same: Sequence[bool]) -> List[float]:
    targets = [1.0 if s else 0.0 for s in same]
    fit = minmax_isotonic([t.raw_score for t in trials], targets)
    n = len(trials)
    eps = count_epsilon(n)
    prior = math.log(sum(targets) / n) - math.log(1.0 - sum(targets) / n)
    llrs = []
    for t in trials:
        p = min(max(fit[t.raw_score], eps), 1.0 - eps)
        llrs.append(math.log(p / (1.0 - p)) - prior)
    return llrs


def brute_force_similarity(cohort: SynthCohort, scale: float = 1.0
                           ) -> Tuple[SimilarityMatrix, SimilarityMatrix, SimilarityMatrix]:
    """
    Similarity matrices by direct enumeration: each cell averages the llrs of
    every admissible ordered segment pair between the two speakers, in both
    directions, and takes the plain logistic of that mean.
    """
    config = cohort.config
    if config.n_speakers > ORACLE_MAX_SPEAKERS or config.segments_per_speaker > ORACLE_MAX_SEGMENTS:
        raise TooLargeForOracle(
            f"oracle is limited to {ORACLE_MAX_SPEAKERS} speakers x "
            f"{ORACLE_MAX_SEGMENTS} segments",
            n_speakers=config.n_speakers, segments=config.segments_per_speaker)

    n, segs = config.n_speakers, config.segments_per_speaker
    speakers = tuple(speaker_name(i) for i in range(n))
    trials = score_trials(cohort, scale)
    matrices = []
    for kind in MatrixKind:
        kind_trials = trials[kind]
        owner = {}
        for t in kind_trials:
            owner[t.left] = t.left.split('-')[0]
            owner[t.right] = t.right.split('-')[0]
        same = [owner[t.left] == owner[t.right] for t in kind_trials]
        llr = {(t.left, t.right): v for t, v in zip(kind_trials, _oracle_llrs(kind_trials, same))}
        left_domain, right_domain = kind.domains

        cells = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                values = []
                for a in range(segs):
                    for b in range(segs):
                        if i == j and a == b:
                            continue
                        forward = (segment_name(i, a, left_domain), segment_name(j, b, right_domain))
                        backward = (segment_name(j, b, left_domain), segment_name(i, a, right_domain))
                        values.append(llr[forward])
                        values.append(llr[backward])
                mean = sum(values) / len(values)
                cells[i, j] = 1.0 / (1.0 + math.exp(-mean))
        matrices.append(SimilarityMatrix(kind=kind, speakers=speakers, cells=cells))
    return tuple(matrices)
