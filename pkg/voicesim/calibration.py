"""
Oracle calibration of verification scores with Pool-Adjacent-Violators.

Each score set is fitted and mapped on its own trials: tied scores are pooled
into one block, PAV makes the block target-rates non-decreasing, the rates
are clamped away from 0 and 1 and turned into prior-free log-likelihood-ratios.
"""
import bisect
import logging
import math
import warnings
from typing import List, Optional, Sequence

import numpy as np

from voicesim import config
from voicesim.errors import DegenerateLabels, LengthMismatch, ScoreOutsideTrainingSupport
from voicesim.models import Breakpoint, CalibratedTrial, CalibrationMap, Label, ScoreSet

logger = logging.getLogger(__name__)


def logit(p: float) -> float:
    return math.log(p) - math.log1p(-p)


def count_epsilon(n_trials: int) -> float:
    """Posterior clamp 1/(2(T+1)) for T trials"""
    return 1.0 / (2.0 * (n_trials + 1))


def _label_values(labels: Sequence) -> np.ndarray:
    values = []
    for label in labels:
        if isinstance(label, Label):
            values.append(float(label.value))
        else:
            values.append(1.0 if label else 0.0)
    return np.array(values, dtype=np.float64)


def pool_ties(scores: np.ndarray, targets: np.ndarray):
    """
    Sort scores ascending and merge equal scores.

    Returns (unique scores, target count per score, trial count per score).
    """
    unique, inverse, counts = np.unique(scores, return_inverse=True, return_counts=True)
    hits = np.bincount(inverse.ravel(), weights=targets, minlength=len(unique))
    return unique, hits, counts.astype(np.float64)


def pav_fit(scores: Sequence[float], labels: Sequence, *,
            epsilon: Optional[float] = None,
            prior_mode: Optional[str] = None) -> CalibrationMap:
    """
    Fit the isotonic (least-squares, non-decreasing) map from score to
    target posterior.

    Args:
        scores: raw scores
        labels: Label values (or truthy target flags)
        epsilon: posterior clamp; defaults to VOICESIM_CALIBRATION_EPSILON
            or, when unset, 1/(2(T+1))
        prior_mode: 'empirical' subtracts logit(#targets / T) from every llr,
            'none' keeps posterior log-odds

    Raises:
        LengthMismatch, DegenerateLabels
    """
    scores = np.asarray(scores, dtype=np.float64)
    targets = _label_values(labels)
    if len(scores) != len(targets):
        raise LengthMismatch(f"{len(scores)} scores but {len(targets)} labels")
    n_trials = len(scores)
    n_targets = int(targets.sum())
    if n_targets == 0 or n_targets == n_trials:
        raise DegenerateLabels(
            f"calibration needs both classes, got {n_targets} targets of {n_trials} trials",
            targets=n_targets, trials=n_trials)

    if epsilon is None:
        epsilon = config.CALIBRATION_EPSILON
    if epsilon is None:
        epsilon = count_epsilon(n_trials)
    prior_mode = prior_mode or config.PRIOR_MODE

    unique, hits, counts = pool_ties(scores, targets)

    # Each block: [low index, high index, target hits, trial count]
    blocks: List[list] = []
    for idx in range(len(unique)):
        blocks.append([idx, idx, hits[idx], counts[idx]])
        while len(blocks) > 1 and (
            blocks[-2][2] / blocks[-2][3] >= blocks[-1][2] / blocks[-1][3]
        ):
            top = blocks.pop()
            blocks[-1][1] = top[1]
            blocks[-1][2] += top[2]
            blocks[-1][3] += top[3]

    breakpoints = tuple(
        Breakpoint(
            score_low=float(unique[lo]),
            score_high=float(unique[hi]),
            posterior=min(max(hit / count, epsilon), 1.0 - epsilon),
        )
        for lo, hi, hit, count in blocks
    )
    prior_log_odds = logit(n_targets / n_trials) if prior_mode == 'empirical' else 0.0

    logger.debug(
        f"PAV fit: {n_trials} trials, {len(unique)} distinct scores, "
        f"{len(breakpoints)} blocks, prior log-odds {prior_log_odds:.4f}"
    )
    return CalibrationMap(breakpoints=breakpoints, prior_log_odds=prior_log_odds, epsilon=epsilon)


def _block_for(cmap: CalibrationMap, score: float) -> Breakpoint:
    highs = [bp.score_high for bp in cmap.breakpoints]
    pos = bisect.bisect_left(highs, score)
    if pos < len(highs) and cmap.breakpoints[pos].score_low <= score:
        return cmap.breakpoints[pos]

    if pos == 0:
        nearest = cmap.breakpoints[0]
    elif pos == len(highs):
        nearest = cmap.breakpoints[-1]
    else:
        below, above = cmap.breakpoints[pos - 1], cmap.breakpoints[pos]
        nearest = below if score - below.score_high <= above.score_low - score else above

    message = f"score {score!r} was not in the calibration set; using block at {nearest.score_low!r}"
    logger.warning(message)
    warnings.warn(message, ScoreOutsideTrainingSupport, stacklevel=3)
    return nearest


def pav_apply(cmap: CalibrationMap, trial_score: float) -> float:
    """Map a score to its calibrated llr"""
    return logit(_block_for(cmap, trial_score).posterior) - cmap.prior_log_odds


def calibrate_set(score_set: ScoreSet, *, epsilon: Optional[float] = None,
                  prior_mode: Optional[str] = None) -> List[CalibratedTrial]:
    """Fit PAV on a score set and map that same set (oracle calibration)"""
    scores = score_set.scores()
    cmap = pav_fit(scores, score_set.labels, epsilon=epsilon, prior_mode=prior_mode)
    logger.info(
        f"Calibrated {score_set.kind.value} set: {len(score_set)} trials "
        f"({score_set.n_targets} target), {len(cmap.breakpoints)} PAV blocks"
    )

    block_llrs = [logit(bp.posterior) - cmap.prior_log_odds for bp in cmap.breakpoints]
    highs = np.array([bp.score_high for bp in cmap.breakpoints])
    positions = np.searchsorted(highs, scores, side='left')

    calibrated = []
    for trial, pos in zip(score_set.trials, positions):
        if pos < len(highs) and cmap.breakpoints[pos].score_low <= trial.raw_score:
            llr = block_llrs[pos]
        else:
            llr = pav_apply(cmap, trial.raw_score)
        calibrated.append(
            CalibratedTrial(trial.left, trial.right, llr, trial.left_domain, trial.right_domain))
    return calibrated


def as_calibrated(score_set: ScoreSet) -> List[CalibratedTrial]:
    """Treat raw scores as already-calibrated llrs"""
    return [
        CalibratedTrial(t.left, t.right, t.raw_score, t.left_domain, t.right_domain)
        for t in score_set.trials
    ]


def format_calibrated(trials: Sequence[CalibratedTrial]) -> str:
    """Three-column `<left> <right> <llr>` text, floats in shortest round-trip form"""
    return ''.join(f"{t.left} {t.right} {t.llr!r}\n" for t in trials)
