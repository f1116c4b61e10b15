import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from voicesim import config
from voicesim.calibration import as_calibrated, calibrate_set, format_calibrated
from voicesim.cohort import manifest_from_utt2spk
from voicesim.errors import EmptyInput, UnknownSegment
from voicesim.heatmap import CompositeLayout, render_composite
from voicesim.metrics import report, report_to_json
from voicesim.models import (
    CalibratedTrial,
    CohortManifest,
    MatrixKind,
    MetricsReport,
    ScoreSet,
    SimilarityMatrix,
)
from voicesim.score_ingest import parse_scores, read_input
from voicesim.services.output_writer import AtomicOutputs
from voicesim.similarity import build_matrix, export_matrix, parse_matrix

logger = logging.getLogger(__name__)

METRICS_FILE = 'metrics.json'
COMPOSITE_STEM = 'composite'


def matrix_file(kind: MatrixKind) -> str:
    return f"{kind.value.lower()}.mat.txt"


def llr_file(kind: MatrixKind) -> str:
    return f"llr_{kind.value.lower()}.txt"


@dataclass(frozen=True)
class EvaluationResult:
    report: MetricsReport
    matrices: Tuple[SimilarityMatrix, SimilarityMatrix, SimilarityMatrix]
    calibrated: Tuple[List[CalibratedTrial], ...]


class EvaluationService:
    def __init__(self, progress_callback: Optional[Callable] = None,
                 workers: Optional[int] = None,
                 epsilon: Optional[float] = None,
                 prior_mode: Optional[str] = None,
                 exclude_op_self_pairs: Optional[bool] = None):
        self.progress_callback = progress_callback or self._default_progress
        self.workers = workers or config.WORKERS
        self.epsilon = epsilon
        self.prior_mode = prior_mode
        self.exclude_op_self_pairs = exclude_op_self_pairs

    def _default_progress(self, event: str, data: Dict[str, Any]):
        """Default progress callback that does nothing"""
        pass

    def _emit(self, event: str, data: Dict[str, Any]):
        """Emit a progress event"""
        self.progress_callback(event, data)

    def load_manifest(self, utt2spk_o: Union[str, Path], utt2spk_p: Union[str, Path]) -> CohortManifest:
        self._emit('status', {'message': f'Reading cohort from {utt2spk_o} and {utt2spk_p}'})
        manifest = manifest_from_utt2spk(read_input(utt2spk_o), read_input(utt2spk_p))
        self._emit('manifest_loaded', {
            'speakers': manifest.n_speakers,
            'segments': len(manifest.entries),
        })
        return manifest

    def load_score_set(self, path: Union[str, Path], kind: MatrixKind,
                       manifest: CohortManifest) -> ScoreSet:
        """
        Read one score file that should only hold `kind` trials.

        Segment domains are inferred from the manifest unless some segment
        id is used in both domains, in which case the columns are read in
        the kind's domain order.
        """
        text = read_input(path)
        shared_ids = any(len(manifest.domains_of(e.segment)) > 1 for e in manifest.entries)
        sets = parse_scores(text, manifest, kind=kind if shared_ids else None)
        for other in sets:
            if other.kind != kind and len(other):
                first = other.trials[0]
                raise UnknownSegment(
                    f"{path}: {kind.value} score file holds {other.kind.value} trial "
                    f"{first.left} {first.right}", path=str(path))
        score_set = sets[list(MatrixKind).index(kind)]
        if not len(score_set):
            raise EmptyInput(f"{path}: no trials", path=str(path))
        self._emit('scores_loaded', {
            'kind': kind.value,
            'trials': len(score_set),
            'targets': score_set.n_targets,
        })
        return score_set

    def calibrate(self, score_set: ScoreSet, pre_calibrated: bool = False) -> List[CalibratedTrial]:
        if pre_calibrated:
            return as_calibrated(score_set)
        return calibrate_set(score_set, epsilon=self.epsilon, prior_mode=self.prior_mode)

    def _process(self, score_set: ScoreSet, manifest: CohortManifest,
                 pre_calibrated: bool) -> Tuple[List[CalibratedTrial], SimilarityMatrix]:
        calibrated = self.calibrate(score_set, pre_calibrated)
        matrix = build_matrix(score_set.kind, manifest, calibrated,
                              exclude_op_self_pairs=self.exclude_op_self_pairs)
        self._emit('matrix_built', {'kind': score_set.kind.value, 'speakers': matrix.n})
        return calibrated, matrix

    def evaluate(self, manifest: CohortManifest, score_sets: Sequence[ScoreSet],
                 pre_calibrated: bool = False, set_name: str = '') -> EvaluationResult:
        """Calibrate the OO, OP and PP sets concurrently, build matrices and score them"""
        self._emit('status', {'message': 'Calibrating score sets and building similarity matrices...'})
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            futures = [pool.submit(self._process, s, manifest, pre_calibrated) for s in score_sets]
            # results are gathered in OO, OP, PP order whatever the completion order
            outcomes = [f.result() for f in futures]

        calibrated = tuple(c for c, _ in outcomes)
        matrices = tuple(m for _, m in outcomes)
        metrics = report(*matrices, set_name=set_name)
        self._emit('metrics', {
            'deid_percent': metrics.deid_percent,
            'gvd_db': metrics.gvd_db,
            'flags': sorted(f.value for f in metrics.flags),
        })
        return EvaluationResult(report=metrics, matrices=matrices, calibrated=calibrated)

    def evaluate_files(self, score_paths: Sequence[Union[str, Path]],
                       utt2spk_o: Union[str, Path], utt2spk_p: Union[str, Path],
                       pre_calibrated: bool = False, set_name: str = '') -> EvaluationResult:
        manifest = self.load_manifest(utt2spk_o, utt2spk_p)
        score_sets = [self.load_score_set(path, kind, manifest)
                      for path, kind in zip(score_paths, MatrixKind)]
        return self.evaluate(manifest, score_sets, pre_calibrated=pre_calibrated, set_name=set_name)

    def write_evaluation(self, result: EvaluationResult, out_dir: Union[str, Path],
                         cell_size: Optional[int] = None) -> List[Path]:
        """
        Write metrics.json, the three matrix tables and the composite PPM/SVG.

        Images are drawn from the exported tables, so running `render` on
        those tables later reproduces the images byte for byte.
        """
        layout = CompositeLayout(cell_size=cell_size or config.CELL_SIZE,
                                 title=result.report.set_name or None)
        tables = [export_matrix(m) for m in result.matrices]
        reparsed = [parse_matrix(t) for t in tables]

        with AtomicOutputs(out_dir) as outputs:
            outputs.stage(METRICS_FILE, report_to_json(result.report))
            for m, table in zip(result.matrices, tables):
                outputs.stage(matrix_file(m.kind), table)
            for fmt in ('ppm', 'svg'):
                outputs.stage(f"{COMPOSITE_STEM}.{fmt}", render_composite(*reparsed, layout, fmt=fmt))
        self._emit('written', {'out_dir': str(out_dir), 'files': [p.name for p in outputs.written]})
        return outputs.written

    def calibrate_files(self, score_paths: Mapping[MatrixKind, Union[str, Path]],
                        utt2spk_o: Union[str, Path], utt2spk_p: Union[str, Path]
                        ) -> Dict[MatrixKind, List[CalibratedTrial]]:
        """Oracle-calibrate one or more score files, keyed by kind, without building matrices"""
        manifest = self.load_manifest(utt2spk_o, utt2spk_p)
        kinds = [kind for kind in MatrixKind if kind in score_paths]
        score_sets = [self.load_score_set(score_paths[kind], kind, manifest) for kind in kinds]
        self._emit('status', {'message': 'Calibrating score sets...'})
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return dict(zip(kinds, pool.map(self.calibrate, score_sets)))

    def write_calibrated(self, calibrated: Mapping[MatrixKind, List[CalibratedTrial]],
                         out_dir: Union[str, Path]) -> List[Path]:
        with AtomicOutputs(out_dir) as outputs:
            for kind, trials in calibrated.items():
                outputs.stage(llr_file(kind), format_calibrated(trials))
        self._emit('written', {'out_dir': str(out_dir), 'files': [p.name for p in outputs.written]})
        return outputs.written
