import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

from voicesim.cohort import format_utt2spk
from voicesim.models import Domain, MatrixKind
from voicesim.score_ingest import format_embeddings
from voicesim.services.output_writer import AtomicOutputs
from voicesim.synth import SynthCohort, SynthConfig, generate, score_trials, trial_pairs

logger = logging.getLogger(__name__)

UTT2SPK_FILES = {Domain.ORIGINAL: 'utt2spk_o', Domain.PROTECTED: 'utt2spk_p'}
EMBEDDING_FILES = {Domain.ORIGINAL: 'xvectors_o.txt', Domain.PROTECTED: 'xvectors_p.txt'}


def trials_file(kind: MatrixKind) -> str:
    return f"trials_{kind.value.lower()}"


def scores_file(kind: MatrixKind) -> str:
    return f"scores_{kind.value.lower()}"


class SimulationService:
    def __init__(self, progress_callback: Optional[Callable] = None):
        self.progress_callback = progress_callback or self._default_progress

    def _default_progress(self, event: str, data: Dict[str, Any]):
        """Default progress callback that does nothing"""
        pass

    def _emit(self, event: str, data: Dict[str, Any]):
        """Emit a progress event"""
        self.progress_callback(event, data)

    def simulate(self, synth_config: SynthConfig, out_dir: Union[str, Path],
                 scale: float = 1.0) -> List[Path]:
        """
        Generate a synthetic cohort and write it in the ingest formats:
        utt2spk per domain, embedding tables, exhaustive trial lists and
        their cosine scores.
        """
        self._emit('status', {'message': f'Generating {synth_config.scenario.value} cohort '
                                         f'(seed {synth_config.seed})...'})
        cohort = generate(synth_config)
        self._emit('cohort_generated', {
            'speakers': synth_config.n_speakers,
            'segments': len(cohort.manifest.entries),
        })
        return self.write_cohort(cohort, out_dir, scale)

    def write_cohort(self, cohort: SynthCohort, out_dir: Union[str, Path],
                     scale: float = 1.0) -> List[Path]:
        pairs = trial_pairs(cohort)
        trials = score_trials(cohort, scale)
        with AtomicOutputs(out_dir) as outputs:
            for domain, name in UTT2SPK_FILES.items():
                outputs.stage(name, format_utt2spk(cohort.manifest, domain))
            outputs.stage(EMBEDDING_FILES[Domain.ORIGINAL], format_embeddings(cohort.embeddings_o))
            outputs.stage(EMBEDDING_FILES[Domain.PROTECTED], format_embeddings(cohort.embeddings_p))
            for kind in MatrixKind:
                outputs.stage(trials_file(kind), ''.join(f"{a} {b}\n" for a, b in pairs[kind]))
                outputs.stage(scores_file(kind),
                              ''.join(f"{t.left} {t.right} {t.raw_score!r}\n" for t in trials[kind]))
                self._emit('trials_written', {'kind': kind.value, 'trials': len(pairs[kind])})
        self._emit('written', {'out_dir': str(out_dir), 'files': [p.name for p in outputs.written]})
        return outputs.written
