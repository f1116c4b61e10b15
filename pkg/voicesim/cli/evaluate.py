from pathlib import Path
from typing import Dict, List, Optional

from voicesim import config
from voicesim.cli.progress import progress_callback
from voicesim.cli.run_config import RunConfig
from voicesim.errors import EXIT_OK, UsageError
from voicesim.models import Domain, MatrixKind
from voicesim.services.evaluation_service import EvaluationService
from voicesim.services.simulation_service import UTT2SPK_FILES, scores_file

SCORE_ARGS = {kind: f"scores-{kind.value.lower()}" for kind in MatrixKind}
UTT2SPK_ARGS = {Domain.ORIGINAL: 'utt2spk-o', Domain.PROTECTED: 'utt2spk-p'}


def add_input_arguments(parser):
    for kind, name in SCORE_ARGS.items():
        parser.add_argument(f'--{name}', type=Path, help=f'{kind.value} trial scores')
    for domain, name in UTT2SPK_ARGS.items():
        parser.add_argument(f'--{name}', type=Path,
                            help=f'{domain.name.lower()} segment-to-speaker map')
    parser.add_argument(
        '--input-dir', type=Path,
        help='Directory written by `simulate`; fills in any input not given explicitly'
    )
    parser.add_argument('--out-dir', type=Path, default=Path(config.OUTPUT_DIR),
                        help=f'Output directory (default: {config.OUTPUT_DIR})')
    parser.add_argument('--epsilon', type=float, help='Fixed posterior clamp for calibration')
    parser.add_argument('--prior-mode', choices=('empirical', 'none'),
                        help='Prior removed from calibrated log-odds')


def input_paths(args) -> Dict[str, Optional[Path]]:
    defaults = {SCORE_ARGS[k]: scores_file(k) for k in MatrixKind}
    defaults.update({UTT2SPK_ARGS[d]: UTT2SPK_FILES[d] for d in Domain})
    paths = {}
    for name, default_name in defaults.items():
        path = getattr(args, name.replace('-', '_'))
        if path is None and args.input_dir is not None:
            path = args.input_dir / default_name
        paths[name] = path
    return paths


def score_paths(run: RunConfig) -> List[Path]:
    return [run.inputs[SCORE_ARGS[k]] for k in MatrixKind]


def register(subparsers, parents):
    parser = subparsers.add_parser(
        'evaluate', parents=parents,
        help='Compute similarity matrices, DeID and G_VD from three score files'
    )
    add_input_arguments(parser)
    parser.add_argument('--set-name', default='', help='Name stored in the report (e.g. ldtf)')
    parser.add_argument('--pre-calibrated', action='store_true',
                        help='Scores are already calibrated llrs; skip PAV')
    parser.add_argument('--exclude-op-self-pairs', action='store_true', default=None,
                        help='Drop original/protected pairs of the same segment slot')
    parser.add_argument('--cell-size', type=int, default=config.CELL_SIZE,
                        help='Heatmap pixels per matrix cell')
    parser.set_defaults(handler=run)


def check_cell_size(cell_size: int):
    if cell_size < 1:
        raise UsageError(f"--cell-size must be a positive integer, got {cell_size}")


def run(args) -> int:
    check_cell_size(args.cell_size)
    run_config = RunConfig(
        subcommand='evaluate',
        inputs=input_paths(args),
        out_dir=args.out_dir,
        verbose=args.verbose,
    ).check_inputs()

    service = EvaluationService(
        progress_callback=progress_callback,
        epsilon=args.epsilon,
        prior_mode=args.prior_mode,
        exclude_op_self_pairs=args.exclude_op_self_pairs,
    )
    result = service.evaluate_files(
        score_paths(run_config),
        run_config.inputs[UTT2SPK_ARGS[Domain.ORIGINAL]],
        run_config.inputs[UTT2SPK_ARGS[Domain.PROTECTED]],
        pre_calibrated=args.pre_calibrated,
        set_name=args.set_name,
    )
    service.write_evaluation(result, run_config.out_dir, cell_size=args.cell_size)
    return EXIT_OK
