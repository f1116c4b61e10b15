from pathlib import Path

from voicesim.cli.evaluate import SCORE_ARGS, UTT2SPK_ARGS, add_input_arguments, input_paths
from voicesim.cli.progress import progress_callback
from voicesim.cli.run_config import RunConfig
from voicesim.errors import EXIT_OK, UsageError
from voicesim.models import Domain, MatrixKind
from voicesim.services.evaluation_service import EvaluationService

KINDS = {kind.value.lower(): kind for kind in MatrixKind}


def register(subparsers, parents):
    parser = subparsers.add_parser(
        'calibrate', parents=parents,
        help='Oracle-calibrate score files into llr files (llr_oo.txt, llr_op.txt, llr_pp.txt)'
    )
    add_input_arguments(parser)
    parser.add_argument('--scores', type=Path,
                        help='Calibrate this one score file instead of all three (needs --kind)')
    parser.add_argument('--kind', choices=sorted(KINDS),
                        help='Trial kind of --scores; only llr_<kind>.txt is written')
    parser.set_defaults(handler=run)


def single_file_inputs(args) -> dict:
    if args.kind is None:
        raise UsageError("calibrate: --scores needs --kind", argument='kind')
    explicit = [SCORE_ARGS[k] for k in MatrixKind if getattr(args, SCORE_ARGS[k].replace('-', '_'))]
    if explicit:
        raise UsageError(f"calibrate: --scores cannot be combined with --{explicit[0]}",
                         argument=explicit[0])
    paths = {name: path for name, path in input_paths(args).items()
             if name in UTT2SPK_ARGS.values()}
    paths['scores'] = args.scores
    return paths


def run(args) -> int:
    if args.scores is not None:
        inputs = single_file_inputs(args)
    elif args.kind is not None:
        raise UsageError("calibrate: --kind only applies with --scores", argument='kind')
    else:
        inputs = input_paths(args)
    run_config = RunConfig(
        subcommand='calibrate',
        inputs=inputs,
        out_dir=args.out_dir,
        verbose=args.verbose,
    ).check_inputs()

    if args.scores is not None:
        score_files = {KINDS[args.kind]: run_config.inputs['scores']}
    else:
        score_files = {kind: run_config.inputs[SCORE_ARGS[kind]] for kind in MatrixKind}

    service = EvaluationService(
        progress_callback=progress_callback,
        epsilon=args.epsilon,
        prior_mode=args.prior_mode,
    )
    calibrated = service.calibrate_files(
        score_files,
        run_config.inputs[UTT2SPK_ARGS[Domain.ORIGINAL]],
        run_config.inputs[UTT2SPK_ARGS[Domain.PROTECTED]],
    )
    service.write_calibrated(calibrated, run_config.out_dir)
    return EXIT_OK
