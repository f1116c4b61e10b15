from pathlib import Path

from voicesim import config
from voicesim.cli.progress import progress_callback
from voicesim.cli.run_config import RunConfig
from voicesim.errors import EXIT_OK, UsageError
from voicesim.services.simulation_service import SimulationService
from voicesim.synth import SynthConfig, SynthScenario

DEFAULTS = SynthConfig()


def register(subparsers, parents):
    parser = subparsers.add_parser(
        'simulate', parents=parents,
        help='Write a synthetic cohort (utt2spk, embeddings, trials, scores) for evaluate'
    )
    parser.add_argument('--scenario', choices=[s.value for s in SynthScenario],
                        default=DEFAULTS.scenario.value)
    parser.add_argument('--seed', type=int, default=DEFAULTS.seed)
    parser.add_argument('--speakers', type=int, default=DEFAULTS.n_speakers)
    parser.add_argument('--segments', type=int, default=DEFAULTS.segments_per_speaker,
                        help='Segments per speaker')
    parser.add_argument('--dim', type=int, default=DEFAULTS.embedding_dim, help='Embedding dimension')
    parser.add_argument('--between-std', type=float, default=DEFAULTS.between_speaker_std)
    parser.add_argument('--within-std', type=float, default=DEFAULTS.within_speaker_std)
    parser.add_argument('--shift-scale', type=float, default=DEFAULTS.shift_scale)
    parser.add_argument('--collapse-std', type=float, default=DEFAULTS.collapse_std,
                        help='Per-segment spread around the collapse pseudo-voice (default: --within-std)')
    parser.add_argument('--scale', type=float, default=1.0, help='Cosine score scale')
    parser.add_argument('--out-dir', type=Path, default=Path(config.OUTPUT_DIR),
                        help=f'Output directory (default: {config.OUTPUT_DIR})')
    parser.set_defaults(handler=run)


def run(args) -> int:
    if not args.scale > 0:
        raise UsageError(f"--scale must be positive, got {args.scale}")
    run_config = RunConfig(subcommand='simulate', out_dir=args.out_dir, verbose=args.verbose)
    synth_config = SynthConfig(
        n_speakers=args.speakers,
        segments_per_speaker=args.segments,
        embedding_dim=args.dim,
        between_speaker_std=args.between_std,
        within_speaker_std=args.within_std,
        scenario=SynthScenario(args.scenario),
        seed=args.seed,
        shift_scale=args.shift_scale,
        collapse_std=args.collapse_std,
    )
    SimulationService(progress_callback=progress_callback).simulate(
        synth_config, run_config.out_dir, scale=args.scale)
    return EXIT_OK
