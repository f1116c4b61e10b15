from pathlib import Path

from voicesim import config
from voicesim.cli.evaluate import check_cell_size
from voicesim.cli.run_config import RunConfig
from voicesim.errors import EXIT_OK, UsageError
from voicesim.heatmap import CompositeLayout, render_composite, render_single
from voicesim.score_ingest import read_input
from voicesim.services.output_writer import AtomicOutputs
from voicesim.similarity import parse_matrix


def register(subparsers, parents):
    parser = subparsers.add_parser(
        'render', parents=parents,
        help='Draw the composite heatmap from three matrix tables (OO OP PP), or one table alone'
    )
    parser.add_argument('matrices', nargs='+', type=Path, help='Matrix tables written by evaluate')
    parser.add_argument('--out', type=Path, required=True, help='Image file to write')
    parser.add_argument('--format', dest='fmt', choices=('ppm', 'svg'),
                        help='Image format (default: from --out suffix, else ppm)')
    parser.add_argument('--cell-size', type=int, default=config.CELL_SIZE,
                        help='Pixels per matrix cell')
    parser.add_argument('--title', help='SVG title')
    parser.set_defaults(handler=run)


def run(args) -> int:
    if len(args.matrices) not in (1, 3):
        raise UsageError(f"render takes 1 or 3 matrix tables, got {len(args.matrices)}")
    check_cell_size(args.cell_size)
    fmt = args.fmt or ('svg' if args.out.suffix.lower() == '.svg' else 'ppm')
    run_config = RunConfig(
        subcommand='render',
        inputs={f'matrix-{k}': p for k, p in enumerate(args.matrices, 1)},
        out_dir=args.out.parent,
        fmt=fmt,
        verbose=args.verbose,
    ).check_inputs()

    matrices = [parse_matrix(read_input(path)) for path in args.matrices]
    layout = CompositeLayout(cell_size=args.cell_size, title=args.title)
    if len(matrices) == 1:
        image = render_single(matrices[0], layout, fmt=run_config.fmt)
    else:
        image = render_composite(*matrices, layout, fmt=run_config.fmt)

    with AtomicOutputs(run_config.out_dir) as outputs:
        outputs.stage(args.out.name, image)
    print(f"🖼️  Wrote {args.out}")
    return EXIT_OK
