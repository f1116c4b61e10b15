from pathlib import Path
from typing import List, Tuple

from voicesim import config
from voicesim.cli.run_config import RunConfig
from voicesim.errors import EXIT_OK, MalformedLine
from voicesim.heatmap import ScatterPoint, render_scatter
from voicesim.metrics import NEG_INF, report_from_json
from voicesim.models import MetricsReport
from voicesim.score_ingest import read_input
from voicesim.services.output_writer import AtomicOutputs

SUMMARY_FILE = 'summary.tsv'
SCATTER_FILE = 'scatter.svg'


def _split_system(arg: str) -> Tuple[str, Path]:
    """'SYSTEM=path' or a bare path, whose parent directory names the system"""
    system, sep, path = arg.partition('=')
    if not sep:
        path = Path(arg)
        return path.parent.name or 'system', path
    return system, Path(path)


def _cell(value) -> str:
    if value is None:
        return 'NA'
    if value == float('-inf'):
        return NEG_INF
    return f"{value:.2f}"


def summary_table(rows: List[Tuple[str, str, MetricsReport]]) -> str:
    lines = ['system\tset\tdeid_percent\tgvd_db\tflags']
    for system, label, r in rows:
        flags = ','.join(sorted(f.value for f in r.flags)) or '-'
        lines.append('\t'.join([system, label, _cell(r.deid_percent), _cell(r.gvd_db), flags]))
    return '\n'.join(lines) + '\n'


def register(subparsers, parents):
    parser = subparsers.add_parser(
        'summarize', parents=parents,
        help='Tabulate several metrics.json reports and plot DeID against G_VD'
    )
    parser.add_argument('reports', nargs='+',
                        help='metrics.json files, optionally as SYSTEM=path')
    parser.add_argument('--out-dir', type=Path, default=Path(config.OUTPUT_DIR),
                        help=f'Output directory (default: {config.OUTPUT_DIR})')
    parser.set_defaults(handler=run)


def run(args) -> int:
    specs = [_split_system(s) for s in args.reports]
    run_config = RunConfig(
        subcommand='summarize',
        inputs={f'report-{k}': path for k, (_, path) in enumerate(specs, 1)},
        out_dir=args.out_dir,
        verbose=args.verbose,
    ).check_inputs()

    rows = []
    for system, path in specs:
        try:
            r = report_from_json(read_input(path))
        except (ValueError, KeyError, TypeError) as e:
            raise MalformedLine(f"{path}: not a metrics report ({e})", path=str(path))
        rows.append((system, r.set_name or path.parent.name, r))

    points = [ScatterPoint(label, system, r.deid_percent, r.gvd_db) for system, label, r in rows]
    with AtomicOutputs(run_config.out_dir) as outputs:
        outputs.stage(SUMMARY_FILE, summary_table(rows))
        outputs.stage(SCATTER_FILE, render_scatter(points))
    print(f"📊 Summarised {len(rows)} reports into {run_config.out_dir}")
    return EXIT_OK
