#!/usr/bin/env python3
"""
Run every synthetic scenario over a list of seeds and print DeID / G_VD.
"""

import argparse
import math
import sys
from pathlib import Path

# Add parent directory to path so we can import voicesim modules
sys.path.insert(0, str(Path(__file__).parent.parent))

from voicesim.synth import SynthConfig, SynthScenario, generate, run_pipeline


def _fmt(value) -> str:
    if value is None:
        return 'NA'
    if value == -math.inf:
        return '-inf'
    return f"{value:8.2f}"


def main():
    parser = argparse.ArgumentParser(description='DeID / G_VD of every synth scenario')
    parser.add_argument('--seeds', type=int, nargs='+', default=list(range(10)))
    parser.add_argument('--speakers', type=int, default=10)
    parser.add_argument('--segments', type=int, default=5)
    parser.add_argument('--scenarios', nargs='+', choices=[s.value for s in SynthScenario],
                        default=[s.value for s in SynthScenario])
    args = parser.parse_args()

    print("scenario\tseed\tdeid_percent\tgvd_db\tflags")
    for name in args.scenarios:
        for seed in args.seeds:
            config = SynthConfig(
                n_speakers=args.speakers,
                segments_per_speaker=args.segments,
                scenario=SynthScenario(name),
                seed=seed,
            )
            r = run_pipeline(generate(config))
            flags = ','.join(sorted(f.value for f in r.flags)) or '-'
            print(f"{name}\t{seed}\t{_fmt(r.deid_percent)}\t{_fmt(r.gvd_db)}\t{flags}")


if __name__ == "__main__":
    main()
