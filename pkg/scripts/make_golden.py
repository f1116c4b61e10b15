#!/usr/bin/env python3
"""
Rewrite the golden files under tests/golden/ from their fixed synthetic
configurations. Review the diff before committing.
"""

import argparse
import json
import sys
from pathlib import Path

# Add parent directory to path so we can import voicesim modules
sys.path.insert(0, str(Path(__file__).parent.parent))

from voicesim.cohort import format_utt2spk
from voicesim.heatmap import CompositeLayout, render_composite
from voicesim.models import Domain
from voicesim.similarity import export_matrix, parse_matrix
from voicesim.synth import (
    SynthConfig,
    SynthScenario,
    generate,
    pipeline_matrices,
    regime_violations,
    run_pipeline,
)

GOLDEN_DIR = Path(__file__).parent.parent / 'tests' / 'golden'

COMPOSITE_CONFIG = SynthConfig(
    n_speakers=2,
    segments_per_speaker=2,
    embedding_dim=16,
    within_speaker_std=0.01,
    scenario=SynthScenario.IDEAL,
    seed=7,
)
MANIFEST_CONFIG = SynthConfig(n_speakers=2, segments_per_speaker=2, seed=7)
REGIME_SEEDS = list(range(10))
# nop and the orthogonal pseudo-voices of ideal/collapse are exact; the rest are bounds
REGIMES = {
    SynthScenario.NOP: {'deid_percent': {'equals': 0.0}, 'gvd_db': {'equals': 0.0}, 'flags': []},
    SynthScenario.IDEAL: {'deid_percent': {'equals': 100.0}, 'gvd_db': {'min': -1.0, 'max': 1.0}},
    SynthScenario.COLLAPSE: {'deid_percent': {'equals': 100.0}, 'gvd_db': {'max': -10.0}},
}


def composite_golden() -> bytes:
    matrices = pipeline_matrices(generate(COMPOSITE_CONFIG))
    reparsed = [parse_matrix(export_matrix(m)) for m in matrices]
    return render_composite(*reparsed, CompositeLayout(cell_size=1), fmt='ppm')


def manifest_goldens() -> dict:
    manifest = generate(MANIFEST_CONFIG).manifest
    return {
        'utt2spk_o': format_utt2spk(manifest, Domain.ORIGINAL),
        'utt2spk_p': format_utt2spk(manifest, Domain.PROTECTED),
    }


def regime_golden() -> str:
    defaults = SynthConfig()
    golden = {
        'config': {
            name: getattr(defaults, name)
            for name in ('n_speakers', 'segments_per_speaker', 'embedding_dim',
                         'between_speaker_std', 'within_speaker_std')
        },
        'seeds': REGIME_SEEDS,
        'scenarios': {scenario.value: regime for scenario, regime in REGIMES.items()},
    }
    return json.dumps(golden, indent=2) + '\n'


def check_regimes() -> int:
    """Run every golden scenario and seed through the pipeline; returns the failure count"""
    failures = 0
    for scenario, regime in REGIMES.items():
        for seed in REGIME_SEEDS:
            result = run_pipeline(generate(SynthConfig(scenario=scenario, seed=seed)))
            problems = regime_violations(result, regime)
            if problems:
                failures += 1
                print(f"❌ {scenario.value} seed {seed}: {'; '.join(problems)}")
        print(f"📊 {scenario.value}: checked {len(REGIME_SEEDS)} seeds")
    return failures


def main():
    parser = argparse.ArgumentParser(description='Regenerate golden test files')
    parser.add_argument('--check', action='store_true',
                        help='Only report which golden files differ')
    args = parser.parse_args()

    files = {'ideal_n2_composite.ppm': composite_golden()}
    files.update({name: text.encode('utf-8') for name, text in manifest_goldens().items()})
    files['scenario_regimes.json'] = regime_golden().encode('utf-8')

    stale = 0
    for name, data in files.items():
        path = GOLDEN_DIR / name
        current = path.read_bytes() if path.exists() else None
        if current == data:
            print(f"✓ {name} up to date")
            continue
        stale += 1
        if args.check:
            print(f"⚠️  {name} differs")
        else:
            path.write_bytes(data)
            print(f"✅ Wrote {name}")

    failures = check_regimes()
    if failures:
        print(f"⚠️  {failures} scenario runs outside their golden regime")
    if (args.check and stale) or failures:
        sys.exit(1)


if __name__ == "__main__":
    main()
