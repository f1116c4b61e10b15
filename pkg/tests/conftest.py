from pathlib import Path

import pytest

from voicesim.cohort import build_manifest
from voicesim.models import CalibratedTrial, Domain

GOLDEN_DIR = Path(__file__).parent / 'golden'

O, P = Domain.ORIGINAL, Domain.PROTECTED


def cohort_entries(n_speakers: int, segments: int, protected: bool = True):
    entries = []
    domains = (O, P) if protected else (O,)
    for domain in domains:
        suffix = '-p' if domain == P else ''
        for i in range(n_speakers):
            for k in range(segments):
                entries.append((f"s{i}-u{k}{suffix}", f"s{i}", domain))
    return entries


def all_pairs(manifest, left_domain, right_domain, skip_same_slot=True):
    left = [e.segment for e in manifest.entries if e.domain == left_domain]
    right = [e.segment for e in manifest.entries if e.domain == right_domain]
    pairs = []
    for a in left:
        for b in right:
            if skip_same_slot and manifest.slot_of(a, left_domain) == manifest.slot_of(b, right_domain):
                continue
            pairs.append((a, b))
    return pairs


def constant_trials(pairs, llr, left_domain=O, right_domain=O):
    return [CalibratedTrial(a, b, llr, left_domain, right_domain) for a, b in pairs]


@pytest.fixture
def manifest_3x2():
    """3 speakers, 2 segments each, in both domains"""
    return build_manifest(cohort_entries(3, 2))


@pytest.fixture
def manifest_2x2():
    return build_manifest(cohort_entries(2, 2))
