"""
Cohort manifests: which segment belongs to which speaker, in which domain.
"""
import logging
from typing import Iterable, List, Sequence, Tuple, Union

from voicesim.errors import (
    DuplicateSegment,
    EmptyInput,
    MalformedLine,
    SpeakerSetMismatch,
    UnknownSpeaker,
)
from voicesim.models import CohortManifest, Domain, ManifestEntry, SegmentId, SpeakerId
from voicesim.records import records

logger = logging.getLogger(__name__)

EntryLike = Union[ManifestEntry, Tuple[SegmentId, SpeakerId, Domain]]


def _check_token(value: str, what: str):
    if not value or any(ch.isspace() for ch in value):
        raise MalformedLine(f"{what} must be a non-empty token without whitespace: {value!r}")


def build_manifest(mapping_lines: Sequence[EntryLike]) -> CohortManifest:
    """
    Build a manifest from (segment, speaker, domain) triples.

    Speakers are ordered by first appearance. When both domains are present
    they must contain the same set of speakers.
    """
    if not mapping_lines:
        raise EmptyInput("manifest has no entries")

    entries: List[ManifestEntry] = []
    seen = set()
    order: List[SpeakerId] = []
    speakers_by_domain = {Domain.ORIGINAL: set(), Domain.PROTECTED: set()}

    for item in mapping_lines:
        entry = item if isinstance(item, ManifestEntry) else ManifestEntry(*item)
        _check_token(entry.segment, 'segment id')
        _check_token(entry.speaker, 'speaker id')
        key = (entry.segment, entry.domain)
        if key in seen:
            raise DuplicateSegment(
                f"segment {entry.segment!r} listed twice in domain {entry.domain.value}",
                segment=entry.segment, domain=entry.domain.value)
        seen.add(key)
        if entry.speaker not in speakers_by_domain[Domain.ORIGINAL] | speakers_by_domain[Domain.PROTECTED]:
            order.append(entry.speaker)
        speakers_by_domain[entry.domain].add(entry.speaker)
        entries.append(entry)

    original, protected = speakers_by_domain[Domain.ORIGINAL], speakers_by_domain[Domain.PROTECTED]
    if original and protected and original != protected:
        missing = sorted(original ^ protected)
        raise SpeakerSetMismatch(
            f"speakers present in only one domain: {', '.join(missing)}",
            speakers=missing)

    logger.debug(f"Manifest built: {len(entries)} segments, {len(order)} speakers")
    return CohortManifest(entries=tuple(entries), speaker_order=tuple(order))


def segments_of(manifest: CohortManifest, speaker: SpeakerId, domain: Domain) -> List[SegmentId]:
    """Segments of one speaker in one domain, in manifest order"""
    if not manifest.has_speaker(speaker):
        raise UnknownSpeaker(f"speaker {speaker!r} is not in the manifest", speaker=speaker)
    return list(manifest.segments(speaker, domain))


def read_utt2spk(text: str, domain: Domain) -> List[ManifestEntry]:
    """Parse `<segment-id> <speaker-id>` lines for one domain"""
    entries = []
    for line_no, fields in records(text):
        if len(fields) != 2:
            raise MalformedLine(f"expected 2 fields, got {len(fields)}", line=line_no)
        entries.append(ManifestEntry(fields[0], fields[1], domain))
    return entries


def format_utt2spk(manifest: CohortManifest, domain: Domain) -> str:
    return ''.join(
        f"{e.segment} {e.speaker}\n" for e in manifest.entries if e.domain == domain
    )


def manifest_from_utt2spk(original_text: str, protected_text: str = '') -> CohortManifest:
    """Combine one utt2spk file per domain into a manifest"""
    return build_manifest(
        read_utt2spk(original_text, Domain.ORIGINAL) + read_utt2spk(protected_text, Domain.PROTECTED)
    )


def format_manifest(manifest: CohortManifest) -> str:
    """Serialise as `<segment> <speaker> <O|P>` lines"""
    return ''.join(f"{e.segment} {e.speaker} {e.domain.value}\n" for e in manifest.entries)


def parse_manifest(text: str) -> CohortManifest:
    entries = []
    for line_no, fields in records(text):
        if len(fields) != 3:
            raise MalformedLine(f"expected 3 fields, got {len(fields)}", line=line_no)
        try:
            domain = Domain.parse(fields[2])
        except ValueError as e:
            raise MalformedLine(str(e), line=line_no)
        entries.append(ManifestEntry(fields[0], fields[1], domain))
    return build_manifest(entries)


def reorder_speakers(manifest: CohortManifest, order: Iterable[SpeakerId]) -> CohortManifest:
    """Same entries with a caller-supplied speaker order"""
    order = tuple(order)
    if sorted(order) != sorted(manifest.speaker_order):
        raise UnknownSpeaker("speaker order must be a permutation of the manifest speakers")
    return CohortManifest(entries=manifest.entries, speaker_order=order)
