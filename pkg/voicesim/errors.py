from typing import Any, Dict, Optional

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class VoiceSimError(Exception):
    """Base class for every error raised by voicesim"""
    exit_code = EXIT_INTERNAL

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable form written to stderr by the CLI"""
        payload = {
            'error': type(self).__name__,
            'message': self.message,
            'exit_code': self.exit_code,
        }
        payload.update({k: v for k, v in self.context.items() if v is not None})
        return payload


class UsageError(VoiceSimError):
    """Raised when the command line is inconsistent (e.g. missing input files)"""
    exit_code = EXIT_USAGE


class DataError(VoiceSimError):
    """Base class for problems with the evaluated data"""
    exit_code = EXIT_DATA


# cohort

class EmptyInput(DataError):
    """Raised when a manifest or file has no usable lines"""


class DuplicateSegment(DataError):
    """Raised when the same segment id appears twice within one domain"""


class UnknownSpeaker(DataError):
    """Raised when a speaker is not part of the manifest"""


class SpeakerSetMismatch(DataError):
    """Raised when the Original and Protected domains hold different speakers"""


# score_ingest

class MalformedLine(DataError):
    """Raised when a line does not follow the documented file grammar"""

    def __init__(self, message: str, line: Optional[int] = None, **context: Any):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, line=line, **context)
        self.line = line


class UnknownSegment(DataError):
    """Raised when a segment id cannot be resolved"""


class AmbiguousSegment(DataError):
    """Raised when a segment id exists in both domains and no kind was given"""


class NonFiniteScore(MalformedLine):
    """Raised when a score or embedding value is NaN or infinite"""


class DuplicateTrial(DataError):
    """Raised when the same ordered segment pair is listed twice"""


class DimensionMismatch(MalformedLine):
    """Raised when embedding rows do not share one dimension"""


class ZeroNormVector(DataError):
    """Raised when cosine scoring meets an all-zero embedding"""


# calibration

class DegenerateLabels(DataError):
    """Raised when a score set lacks either Target or Impostor trials"""


class LengthMismatch(DataError):
    """Raised when scores and labels have different lengths"""


# similarity / metrics

class EmptyCell(DataError):
    """Raised when a speaker pair has no admissible llr to average"""


class TooFewSpeakers(DataError):
    """Raised when D_diag is asked for on fewer than two speakers"""


class ZeroDdiagOO(DataError):
    """Raised when D_diag(M_OO) is zero and DeID / G_VD are undefined"""


class SpeakerOrderMismatch(DataError):
    """Raised when matrices are not built over the same speaker order"""


# heatmap / synth

class OutOfRange(DataError):
    """Raised when a similarity value lies outside [0, 1]"""


class InvalidConfig(DataError):
    """Raised when a synthetic configuration is not usable"""


class TooLargeForOracle(DataError):
    """Raised when a cohort is too big for the brute-force oracle"""


class ScoreOutsideTrainingSupport(UserWarning):
    """Warned when a calibration map is applied to a score it was not fit on"""
