"""
Line and field grammar shared by the whitespace-separated input files.

    file    = *( line LF ) [ line ]        ; a CR before the LF is dropped
    line    = *SEP [ field *( 1*SEP field ) *SEP ]
    SEP     = SP / HTAB
    field   = 1*( any character except SP, HTAB, CR, LF )
    number  = [ "+" / "-" ] ( 1*DIGIT [ "." *DIGIT ] / "." 1*DIGIT )
              [ ( "e" / "E" ) [ "+" / "-" ] 1*DIGIT ]

DIGIT is ASCII 0-9 only. Lines holding only separators are skipped.
"""
import math
import re
from typing import Iterator, List, Tuple

from voicesim.errors import MalformedLine, NonFiniteScore

SEPARATORS = re.compile(r'[ \t]+')
NUMBER = re.compile(r'[+-]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?')
NON_FINITE = re.compile(r'[+-]?(?:inf|infinity|nan)', re.IGNORECASE)


def records(text: str) -> Iterator[Tuple[int, List[str]]]:
    """Yield (1-based line number, fields) for every non-blank line"""
    lines = text.split('\n')
    if lines and lines[-1] == '':
        lines.pop()
    for line_no, line in enumerate(lines, 1):
        if line.endswith('\r'):
            line = line[:-1]
        if '\r' in line:
            raise MalformedLine("carriage return inside a line", line=line_no)
        line = line.strip(' \t')
        if line:
            yield line_no, SEPARATORS.split(line)


def parse_number(token: str, line_no: int, field: str = 'score') -> float:
    if NON_FINITE.fullmatch(token):
        raise NonFiniteScore(f"{field} is not finite: {token!r}", line=line_no, field=field)
    if not NUMBER.fullmatch(token):
        raise MalformedLine(f"{field} is not a number: {token!r}", line=line_no, field=field)
    value = float(token)
    if not math.isfinite(value):
        # overflow, e.g. 1e999
        raise NonFiniteScore(f"{field} is not finite: {token!r}", line=line_no, field=field)
    return value
