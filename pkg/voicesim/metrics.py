"""
Pseudonymisation metrics derived from diagonal dominance.
"""
import json
import logging
import math
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Optional, Set, Tuple

from voicesim.errors import TooFewSpeakers, ZeroDdiagOO
from voicesim.models import Flag, MetricsReport, SimilarityMatrix
from voicesim.similarity import check_same_speakers

logger = logging.getLogger(__name__)

REPORT_PRECISION = 6
NEG_INF = '-inf'


def d_diag(m: SimilarityMatrix) -> float:
    """|mean(diagonal) - mean(off-diagonal)|"""
    n = m.n
    if n < 2:
        raise TooFewSpeakers(f"D_diag needs at least 2 speakers, got {n}", n_speakers=n)
    cells = m.cells
    # exact rational sums: a constant matrix gives exactly 0 whatever its value
    diagonal = sum(Fraction(float(cells[i, i])) for i in range(n)) / n
    off_diagonal = sum(
        Fraction(float(cells[i, j])) for i in range(n) for j in range(n) if i != j
    ) / (n * (n - 1))
    return float(abs(diagonal - off_diagonal))


def _require_positive_oo(ddiag_oo: float):
    if not ddiag_oo > 0:
        raise ZeroDdiagOO("D_diag(M_OO) is zero; DeID and G_VD are undefined")


def de_id(ddiag_oo: float, ddiag_op: float) -> Tuple[float, FrozenSet[Flag]]:
    """DeID in percent; a negative value is kept and flagged"""
    _require_positive_oo(ddiag_oo)
    flags = set()
    if ddiag_op > ddiag_oo:
        flags.add(Flag.ASSUMPTION_VIOLATED_OP_GT_OO)
    return (1.0 - ddiag_op / ddiag_oo) * 100.0, frozenset(flags)


def gain_vd(ddiag_oo: float, ddiag_pp: float) -> Tuple[float, FrozenSet[Flag]]:
    """G_VD in dB; -inf when protected voices are not distinct at all"""
    _require_positive_oo(ddiag_oo)
    if ddiag_pp == 0:
        return -math.inf, frozenset({Flag.ZERO_DDIAG_PP})
    return 10.0 * math.log10(ddiag_pp / ddiag_oo), frozenset()


def report(m_oo: SimilarityMatrix, m_op: SimilarityMatrix, m_pp: SimilarityMatrix,
           set_name: str = '') -> MetricsReport:
    check_same_speakers(m_oo, m_op, m_pp)
    ddiag_oo, ddiag_op, ddiag_pp = d_diag(m_oo), d_diag(m_op), d_diag(m_pp)

    flags: Set[Flag] = set()
    deid: Optional[float] = None
    gvd: Optional[float] = None
    if ddiag_oo > 0:
        deid, deid_flags = de_id(ddiag_oo, ddiag_op)
        gvd, gvd_flags = gain_vd(ddiag_oo, ddiag_pp)
        flags |= deid_flags | gvd_flags
    else:
        logger.warning("D_diag(M_OO) is zero; original voices are not distinct")
        flags.add(Flag.ZERO_DDIAG_OO)
        if ddiag_pp == 0:
            flags.add(Flag.ZERO_DDIAG_PP)

    for flag in sorted(flags, key=lambda f: f.value):
        logger.warning(f"Metrics flag raised: {flag.value}")

    return MetricsReport(
        ddiag_oo=ddiag_oo,
        ddiag_op=ddiag_op,
        ddiag_pp=ddiag_pp,
        deid_percent=deid,
        gvd_db=gvd,
        flags=frozenset(flags),
        n_speakers=m_oo.n,
        set_name=set_name,
    )


def _number(value: Optional[float]) -> Any:
    if value is None:
        return None
    if value == -math.inf:
        return NEG_INF
    # +0.0 keeps "-0.0" out of the report
    return round(value, REPORT_PRECISION) + 0.0


def report_to_dict(r: MetricsReport) -> Dict[str, Any]:
    return {
        'ddiag_oo': _number(r.ddiag_oo),
        'ddiag_op': _number(r.ddiag_op),
        'ddiag_pp': _number(r.ddiag_pp),
        'deid_percent': _number(r.deid_percent),
        'gvd_db': _number(r.gvd_db),
        'flags': sorted(f.value for f in r.flags),
        'n_speakers': r.n_speakers,
        'set_name': r.set_name,
    }


def report_to_json(r: MetricsReport) -> str:
    return json.dumps(report_to_dict(r), indent=2) + '\n'


def report_from_json(text: str) -> MetricsReport:
    data = json.loads(text)
    gvd = data.get('gvd_db')
    return MetricsReport(
        ddiag_oo=float(data['ddiag_oo']),
        ddiag_op=float(data['ddiag_op']),
        ddiag_pp=float(data['ddiag_pp']),
        deid_percent=None if data.get('deid_percent') is None else float(data['deid_percent']),
        gvd_db=None if gvd is None else (-math.inf if gvd == NEG_INF else float(gvd)),
        flags=frozenset(Flag(f) for f in data.get('flags', [])),
        n_speakers=int(data['n_speakers']),
        set_name=data.get('set_name', ''),
    )
