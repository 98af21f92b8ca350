"""Global pairwise alignment with a linear gap penalty."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptySequence, KindMismatch
from .seqcore import Sequence

GAP = "-"


@dataclass(frozen=True)
class Scoring:
    match: int = 1
    mismatch: int = -1
    gap: int = -2

    def __post_init__(self):
        if not self.match > self.mismatch:
            raise ValueError("match score must exceed mismatch score")
        if not self.gap < 0:
            raise ValueError("gap score must be negative")


DEFAULT_SCORING = Scoring()


@dataclass(frozen=True)
class Alignment:
    a_gapped: str
    b_gapped: str
    score: int

    @property
    def identity(self) -> float:
        same = sum(1 for x, y in zip(self.a_gapped, self.b_gapped) if x == y and x != GAP)
        return same / len(self.a_gapped)

    def columns(self):
        return zip(self.a_gapped, self.b_gapped)

    def to_text(self, width: int = 60) -> str:
        lines = []
        for i in range(0, len(self.a_gapped), width):
            a = self.a_gapped[i:i + width]
            b = self.b_gapped[i:i + width]
            mid = "".join("|" if x == y and x != GAP else " " for x, y in zip(a, b))
            lines += [a, mid, b, ""]
        lines.append(f"score: {self.score}")
        lines.append(f"identity: {self.identity:.4f}")
        return "\n".join(lines) + "\n"


def score_matrix(a: str, b: str, s: Scoring) -> np.ndarray:
    """Fill the (len(a)+1) x (len(b)+1) Needleman-Wunsch matrix.

    Each row is computed in one shot: the best of diagonal and vertical moves
    is taken first, then horizontal gap runs are resolved with a running
    maximum of ``tmp[k] - gap*k``.
    """
    n, m = len(a), len(b)
    bcodes = np.frombuffer(b.encode("ascii"), dtype=np.uint8)
    cols = np.arange(m + 1, dtype=np.int64)
    H = np.empty((n + 1, m + 1), dtype=np.int64)
    H[0] = s.gap * cols
    for i in range(1, n + 1):
        sub = np.where(bcodes == ord(a[i - 1]), s.match, s.mismatch)
        tmp = np.empty(m + 1, dtype=np.int64)
        tmp[0] = s.gap * i
        np.maximum(H[i - 1, :-1] + sub, H[i - 1, 1:] + s.gap, out=tmp[1:])
        H[i] = np.maximum.accumulate(tmp - s.gap * cols) + s.gap * cols
    return H


def global_align(a: Sequence, b: Sequence, s: Scoring = DEFAULT_SCORING) -> Alignment:
    """Optimal global alignment of ``a`` (top row) against ``b``.

    Traceback prefers a diagonal step, then a gap in ``b``, then a gap in
    ``a``, so equal-scoring alignments always resolve the same way.
    """
    if a.kind != b.kind:
        raise KindMismatch(f"cannot align {a.kind.value} against {b.kind.value}")
    if not a.residues or not b.residues:
        raise EmptySequence("cannot align an empty sequence")
    x, y = a.residues, b.residues
    H = score_matrix(x, y, s)
    i, j = len(x), len(y)
    top, bottom = [], []
    while i > 0 or j > 0:
        h = H[i, j]
        if i > 0 and j > 0 and h == H[i - 1, j - 1] + (s.match if x[i - 1] == y[j - 1] else s.mismatch):
            top.append(x[i - 1])
            bottom.append(y[j - 1])
            i -= 1
            j -= 1
        elif i > 0 and h == H[i - 1, j] + s.gap:
            top.append(x[i - 1])
            bottom.append(GAP)
            i -= 1
        else:
            top.append(GAP)
            bottom.append(y[j - 1])
            j -= 1
    return Alignment("".join(reversed(top)), "".join(reversed(bottom)), int(H[-1, -1]))


def is_identical(al: Alignment) -> bool:
    return GAP not in al.a_gapped and GAP not in al.b_gapped and al.a_gapped == al.b_gapped
