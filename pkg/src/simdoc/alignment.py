"""Adapted Smith-Waterman alignment over abstract token sequences.

The recurrence differs from the textbook local aligner in two ways: every
edit (insertion, deletion, substitution) is scored as ``G_op + f * sim(x, y)``
so that similar-but-unequal tokens are partly compensated, and the reported
value is the corner cell ``v(m, n)`` of the table rather than its maximum.

The same recurrence is used at the sentence level (tokens are topic ids) and
at the document level (tokens are whole sentences).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Hashable, Sequence

import numpy as np
from numba import njit

CORNER = "corner"
MAX_CELL = "max_cell"
ALIGNMENT_MODES = (CORNER, MAX_CELL)

TokenSimilarityFn = Callable[[Hashable, Hashable], float]


class EditOp(str, Enum):
    INS = "ins"
    DEL = "del"
    SUB = "sub"


@dataclass(frozen=True)
class AlignmentParams:
    """Scoring parameters for one alignment level.

    ``match_gain`` rewards equal tokens, the three gap penalties are charged
    for edits, and ``discount`` weights the token similarity that is added
    back on every edit.
    """

    match_gain: float = 1.0
    gap_insert: float = -0.5
    gap_delete: float = -0.5
    gap_substitute: float = -1.0
    discount: float = 1.0

    def __post_init__(self):
        if not self.match_gain >= 0:
            raise ValueError(f"match_gain must be >= 0, got {self.match_gain}")
        for name in ("gap_insert", "gap_delete", "gap_substitute"):
            value = getattr(self, name)
            if not value <= 0:
                raise ValueError(f"{name} must be <= 0, got {value}")
        if not 0.0 <= self.discount <= 1.0:
            raise ValueError(f"discount must lie in [0, 1], got {self.discount}")

    def gap(self, op: EditOp) -> float:
        op = EditOp(op)
        if op is EditOp.INS:
            return self.gap_insert
        if op is EditOp.DEL:
            return self.gap_delete
        return self.gap_substitute

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        """(match_gain, gap_insert, gap_delete, gap_substitute, discount)."""
        return (
            float(self.match_gain),
            float(self.gap_insert),
            float(self.gap_delete),
            float(self.gap_substitute),
            float(self.discount),
        )

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "AlignmentParams":
        m, ins, dele, sub, f = (float(v) for v in values)
        return cls(m, ins, dele, sub, f)

    def to_dict(self) -> dict:
        return {
            "match_gain": self.match_gain,
            "gap_insert": self.gap_insert,
            "gap_delete": self.gap_delete,
            "gap_substitute": self.gap_substitute,
            "discount": self.discount,
        }


def op_score(token_x, token_y, op: EditOp, params: AlignmentParams,
             sim: TokenSimilarityFn) -> float:
    """Score of one edit: gap penalty plus discounted token similarity."""
    return params.gap(op) + params.discount * float(sim(token_x, token_y))


def triangular(n: int) -> int:
    return n * (n + 1) // 2


def _check_mode(mode: str) -> bool:
    if mode not in ALIGNMENT_MODES:
        raise ValueError(f"alignment mode must be one of {ALIGNMENT_MODES}, got {mode!r}")
    return mode == MAX_CELL


@njit(cache=True, nogil=True)
def _sweep(eq, sim, match_gain, g_ins, g_del, g_sub, f, use_max):
    # two-row rolling table; row x-1 in prev, row x in cur
    m, n = eq.shape
    if m == 0 or n == 0:
        return 0.0
    prev = np.zeros(n + 1)
    cur = np.zeros(n + 1)
    best = 0.0
    for x in range(1, m + 1):
        cur[0] = 0.0
        for y in range(1, n + 1):
            if eq[x - 1, y - 1]:
                v = prev[y - 1] + match_gain
                if v < 0.0:
                    v = 0.0
            else:
                bonus = f * sim[x - 1, y - 1]
                v = 0.0
                c = prev[y] + g_del + bonus
                if c > v:
                    v = c
                c = cur[y - 1] + g_ins + bonus
                if c > v:
                    v = c
                c = prev[y - 1] + g_sub + bonus
                if c > v:
                    v = c
            cur[y] = v
            if v > best:
                best = v
        tmp = prev
        prev = cur
        cur = tmp
    if use_max:
        return best
    return prev[n]


@njit(cache=True, nogil=True)
def _segment_pair_matrix(a_tokens, a_offsets, b_tokens, b_offsets, token_sim,
                         match_gain, g_ins, g_del, g_sub, f, use_max):
    na = a_offsets.shape[0] - 1
    nb = b_offsets.shape[0] - 1
    out = np.zeros((na, nb))
    for i in range(na):
        a = a_tokens[a_offsets[i]:a_offsets[i + 1]]
        for j in range(nb):
            b = b_tokens[b_offsets[j]:b_offsets[j + 1]]
            m = a.shape[0]
            n = b.shape[0]
            if m == 0 or n == 0:
                continue
            eq = np.empty((m, n), dtype=np.bool_)
            sim = np.empty((m, n))
            for x in range(m):
                for y in range(n):
                    eq[x, y] = a[x] == b[y]
                    sim[x, y] = token_sim[a[x], b[y]]
            raw = _sweep(eq, sim, match_gain, g_ins, g_del, g_sub, f, use_max)
            size = max(m, n)
            out[i, j] = raw / (size * (size + 1) / 2.0)
    return out


def align_tables(eq: np.ndarray, sim: np.ndarray, params: AlignmentParams,
                 mode: str = CORNER) -> float:
    """Run the recurrence on precomputed pairwise equality/similarity tables.

    ``eq[x, y]`` says whether token x of the first sequence equals token y of
    the second; ``sim[x, y]`` is their similarity (ignored where equal).
    """
    eq = np.ascontiguousarray(eq, dtype=np.bool_)
    sim = np.ascontiguousarray(sim, dtype=np.float64)
    if eq.shape != sim.shape or eq.ndim != 2:
        raise ValueError(f"table shapes differ: {eq.shape} vs {sim.shape}")
    return float(_sweep(eq, sim, *params.as_tuple(), _check_mode(mode)))


def _pair_tables(seq_a, seq_b, sim):
    m, n = len(seq_a), len(seq_b)
    eq = np.zeros((m, n), dtype=np.bool_)
    table = np.zeros((m, n))
    for x, tx in enumerate(seq_a):
        for y, ty in enumerate(seq_b):
            if tx == ty:
                eq[x, y] = True
            else:
                table[x, y] = sim(tx, ty)
    return eq, table


def align(seq_a: Sequence, seq_b: Sequence, params: AlignmentParams,
          sim: TokenSimilarityFn, mode: str = CORNER) -> float:
    """Raw alignment score ``v(m, n)`` (or the table maximum in max_cell mode).

    Tokens are compared with ``==``; ``sim`` is only consulted for unequal
    pairs and must return values in [0, 1].
    """
    use_max = _check_mode(mode)
    if len(seq_a) == 0 or len(seq_b) == 0:
        return 0.0
    eq, table = _pair_tables(seq_a, seq_b, sim)
    return float(_sweep(eq, table, *params.as_tuple(), use_max))


def normalized_alignment(seq_a: Sequence, seq_b: Sequence, params: AlignmentParams,
                         sim: TokenSimilarityFn, mode: str = CORNER) -> float:
    """Alignment score divided by 1 + 2 + ... + max(m, n); 0 if both are empty."""
    size = max(len(seq_a), len(seq_b))
    if size == 0:
        return 0.0
    return align(seq_a, seq_b, params, sim, mode) / triangular(size)


def flatten_segments(segments: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    """Pack integer segments into (tokens, offsets) arrays for the batch kernel."""
    lengths = np.fromiter((len(s) for s in segments), dtype=np.int64, count=len(segments))
    offsets = np.zeros(len(segments) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    tokens = np.fromiter((t for s in segments for t in s), dtype=np.int64,
                         count=int(offsets[-1]))
    return tokens, offsets


def segment_similarity_matrix(segments_a: Sequence[Sequence[int]],
                              segments_b: Sequence[Sequence[int]],
                              token_sim: np.ndarray, params: AlignmentParams,
                              mode: str = CORNER) -> np.ndarray:
    """Normalized alignment for every (segment_a, segment_b) pair.

    Segments are integer sequences indexing into the square ``token_sim``
    table, whose entries are used as-is (clamp before calling).
    """
    use_max = _check_mode(mode)
    a_tok, a_off = flatten_segments(segments_a)
    b_tok, b_off = flatten_segments(segments_b)
    token_sim = np.ascontiguousarray(token_sim, dtype=np.float64)
    return _segment_pair_matrix(a_tok, a_off, b_tok, b_off, token_sim,
                                *params.as_tuple(), use_max)
