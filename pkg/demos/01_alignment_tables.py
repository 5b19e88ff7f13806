"""
Adapted Smith-Waterman on short token sequences
===============================================

The aligner scores two sequences with a table v(i, j). Equal tokens extend
the diagonal by the match gain M. Unequal tokens take the best of an
insertion, a deletion or a substitution, each costing its gap penalty G
and earning back f times the similarity of the two tokens. Scores never
drop below zero, and the score of the alignment is the corner cell v(m, n).
"""

from simdoc.alignment import MAX_CELL, AlignmentParams, align, normalized_alignment

# a similarity function on integer tokens: 1 and 3 are close, the rest unrelated
def sim(x, y):
    return 0.9 if {x, y} == {1, 3} else (1.0 if x == y else 0.1)

# with f = 0 the similarity is ignored and a single mismatch at the end is fatal:
# v(1,1) = 1, v(1,2) = v(2,1) = 0.5, v(2,2) = max(0, 0.5 - 0.5, 0.5 - 0.5, 1 - 1) = 0
strict = AlignmentParams(match_gain=1.0, gap_insert=-0.5, gap_delete=-0.5,
                         gap_substitute=-1.0, discount=0.0)
print("[1,2] vs [1,3], f=0, corner cell:", align([1, 2], [1, 3], strict, sim))
print("[1,2] vs [1,3], f=0, table maximum:", align([1, 2], [1, 3], strict, sim, mode=MAX_CELL))

# identical sequences only ever take the diagonal; normalizing by
# max(m, n)(max(m, n) + 1)/2 gives 2M/(n + 1)
print("[1,2,3] self, normalized:", normalized_alignment([1, 2, 3], [1, 2, 3], strict, sim))

# with f = 1 a mismatch between the close tokens 1 and 3 is partly forgiven
lenient = AlignmentParams(1.0, -0.5, -0.5, -1.0, 1.0)
for a, b in [([1, 2], [1, 3]), ([2, 1], [2, 3]), ([1, 2, 4], [3, 2, 4])]:
    print(f"{a} vs {b}: f=0 {normalized_alignment(a, b, strict, sim):.3f}  "
          f"f=1 {normalized_alignment(a, b, lenient, sim):.3f}")

# order matters: the same tokens in a different order score lower
p, q = [1, 2, 4, 5], [4, 2, 1, 5]
print("p vs p:", round(normalized_alignment(p, p, lenient, sim), 3),
      " p vs reordered p:", round(normalized_alignment(p, q, lenient, sim), 3))
