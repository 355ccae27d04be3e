"""Small hand-made bitrades shared by several test modules."""

from bitrade.latin import LatinBitrade

# two intercalates on disjoint columns and symbols, sharing row 0
SHARED_ROW = LatinBitrade.of(
    [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0), (0, 2, 2), (0, 3, 3), (2, 2, 3), (2, 3, 2)],
    [(0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1), (0, 2, 3), (0, 3, 2), (2, 2, 2), (2, 3, 3)],
)

DISJOINT = LatinBitrade.of(
    [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0), (2, 2, 2), (2, 3, 3), (3, 2, 3), (3, 3, 2)],
    [(0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1), (2, 2, 3), (2, 3, 2), (3, 2, 2), (3, 3, 3)],
)

# difference of the cyclic square of order 3 and its symbol shift
TORUS = LatinBitrade.of(
    [(i, j, (i + j) % 3) for i in range(3) for j in range(3)],
    [(i, j, (i + j + 1) % 3) for i in range(3) for j in range(3)],
)
