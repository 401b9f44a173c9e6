"""Pure-Python Ryser permanent, the fallback when the compiled kernel
is unavailable.  Same Gray-code iteration, O(2^n * n)."""

import math


def permanent(a):
    n = len(a)
    if n == 0:
        return 1.0 + 0.0j
    if any(len(row) != n for row in a):
        raise ValueError("matrix must be square")
    rows = [[complex(x) for x in row] for row in a]
    rowsum = [0.0 + 0.0j] * n
    acc = 0.0 + 0.0j
    sign = 1
    for step in range(1, 1 << n):
        bit = step & -step
        j = bit.bit_length() - 1
        if (step ^ (step >> 1)) & bit:
            for i in range(n):
                rowsum[i] += rows[i][j]
        else:
            for i in range(n):
                rowsum[i] -= rows[i][j]
        sign = -sign
        acc += sign * math.prod(rowsum)
    return -acc if n % 2 else acc
