# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Ryser permanent: Gray-code inclusion-exclusion, O(2^n * n)."""

DEF MAX_N = 62


def permanent(double complex[:, :] a):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j
    cdef unsigned long long step, total_steps, bit
    cdef double complex acc = 0.0
    cdef double complex prod
    cdef int sign = 1
    cdef double complex rowsum[MAX_N]

    if a.shape[1] != n:
        raise ValueError("matrix must be square")
    if n == 0:
        return 1.0 + 0.0j
    if n > MAX_N:
        raise ValueError("matrix too large for Ryser iteration")

    for i in range(n):
        rowsum[i] = 0.0

    total_steps = (<unsigned long long>1 << n) - 1
    for step in range(1, total_steps + 1):
        # Flipped bit: lowest set bit of the step counter.
        bit = step & (~step + 1)
        j = 0
        while (bit >> j) > 1:
            j += 1
        if (step ^ (step >> 1)) & bit:
            for i in range(n):
                rowsum[i] = rowsum[i] + a[i, j]
        else:
            for i in range(n):
                rowsum[i] = rowsum[i] - a[i, j]
        sign = -sign
        prod = 1.0
        for i in range(n):
            prod = prod * rowsum[i]
        acc += sign * prod

    if n % 2:
        acc = -acc
    return complex(acc)
