# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-prime sieve round.  Releases the GIL for the whole round."""

from libc.stdint cimport int64_t, uint8_t
from libc.stdlib cimport calloc, free

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline int64_t _mod(int64_t a, int64_t p) nogil:
    a %= p
    return a + p if a < 0 else a


cdef inline int64_t _mulmod(int64_t a, int64_t b, int64_t p) nogil:
    # p < 2^31 keeps the product below 2^62.
    return (a * b) % p


cdef int64_t _invmod(int64_t a, int64_t p) nogil:
    cdef int64_t t = 0, new_t = 1, r = p, new_r = a, q, tmp
    while new_r != 0:
        q = r // new_r
        tmp = t - q * new_t
        t = new_t
        new_t = tmp
        tmp = r - q * new_r
        r = new_r
        new_r = tmp
    return t + p if t < 0 else t


cdef int64_t _powmod(int64_t base, int64_t exp, int64_t p) nogil:
    cdef int64_t result = 1
    base %= p
    while exp > 0:
        if exp & 1:
            result = _mulmod(result, base, p)
        base = _mulmod(base, base, p)
        exp >>= 1
    return result


cdef int64_t _eval_poly(int64_t x, const int64_t* exps, const int64_t* coeffs, int nterms,
                        const int64_t* dense, int degree, bint horner, int64_t p) nogil:
    cdef int64_t acc = 0
    cdef int i
    if horner:
        for i in range(degree, -1, -1):
            acc = (_mulmod(acc, x, p) + dense[i]) % p
        return acc
    for i in range(nterms):
        acc = (acc + _mulmod(coeffs[i], _powmod(x, exps[i], p), p)) % p
    return acc


cdef void _round(int64_t p, int64_t A, int64_t B, int64_t sx, int64_t sy, bint s_inf,
                 int64_t gx, int64_t gy, const int64_t* exps, const int64_t* coeffs, int nterms,
                 const int64_t* dense, int degree, bint horner, int64_t a_box,
                 uint8_t* image, uint8_t* out) noexcept nogil:
    cdef int64_t X, v, a, x, y, slope, x3, c
    cdef bint inf = s_inf
    for X in range(p):
        v = (_mulmod(_mulmod(X, X, p), X, p) + _mulmod(A, X, p) + B) % p
        image[v] = 1
    x = sx
    y = sy
    for a in range(1, a_box + 1):
        # (x, y) <- (x, y) + g
        if inf:
            x, y, inf = gx, gy, False
        elif x == gx:
            if (y + gy) % p == 0:
                inf = True
            else:
                slope = _mulmod(_mod(3 * _mulmod(x, x, p) + A, p), _invmod(_mod(2 * y, p), p), p)
                x3 = _mod(_mulmod(slope, slope, p) - 2 * x, p)
                y = _mod(_mulmod(slope, _mod(x - x3, p), p) - y, p)
                x = x3
        else:
            slope = _mulmod(_mod(gy - y, p), _invmod(_mod(gx - x, p), p), p)
            x3 = _mod(_mulmod(slope, slope, p) - x - gx, p)
            y = _mod(_mulmod(slope, _mod(x - x3, p), p) - y, p)
            x = x3
        if inf:
            out[a] = 1
            continue
        c = _eval_poly(x, exps, coeffs, nterms, dense, degree, horner, p)
        out[a] = image[_mulmod(c, c, p)]


def sieve_prime(int64_t p, int64_t A, int64_t B, start, g, int64_t a_box,
                int64_t[::1] exps, int64_t[::1] coeffs, int64_t[::1] dense, bint horner):
    """Mask over a = 0..a_box: 1 where start + [a]g passes the cubic-root test mod p.

    ``start`` and ``g`` are residue pairs (None for the origin of ``start``);
    ``coeffs`` and ``dense`` must already be reduced mod p.
    """
    if p >= (1 << 31):
        raise OverflowError("compiled kernel supports primes below 2^31")
    out_arr = np.zeros(a_box + 1, dtype=np.uint8)
    cdef uint8_t[::1] out = out_arr
    cdef bint s_inf = start is None
    cdef int64_t sx = 0 if s_inf else start[0]
    cdef int64_t sy = 0 if s_inf else start[1]
    cdef int64_t gx = g[0], gy = g[1]
    cdef int nterms = exps.shape[0]
    cdef int degree = dense.shape[0] - 1
    cdef uint8_t* image = <uint8_t*> calloc(p, 1)
    if image == NULL:
        raise MemoryError()
    try:
        with nogil:
            _round(p, _mod(A, p), _mod(B, p), sx, sy, s_inf, gx, gy, &exps[0], &coeffs[0], nterms,
                   &dense[0], degree, horner, a_box, image, &out[0])
    finally:
        free(image)
    return out_arr
