"""Pure-Python sieve round with the same contract as the compiled kernel."""

from __future__ import annotations

import numpy as np


def sieve_prime(p, A, B, start, g, a_box, exps, coeffs, dense, horner):
    """Mask over a = 0..a_box: 1 where start + [a]g passes the cubic-root test mod p."""
    p = int(p)
    if p >= 1 << 31:
        raise OverflowError("sieve rounds support primes below 2^31")
    A, B = int(A) % p, int(B) % p
    X = np.arange(p, dtype=np.int64)
    image = np.zeros(p, dtype=np.uint8)
    image[((X * X % p) * X % p + A * X + B) % p] = 1
    image = image.tolist()
    exps = [int(e) for e in exps]
    coeffs = [int(c) for c in coeffs]
    dense_rev = [int(c) for c in dense][::-1]
    gx, gy = int(g[0]), int(g[1])
    out = bytearray(a_box + 1)
    inf = start is None
    x, y = (0, 0) if inf else (int(start[0]), int(start[1]))
    for a in range(1, a_box + 1):
        if inf:
            x, y, inf = gx, gy, False
        elif x == gx:
            if (y + gy) % p == 0:
                inf = True
            else:
                slope = (3 * x * x + A) * pow(2 * y, -1, p) % p
                x3 = (slope * slope - 2 * x) % p
                x, y = x3, (slope * (x - x3) - y) % p
        else:
            slope = (gy - y) * pow(gx - x, -1, p) % p
            x3 = (slope * slope - x - gx) % p
            x, y = x3, (slope * (x - x3) - y) % p
        if inf:
            out[a] = 1
            continue
        if horner:
            c = 0
            for coeff in dense_rev:
                c = (c * x + coeff) % p
        else:
            c = sum(coeff * pow(x, e, p) for e, coeff in zip(exps, coeffs)) % p
        out[a] = image[c * c % p]
    return np.frombuffer(bytes(out), dtype=np.uint8).copy()
