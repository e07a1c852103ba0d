"""Special polynomials."""

import functools

from aimkit.numcore.poly import Poly


@functools.lru_cache(maxsize=64)
def hermite(m: int) -> Poly:
    """Physicists' Hermite polynomial H_m with exact rational coefficients.

    Built from H_{k+1} = 2x H_k - 2k H_{k-1}, starting at H_0 = 1, H_1 = 2x.
    """
    if m < 0:
        raise ValueError(f"Hermite degree must be nonnegative, got {m}")
    prev, cur = Poly.constant(1), Poly.from_scalars([0, 2])
    if m == 0:
        return prev
    two_x = Poly.from_scalars([0, 2])
    for k in range(1, m):
        prev, cur = cur, two_x * cur - prev.scale(2 * k)
    return cur
