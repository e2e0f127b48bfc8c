"""Exact combinatorics of the Gelfand-Tsetlin graph.

Signatures are weakly decreasing integer tuples; the length-0 tuple () is the
root vertex. Dimensions are exact arbitrary-precision integers throughout:
downstream measure weights divide them, so no floats are allowed here.
"""

from fractions import Fraction
from functools import cache
from itertools import product
from math import factorial

Signature = tuple[int, ...]

EMPTY: Signature = ()


def check_signature(parts) -> Signature:
    """Coerce to a tuple of ints and verify weak decrease."""
    sig = tuple(int(p) for p in parts)
    for a, b in zip(sig, sig[1:]):
        if a < b:
            raise ValueError(f"not weakly decreasing: {sig}")
    return sig


def is_interlaced(mu, lam) -> bool:
    """True iff lam[i] >= mu[i] >= lam[i+1] for all i.

    mu must be one level below lam (length N-1 vs N); the empty signature
    interlaces below every length-1 signature.
    """
    mu = check_signature(mu)
    lam = check_signature(lam)
    if len(mu) != len(lam) - 1:
        raise ValueError(
            f"expected lengths (N-1, N), got ({len(mu)}, {len(lam)})"
        )
    return all(lam[i] >= mu[i] >= lam[i + 1] for i in range(len(mu)))


def enumerate_interlacing(nu) -> list[Signature]:
    """All signatures one level below nu that interlace with it, in lex order.

    The count is prod_i (nu[i] - nu[i+1] + 1); interlacing candidates are
    automatically weakly decreasing, so no filtering is needed.
    """
    nu = check_signature(nu)
    if len(nu) == 0:
        raise ValueError("no level below the empty signature")
    ranges = [range(nu[i + 1], nu[i] + 1) for i in range(len(nu) - 1)]
    return [tuple(mu) for mu in product(*ranges)]


def weyl_dim(lam) -> int:
    """Dimension of the U(N) irreducible with highest weight lam.

    Evaluates prod_{i<j} (lam_i - lam_j + j - i)/(j - i) as an exact rational
    and asserts it reduces to an integer. Equals the number of interlacing
    chains from () up to lam.
    """
    lam = check_signature(lam)
    n = len(lam)
    d = Fraction(1)
    for i in range(n):
        for j in range(i + 1, n):
            d *= Fraction(lam[i] - lam[j] + j - i, j - i)
    assert d.denominator == 1
    return d.numerator


@cache
def count_paths(kappa, nu) -> int:
    """Number of interlacing chains from kappa (length K) to nu (length N).

    Recursive enumeration over the level below nu; exponential, intended as
    an oracle for small N and small |nu| only.
    """
    kappa = check_signature(kappa)
    nu = check_signature(nu)
    if len(kappa) > len(nu):
        raise ValueError(
            f"start longer than end: {len(kappa)} > {len(nu)}"
        )
    if len(kappa) == len(nu):
        return 1 if kappa == nu else 0
    return sum(count_paths(kappa, mu) for mu in enumerate_interlacing(nu))


def conjugate(shape) -> tuple[int, ...]:
    """Transpose of a partition (nonnegative weakly decreasing parts)."""
    shape = [p for p in shape if p > 0]
    if not shape:
        return ()
    return tuple(
        sum(1 for p in shape if p > j) for j in range(shape[0])
    )


def sym_dim(lam) -> int:
    """Number of standard Young tableaux of shape lam (hook length formula).

    lam must be a partition (all parts >= 0); trailing zeros are ignored.
    """
    lam = check_signature(lam)
    if lam and lam[-1] < 0:
        raise ValueError(f"negative part in partition: {lam}")
    shape = [p for p in lam if p > 0]
    n = sum(shape)
    if n == 0:
        return 1
    conj = conjugate(shape)
    hooks = 1
    for i, row in enumerate(shape):
        for j in range(row):
            hooks *= (row - j) + (conj[j] - i) - 1
    q, r = divmod(factorial(n), hooks)
    assert r == 0
    return q


def removable_corners(shape) -> list[Signature]:
    """Partitions obtained by removing one box from a removable corner."""
    shape = check_signature(shape)
    parts = [p for p in shape if p > 0]
    out = []
    for i in range(len(parts)):
        below = parts[i + 1] if i + 1 < len(parts) else 0
        if parts[i] - 1 >= below:
            child = parts[:i] + [parts[i] - 1] + parts[i + 1 :]
            out.append(tuple(p for p in child if p > 0))
    return out


def partitions_of(n: int, max_parts: int | None = None) -> list[Signature]:
    """All partitions of n with at most max_parts parts, lex-descending."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out: list[Signature] = []

    def rec(remaining, largest, parts_left, prefix):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        if parts_left == 0:
            return
        for p in range(min(remaining, largest), 0, -1):
            prefix.append(p)
            rec(remaining - p, p, parts_left - 1, prefix)
            prefix.pop()

    rec(n, n, n if max_parts is None else max_parts, [])
    return out
