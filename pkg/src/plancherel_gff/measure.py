"""Poissonized Plancherel-type measure on nonnegative signatures, exact.

The level-N weight of a partition lam with n boxes factors as

    weight(lam) = poisson_factor(n) * rational_part(lam)

where poisson_factor(n) = exp(-t*N) (t*N)^n / n! is the probability that a
Poisson variable of mean t*N equals n, and rational_part(lam) =
sym_dim(lam) * weyl_dim(lam) / N^n is an exact rational that sums to 1 over
the partitions of n with at most N rows. Only the single transcendental
factor exp(-t*N) is ever floated; everything else is accumulated exactly, so
moments carry full double precision at output.

This module is the ground-truth oracle for the samplers and the symbolic
state machinery; it is only feasible for small t*N.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache
from typing import Callable

from .errors import ResourceLimitError
from .gt import (
    Signature,
    check_signature,
    count_paths,
    enumerate_interlacing,
    is_interlaced,
    partitions_of,
    sym_dim,
    weyl_dim,
)

# enumerate_support refuses to build tables needing more boxes than this
MAX_BOXES = 40


@dataclass(frozen=True)
class PlancherelParams:
    """Measure parameters: per-column intensity t (exact rational), level N."""

    t: Fraction
    N: int
    tail_epsilon: float = 1e-12

    def __post_init__(self):
        object.__setattr__(self, "t", Fraction(self.t))
        if self.t <= 0:
            raise ValueError("t must be positive")
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if not (0 < self.tail_epsilon < 1):
            raise ValueError("tail_epsilon must be in (0, 1)")

    @property
    def mean_boxes(self) -> Fraction:
        return self.t * self.N


def _pad(lam: Signature, n: int) -> Signature:
    if len(lam) > n:
        raise ValueError(f"signature longer than level: {lam} at N={n}")
    return lam + (0,) * (n - len(lam))


def poisson_factor(n: int, params: PlancherelParams) -> float:
    """P(Poisson(t*N) = n), floated from an exact rational times exp(-t*N)."""
    mean = params.mean_boxes
    return math.exp(-float(mean)) * float(mean**n / math.factorial(n))


def rational_part(lam, params: PlancherelParams) -> Fraction:
    """sym_dim * weyl_dim / N^n for the zero-padded signature; 0 if any part < 0."""
    lam = check_signature(lam)
    lam = _pad(lam, params.N)
    if lam[-1] < 0:
        return Fraction(0)
    n = sum(lam)
    return Fraction(sym_dim(lam) * weyl_dim(lam), params.N**n)


def weight(lam, params: PlancherelParams) -> tuple[float, Fraction]:
    """Decomposed weight (poisson_factor, rational_part); product is the mass."""
    lam = check_signature(lam)
    lam = _pad(lam, params.N)
    if lam[-1] < 0:
        return poisson_factor(0, params), Fraction(0)
    return poisson_factor(sum(lam), params), rational_part(lam, params)


def poisson_tail_bound(mean: Fraction, m: int) -> float:
    """Rigorous upper bound on P(Poisson(mean) > m).

    Bounds the tail by the first omitted term times a geometric series once
    the term ratio mean/(n+1) drops below 1; requires m + 1 > mean.
    """
    mean = Fraction(mean)
    if m + 1 <= mean:
        return 1.0
    first = mean ** (m + 1) / math.factorial(m + 1)
    ratio = mean / (m + 2)
    bound = first / (1 - ratio)
    return math.exp(-float(mean)) * float(bound)


def required_boxes(params: PlancherelParams) -> int:
    """Smallest n_max with certified Poisson tail below tail_epsilon."""
    m = int(math.ceil(float(params.mean_boxes)))
    while True:
        if poisson_tail_bound(params.mean_boxes, m) < params.tail_epsilon:
            return m
        m += 1
        if m > 4 * MAX_BOXES:
            raise ResourceLimitError(
                f"tail bound {params.tail_epsilon} needs more than "
                f"{4 * MAX_BOXES} boxes"
            )


@dataclass
class MeasureTable:
    """Truncated support of the measure with decomposed weights."""

    params: PlancherelParams
    entries: list[tuple[Signature, float, Fraction]]
    covered_mass: float
    n_max: int
    _index: dict[Signature, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._index:
            self._index = {sig: i for i, (sig, _, _) in enumerate(self.entries)}

    def mass(self, lam) -> float:
        lam = _pad(check_signature(lam), self.params.N)
        i = self._index.get(lam)
        if i is None:
            return 0.0
        _, pf, rat = self.entries[i]
        return pf * float(rat)

    def rational_mass_by_boxes(self) -> dict[int, Fraction]:
        """Exact sum of rational parts per box count (should be 1 for each n)."""
        sums: dict[int, Fraction] = {}
        for sig, _, rat in self.entries:
            n = sum(sig)
            sums[n] = sums.get(n, Fraction(0)) + rat
        return sums

    def tail_bound(self) -> float:
        return poisson_tail_bound(self.params.mean_boxes, self.n_max)

    def to_json(self) -> str:
        t = self.params.t
        payload = {
            "params": {
                "t": f"{t.numerator}/{t.denominator}",
                "N": self.params.N,
                "tail_epsilon": self.params.tail_epsilon,
            },
            "n_max": self.n_max,
            "covered_mass": self.covered_mass,
            "entries": [
                {
                    "signature": list(sig),
                    "weight": [repr(pf), f"{rat.numerator}/{rat.denominator}"],
                }
                for sig, pf, rat in self.entries
            ],
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MeasureTable":
        payload = json.loads(text)
        p = payload["params"]
        params = PlancherelParams(
            t=Fraction(p["t"]), N=p["N"], tail_epsilon=p["tail_epsilon"]
        )
        entries = [
            (tuple(e["signature"]), float(e["weight"][0]), Fraction(e["weight"][1]))
            for e in payload["entries"]
        ]
        return cls(
            params=params,
            entries=entries,
            covered_mass=payload["covered_mass"],
            n_max=payload["n_max"],
        )


def enumerate_support(params: PlancherelParams) -> MeasureTable:
    """Table of all partitions with at most N rows covering mass 1 - tail_epsilon."""
    n_max = required_boxes(params)
    if n_max > MAX_BOXES:
        raise ResourceLimitError(
            f"truncation needs partitions of up to {n_max} boxes, "
            f"limit is {MAX_BOXES}; increase tail_epsilon or decrease t*N"
        )
    entries: list[tuple[Signature, float, Fraction]] = []
    covered = 0.0
    for n in range(n_max + 1):
        pf = poisson_factor(n, params)
        covered += pf
        for lam in partitions_of(n, max_parts=params.N):
            sig = _pad(lam, params.N)
            entries.append((sig, pf, rational_part(sig, params)))
    return MeasureTable(params=params, entries=entries, covered_mass=covered, n_max=n_max)


@dataclass
class CoherencyResult:
    lhs: float
    rhs: float
    certified_error: float
    truncation_warning: bool


def coherency_check(params: PlancherelParams, lam) -> CoherencyResult:
    """Compare the level-N mass of lam with its branching average from level N+1.

    rhs sums M_{N+1}(nu) * Dim_N(lam) / Dim_{N+1}(nu) over signatures nu one
    level up that interlace with lam. The denominator is the dimension at the
    level of nu, which makes the branching ratios sum to 1 below each nu.
    Omitted nu beyond the truncation contribute at most the level-(N+1) tail
    (the ratio never exceeds 1), which is the certified error reported.
    """
    lam = _pad(check_signature(lam), params.N)
    table_up = enumerate_support(
        PlancherelParams(params.t, params.N + 1, params.tail_epsilon)
    )
    lhs_pf, lhs_rat = weight(lam, params)
    lhs = lhs_pf * float(lhs_rat)
    dim_lam = weyl_dim(lam)
    rhs_exact = Fraction(0)
    mean_up = table_up.params.mean_boxes
    for nu, _, rat in table_up.entries:
        if rat and is_interlaced(lam, nu):
            # exact rational without the common exp factor
            rhs_exact += (
                mean_up ** sum(nu)
                / math.factorial(sum(nu))
                * rat
                * Fraction(dim_lam, weyl_dim(nu))
            )
    rhs = math.exp(-float(mean_up)) * float(rhs_exact)
    err = table_up.tail_bound()
    warn = err > 0.5 * abs(lhs - rhs) and err > 1e-9
    return CoherencyResult(lhs=lhs, rhs=rhs, certified_error=err, truncation_warning=warn)


def shifted_power_sum(k: int, lam) -> Fraction:
    """Sum over rows of ((lam_i - i + 1/2)^k - (-i + 1/2)^k), exact.

    The subtraction makes the sum stable under padding with zero rows; k = 1
    gives the number of boxes.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    lam = check_signature(lam)
    total = Fraction(0)
    for i, part in enumerate(lam, start=1):
        total += Fraction(2 * part - 2 * i + 1, 2) ** k - Fraction(1 - 2 * i, 2) ** k
    return total


def _poly_tail_bound(params: PlancherelParams, n_max: int, coeff: float, degree: int) -> float:
    """Upper bound on sum_{n > n_max} P(Poisson = n) * coeff * (1 + n)^degree.

    Sums terms upward until the term ratio falls below 1/2, then closes with
    a geometric tail.
    """
    mean = params.mean_boxes
    expf = math.exp(-float(mean))
    total = 0.0
    n = n_max + 1
    term = expf * float(mean**n / math.factorial(n)) * coeff * (1 + n) ** degree
    while True:
        ratio = float(mean / (n + 1)) * ((n + 2) / (n + 1)) ** degree
        if ratio < 0.5:
            return total + term / (1 - ratio)
        total += term
        n += 1
        term *= float(mean / n) * ((n + 1) / n) ** degree
        if n > 100 * (n_max + 1):
            raise ResourceLimitError("tail bound failed to converge")


@dataclass
class MomentResult:
    value: float
    tail_bound: float

    def __float__(self):
        return self.value


def exact_moment(
    f: Callable[[Signature], Fraction],
    params: PlancherelParams,
    growth: tuple[float, int],
) -> MomentResult:
    """Expectation of f over the truncated table, with a rigorous tail bound.

    growth = (coeff, degree) must bound |f(lam)| <= coeff * (1 + |lam|)^degree
    for all partitions lam; it feeds the Poisson tail estimate.
    """
    if growth is None:
        raise ValueError("a growth bound (coeff, degree) is required")
    coeff, degree = growth
    table = enumerate_support(params)
    mean = params.mean_boxes
    acc = Fraction(0)
    for sig, _, rat in table.entries:
        if rat:
            n = sum(sig)
            acc += Fraction(f(sig)) * rat * mean**n / math.factorial(n)
    value = math.exp(-float(mean)) * float(acc)
    tail = _poly_tail_bound(params, table.n_max, float(coeff), int(degree))
    return MomentResult(value=value, tail_bound=tail)


@cache
def _level_sets(nu: Signature, k: int) -> tuple[Signature, ...]:
    """Distinct signatures of length k reachable below nu by interlacing steps."""
    if len(nu) == k:
        return (nu,)
    seen: set[Signature] = set()
    for mu in enumerate_interlacing(nu):
        seen.update(_level_sets(mu, k))
    return tuple(sorted(seen))


def branching_probabilities(nu, k: int) -> list[tuple[Signature, Fraction]]:
    """Conditional law of the length-k member of a uniform chain ending at nu."""
    nu = check_signature(nu)
    if not 0 <= k <= len(nu):
        raise ValueError(f"level {k} out of range for length {len(nu)}")
    dim_nu = weyl_dim(nu)
    out = []
    for mu in _level_sets(nu, k):
        out.append((mu, Fraction(weyl_dim(mu) * count_paths(mu, nu), dim_nu)))
    return out


def nested_joint_moment(
    k_level: int,
    f_low: Callable[[Signature], Fraction],
    f_high: Callable[[Signature], Fraction],
    params: PlancherelParams,
    growth: tuple[float, int],
) -> float:
    """E[f_low(level-k member) * f_high(level-N member)] under the chain measure.

    The level-N signature is drawn from the measure; conditionally on it the
    lower level is distributed as in branching_probabilities (every chain to a
    fixed endpoint is equally likely).
    """
    if growth is None:
        raise ValueError("a growth bound (coeff, degree) is required")
    if not 0 <= k_level < params.N:
        raise ValueError("need 0 <= k_level < N")
    table = enumerate_support(params)
    mean = params.mean_boxes
    acc = Fraction(0)
    for nu, _, rat in table.entries:
        if not rat:
            continue
        inner = Fraction(0)
        for mu, prob in branching_probabilities(nu, k_level):
            inner += Fraction(f_low(mu)) * prob
        acc += inner * Fraction(f_high(nu)) * rat * mean ** sum(nu) / math.factorial(sum(nu))
    return math.exp(-float(mean)) * float(acc)
