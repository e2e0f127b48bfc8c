"""Symbolic states on the universal enveloping algebra of gl(infinity).

Words in the matrix-unit generators E_ij are evaluated against the
multiplicative character exp(t * sum_i (x_ii - 1)) by applying, generator by
generator, the left-invariant operator D(E_ij) = sum_a x_ai d/dx_aj to a
polynomial-times-character normal form and then setting x_ab to the identity
matrix. Because the character depends on diagonal variables only, each
application adds at most the variable x_ji, so the active variable set stays
inside the generator indices and evaluation terminates with an exact
polynomial in the single symbol t.

Central elements (cyclic generator sums), their eigenvalue functions on
signatures, and the change of basis from shifted power sums are provided so
that moments of the measure can be produced purely symbolically and compared
against the exact-enumeration route.
"""

from __future__ import annotations

import json
import random
from fractions import Fraction
from functools import lru_cache, reduce
from itertools import product as iter_product

import numpy as np

from .errors import ComputationFailedError, ResourceLimitError
from .gt import Signature, check_signature
from .measure import shifted_power_sum

DEGREE_BOUND = 8
CASIMIR_DEGREE_BOUND = 4
GELFAND_TERM_BUDGET = 200_000


class TPoly:
    """Polynomial in the intensity symbol t with exact rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        cleaned: dict[int, Fraction] = {}
        if coeffs:
            for deg, c in coeffs.items():
                c = Fraction(c)
                if c:
                    cleaned[int(deg)] = c
        self.coeffs = cleaned

    @classmethod
    def const(cls, value) -> "TPoly":
        return cls({0: Fraction(value)})

    @classmethod
    def zero(cls) -> "TPoly":
        return cls()

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, TPoly):
            return self.coeffs == other.coeffs
        return self.coeffs == TPoly.const(other).coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __add__(self, other):
        if not isinstance(other, TPoly):
            other = TPoly.const(other)
        out = dict(self.coeffs)
        for deg, c in other.coeffs.items():
            out[deg] = out.get(deg, Fraction(0)) + c
        return TPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return TPoly({d: -c for d, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, TPoly):
            other = TPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return TPoly.const(other) - self

    def __mul__(self, other):
        if not isinstance(other, TPoly):
            return TPoly({d: c * Fraction(other) for d, c in self.coeffs.items()})
        out: dict[int, Fraction] = {}
        for d1, c1 in self.coeffs.items():
            for d2, c2 in other.coeffs.items():
                d = d1 + d2
                out[d] = out.get(d, Fraction(0)) + c1 * c2
        return TPoly(out)

    __rmul__ = __mul__

    @property
    def degree(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    def evaluate(self, t_value) -> Fraction:
        t_value = Fraction(t_value)
        return sum((c * t_value**d for d, c in self.coeffs.items()), Fraction(0))

    def to_json_obj(self):
        return [
            [d, f"{c.numerator}/{c.denominator}"]
            for d, c in sorted(self.coeffs.items())
        ]

    @classmethod
    def from_json_obj(cls, obj) -> "TPoly":
        return cls({d: Fraction(s) for d, s in obj})

    def __repr__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for d, c in sorted(self.coeffs.items()):
            if d == 0:
                bits.append(str(c))
            elif d == 1:
                bits.append(f"{c}*t")
            else:
                bits.append(f"{c}*t^{d}")
        return " + ".join(bits)


T_SYMBOL = TPoly({1: Fraction(1)})
T_ONE = TPoly.const(1)

Word = tuple[tuple[int, int], ...]


class NCPolynomial:
    """Formal linear combination of generator words with coefficients in Q[t]."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Word, TPoly] | None = None):
        cleaned: dict[Word, TPoly] = {}
        if terms:
            for word, coef in terms.items():
                if not isinstance(coef, TPoly):
                    coef = TPoly.const(coef)
                if coef:
                    cleaned[tuple(tuple(g) for g in word)] = coef
        self.terms = cleaned

    @classmethod
    def unit(cls, coef=1) -> "NCPolynomial":
        return cls({(): coef if isinstance(coef, TPoly) else TPoly.const(coef)})

    @classmethod
    def generator(cls, i: int, j: int) -> "NCPolynomial":
        if i < 1 or j < 1:
            raise ValueError("generator indices must be >= 1")
        return cls({((i, j),): T_ONE})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, NCPolynomial) and self.terms == other.terms

    def __add__(self, other):
        if not isinstance(other, NCPolynomial):
            other = NCPolynomial.unit(other)
        out = dict(self.terms)
        for word, coef in other.terms.items():
            merged = out.get(word, TPoly.zero()) + coef
            if merged:
                out[word] = merged
            else:
                out.pop(word, None)
        return NCPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return NCPolynomial({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, NCPolynomial):
            other = NCPolynomial.unit(other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, NCPolynomial):
            return self.scale(other)
        out: dict[Word, TPoly] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                word = w1 + w2
                merged = out.get(word, TPoly.zero()) + c1 * c2
                if merged:
                    out[word] = merged
                else:
                    out.pop(word, None)
        return NCPolynomial(out)

    def __rmul__(self, other):
        # scalars commute with everything; only scalar * NCPolynomial lands here
        return self.scale(other)

    def scale(self, scalar) -> "NCPolynomial":
        scalar = scalar if isinstance(scalar, TPoly) else TPoly.const(scalar)
        return NCPolynomial({w: c * scalar for w, c in self.terms.items()})

    def max_word_length(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def to_json_obj(self):
        return {
            "terms": [
                {"word": [list(g) for g in word], "coeff": coef.to_json_obj()}
                for word, coef in sorted(self.terms.items())
            ]
        }

    @classmethod
    def from_json_obj(cls, obj) -> "NCPolynomial":
        return cls(
            {
                tuple(tuple(g) for g in item["word"]): TPoly.from_json_obj(item["coeff"])
                for item in obj["terms"]
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "NCPolynomial":
        return cls.from_json_obj(json.loads(text))

    def __repr__(self):
        if not self.terms:
            return "NCPolynomial(0)"
        bits = []
        for word, coef in sorted(self.terms.items()):
            letters = "".join(f"E[{i},{j}]" for i, j in word) or "1"
            bits.append(f"({coef})*{letters}")
        return "NCPolynomial(" + " + ".join(bits) + ")"


def commutator(x: NCPolynomial, y: NCPolynomial) -> NCPolynomial:
    return x * y - y * x


# -- state evaluation ---------------------------------------------------------
#
# Normal form: a finite sum of monomials in the x_ab times the character.
# A monomial is a sorted tuple of ((a, b), exponent) with coefficients in Q[t].

Mono = tuple[tuple[tuple[int, int], int], ...]


def _mono_inc(mono: Mono, var: tuple[int, int]) -> Mono:
    d = dict(mono)
    d[var] = d.get(var, 0) + 1
    return tuple(sorted(d.items()))


def _mono_move(mono: Mono, var_out: tuple[int, int], var_in: tuple[int, int]) -> Mono:
    d = dict(mono)
    d[var_out] -= 1
    if d[var_out] == 0:
        del d[var_out]
    d[var_in] = d.get(var_in, 0) + 1
    return tuple(sorted(d.items()))


def _apply_generator(state: dict[Mono, TPoly], i: int, j: int) -> dict[Mono, TPoly]:
    out: dict[Mono, TPoly] = {}

    def add(mono, coef):
        merged = out.get(mono, TPoly.zero()) + coef
        if merged:
            out[mono] = merged
        else:
            out.pop(mono, None)

    for mono, coef in state.items():
        # derivative hitting the character contributes t * x_ji
        add(_mono_inc(mono, (j, i)), coef * T_SYMBOL)
        # derivative hitting the polynomial: one term per variable x_aj present
        for (a, b), e in mono:
            if b == j:
                add(_mono_move(mono, (a, b), (a, i)), coef * e)
    return out


@lru_cache(maxsize=None)
def _word_state(word: Word) -> TPoly:
    state: dict[Mono, TPoly] = {(): T_ONE}
    for i, j in reversed(word):
        state = _apply_generator(state, i, j)
    total = TPoly.zero()
    for mono, coef in state.items():
        if all(a == b for (a, b), _ in mono):
            total = total + coef
    return total


def state_eval(x: NCPolynomial, degree_bound: int = DEGREE_BOUND) -> TPoly:
    """Exact value of the state on x, as a polynomial in t."""
    if x.max_word_length() > degree_bound:
        raise ResourceLimitError(
            f"word length {x.max_word_length()} exceeds degree bound {degree_bound}"
        )
    total = TPoly.zero()
    for word, coef in x.terms.items():
        ws = _word_state(word)
        if ws:
            total = total + coef * ws
    return total


# -- central elements ---------------------------------------------------------


def gelfand_invariant(k: int, indices) -> NCPolynomial:
    """Cyclic generator sum C_k over the given index set.

    C_k = sum over (i_1..i_k) in I^k of E_{i_1 i_2} E_{i_2 i_3} ... E_{i_k i_1};
    central in the enveloping algebra of gl(I).
    """
    idx = tuple(sorted(set(int(i) for i in indices)))
    if k < 1 or not idx:
        raise ValueError("need k >= 1 and a nonempty index set")
    if len(idx) ** k > GELFAND_TERM_BUDGET:
        raise ResourceLimitError(
            f"{len(idx)}^{k} terms exceed budget {GELFAND_TERM_BUDGET}"
        )
    terms: dict[Word, TPoly] = {}
    for cycle in iter_product(idx, repeat=k):
        word = tuple(
            (cycle[p], cycle[(p + 1) % k]) for p in range(k)
        )
        terms[word] = terms.get(word, TPoly.zero()) + T_ONE
    return NCPolynomial(terms)


@lru_cache(maxsize=None)
def casimir_eigenvalue(k: int, lam: Signature, degree_bound: int = CASIMIR_DEGREE_BOUND) -> Fraction:
    """Scalar by which C_k acts on the irreducible with highest weight lam.

    Computed from the generating series 1 - prod_i (1-(m_i+1)z)/(1-m_i z)
    with m_i = lam_i + N - i, expanded to order k+1; the coefficient of
    z^{k+1} is the eigenvalue. Never trusted on its own: the measure-side
    expectation of this function must match the symbolic state of C_k (see
    tests), which pins the convention.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > degree_bound:
        raise ResourceLimitError(f"k={k} exceeds eigenvalue degree bound {degree_bound}")
    lam = check_signature(lam)
    n = len(lam)
    order = k + 2  # need coefficients up to z^{k+1}
    num = [Fraction(1)] + [Fraction(0)] * (order - 1)
    den = [Fraction(1)] + [Fraction(0)] * (order - 1)
    for i, part in enumerate(lam, start=1):
        m = part + n - i
        _mul_linear_inplace(num, -(m + 1), order)
        _mul_linear_inplace(den, -m, order)
    series = _series_div(num, den, order)
    return -series[k + 1] if k + 1 < order else Fraction(0)


def _mul_linear_inplace(coeffs: list[Fraction], root_coeff: int, order: int):
    """coeffs *= (1 + root_coeff * z), truncated to the given order."""
    for d in range(order - 1, 0, -1):
        coeffs[d] = coeffs[d] + root_coeff * coeffs[d - 1]


def _series_div(num: list[Fraction], den: list[Fraction], order: int) -> list[Fraction]:
    out = [Fraction(0)] * order
    for d in range(order):
        acc = num[d]
        for m in range(1, d + 1):
            acc -= den[m] * out[d - m]
        out[d] = acc / den[0]
    return out


# -- shifted power sums as central elements -----------------------------------


def _weighted_monomials(k: int) -> list[tuple[int, ...]]:
    """Exponent tuples alpha with sum_j j*alpha_j <= k, deterministic order."""
    out = []

    def rec(j, remaining, prefix):
        if j > k:
            out.append(tuple(prefix))
            return
        for a in range(remaining // j + 1):
            rec(j + 1, remaining - j * a, prefix + [a])

    rec(1, k, [])
    return sorted(out)


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Unique exact solution of a consistent (possibly overdetermined) system."""
    ncols = len(rows[0])
    aug = [row[:] + [b] for row, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [v - f * p for v, p in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == len(aug):
            break
    if len(pivots) < ncols:
        raise ComputationFailedError(
            f"singular interpolation system: rank {len(pivots)} of {ncols}"
        )
    for i in range(r, len(aug)):
        if aug[i][ncols] != 0:
            raise ComputationFailedError("inconsistent interpolation system")
    solution = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        solution[c] = aug[i][ncols]
    return solution


def _random_signature(rng: random.Random, length: int, lo=-5, hi=5) -> Signature:
    return tuple(sorted((rng.randint(lo, hi) for _ in range(length)), reverse=True))


class PowerSumExpansion:
    """Exact expansion of the k-th shifted power sum in eigenvalue monomials.

    Valid for signatures of the fixed length n_rows; the coefficients are
    found by exact interpolation and re-verified on held-out random
    signatures, so a wrong monomial basis aborts instead of mispredicting.
    """

    def __init__(self, k: int, n_rows: int, monomials, coefficients):
        self.k = k
        self.n_rows = n_rows
        self.monomials = monomials
        self.coefficients = coefficients

    def eval(self, lam) -> Fraction:
        lam = check_signature(lam)
        if len(lam) != self.n_rows:
            raise ValueError(f"expected length {self.n_rows}, got {len(lam)}")
        total = Fraction(0)
        for alpha, c in zip(self.monomials, self.coefficients):
            if c == 0:
                continue
            term = c
            for j, a in enumerate(alpha, start=1):
                if a:
                    term *= casimir_eigenvalue(j, lam) ** a
            total += term
        return total

    def build_element(self, indices) -> NCPolynomial:
        """The central element acting by the k-th shifted power sum on gl(I)."""
        idx = tuple(sorted(set(int(i) for i in indices)))
        if len(idx) != self.n_rows:
            raise ValueError(f"index set size {len(idx)} != {self.n_rows}")
        total = NCPolynomial()
        for alpha, c in zip(self.monomials, self.coefficients):
            if c == 0:
                continue
            factor = NCPolynomial.unit(c)
            for j, a in enumerate(alpha, start=1):
                for _ in range(a):
                    factor = factor * gelfand_invariant(j, idx)
            total = total + factor
        return total


@lru_cache(maxsize=None)
def express_p_in_casimirs(k: int, n_rows: int) -> PowerSumExpansion:
    """Interpolate the k-th shifted power sum against eigenvalue monomials.

    Uses twice as many sample signatures as monomials for the exact solve,
    then validates on 50 disjoint random signatures; any mismatch raises
    instead of silently patching the basis.
    """
    if k < 1 or n_rows < 1:
        raise ValueError("need k >= 1 and n_rows >= 1")
    monomials = _weighted_monomials(k)
    rng = random.Random(0xC0FFEE ^ (1499 * k + 7919 * n_rows))
    samples = []
    seen = set()
    while len(samples) < 2 * len(monomials):
        sig = _random_signature(rng, n_rows)
        if sig not in seen:
            seen.add(sig)
            samples.append(sig)
    rows = []
    rhs = []
    for sig in samples:
        row = []
        for alpha in monomials:
            v = Fraction(1)
            for j, a in enumerate(alpha, start=1):
                if a:
                    v *= casimir_eigenvalue(j, sig) ** a
            row.append(v)
        rows.append(row)
        rhs.append(shifted_power_sum(k, sig))
    coeffs = _solve_exact(rows, rhs)
    expansion = PowerSumExpansion(k, n_rows, monomials, coeffs)
    holdout_failures = []
    for _ in range(50):
        sig = _random_signature(rng, n_rows)
        if expansion.eval(sig) != shifted_power_sum(k, sig):
            holdout_failures.append(sig)
    if holdout_failures:
        raise ComputationFailedError(
            f"held-out mismatch for k={k}, n_rows={n_rows}: "
            f"{holdout_failures[:3]} (basis too small?)"
        )
    return expansion


def power_sum_element(k: int, indices) -> NCPolynomial:
    """Central element acting by the k-th shifted power sum on gl(I)."""
    idx = tuple(sorted(set(int(i) for i in indices)))
    return express_p_in_casimirs(k, len(idx)).build_element(idx)


# -- exact means at large index-set size --------------------------------------


def _set_partitions(items: tuple):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


@lru_cache(maxsize=None)
def casimir_monomial_mean(alpha: tuple[int, ...], set_size: int) -> TPoly:
    """Exact state of prod_j C_j^{alpha_j} over an index set of any size.

    Groups the |I|^m summands by the equality pattern of their indices: each
    set partition of the index slots contributes a falling-factorial count
    times the state of one representative word (the state is invariant under
    index relabeling). Keeps the cost independent of |I|.
    """
    cycles = []
    sid = 0
    for j, a in enumerate(alpha, start=1):
        for _ in range(a):
            cycles.append(list(range(sid, sid + j)))
            sid += j
    if sid == 0:
        return T_ONE
    total = TPoly.zero()
    for part in _set_partitions(tuple(range(sid))):
        blocks = sorted(part, key=min)
        if len(blocks) > set_size:
            continue
        block_of = {}
        for bi, block in enumerate(blocks, start=1):
            for slot in block:
                block_of[slot] = bi
        word = []
        for cyc in cycles:
            for p in range(len(cyc)):
                word.append((block_of[cyc[p]], block_of[cyc[(p + 1) % len(cyc)]]))
        count = 1
        for m in range(len(blocks)):
            count *= set_size - m
        ws = _word_state(tuple(word))
        if ws:
            total = total + count * ws
    return total


def power_sum_mean(k: int, set_size: int) -> TPoly:
    """Exact state of the k-th shifted power sum element for |I| = set_size."""
    expansion = express_p_in_casimirs(k, set_size)
    total = TPoly.zero()
    for alpha, c in zip(expansion.monomials, expansion.coefficients):
        if c:
            total = total + c * casimir_monomial_mean(alpha, set_size)
    return total


# -- ordered centered products -------------------------------------------------


def ordered_centered_product(elements) -> NCPolynomial:
    """Product, in the given order, of the centered power-sum elements."""
    factors = []
    for k, indices in elements:
        p = power_sum_element(k, indices)
        mean = state_eval(p)
        factors.append(p - NCPolynomial.unit(mean))
    if not factors:
        return NCPolynomial.unit(1)
    return reduce(lambda a, b: a * b, factors)


def ordered_centered_state(elements, L: int, gamma, degree_bound: int = DEGREE_BOUND) -> float:
    """State of the ordered product of scaled centered power sums.

    elements is a sequence of (k, index_set); each factor is
    L^{-k} (P_{k,I} - <P_{k,I}>) with the intensity specialized to gamma * L.
    Exact rational until the final float conversion.
    """
    elements = [(int(k), tuple(sorted(set(map(int, idx))))) for k, idx in elements]
    poly = state_eval(ordered_centered_product(elements), degree_bound=degree_bound)
    t_value = Fraction(gamma) * L
    value = poly.evaluate(t_value)
    scale = Fraction(1, L ** sum(k for k, _ in elements))
    return float(value * scale)


# -- Wick moments --------------------------------------------------------------


def wick_moment(cov, indices) -> float:
    """Gaussian joint moment from a covariance matrix via perfect matchings."""
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError("cov must be a square matrix")
    if not np.allclose(cov, cov.T, atol=1e-12):
        raise ValueError("cov must be symmetric")
    scale = max(1.0, float(np.linalg.norm(cov, 2)))
    if np.linalg.eigvalsh(cov).min() < -1e-10 * scale:
        raise ValueError("cov is not positive semidefinite")
    idx = [int(i) for i in indices]
    length = len(idx)
    if length % 2:
        return 0.0
    if length > 12:
        raise ResourceLimitError(f"moment order {length} exceeds pairing budget 12")

    def pair_sum(remaining):
        if not remaining:
            return 1.0
        first, rest = remaining[0], remaining[1:]
        total = 0.0
        for pos in range(len(rest)):
            partner = rest[pos]
            total += cov[idx[first], idx[partner]] * pair_sum(
                rest[:pos] + rest[pos + 1 :]
            )
        return total

    return pair_sum(tuple(range(length)))
