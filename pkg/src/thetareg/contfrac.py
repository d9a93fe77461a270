"""Continued fractions and the time-parameter taxonomy.

A "time" is one of four things, all normalised into [0, 2) (the sums these
feed are 2-periodic in t):

* an exact rational p/q;
* a real quadratic irrational (a + b sqrt(c))/d, expanded exactly through
  the periodic (P + sqrt(D))/Q recursion, every floor against sqrt(D)
  decided by integer comparison;
* a number defined by a rule for its partial quotients,
  a_{k+1} = max(1, floor(q_k^sigma)), which by construction has
  log q_{k+1} / log q_k -> 1 + sigma;
* a decimal literal of limited precision, whose expansion is only
  certified as far as the +-1 ulp interval around it pins the quotients.

Rational expansions are normalised to an odd number of quotients using the
tail identity [..., a] = [..., a-1, 1]; the convergent-matrix determinant
alternates with the index, and downstream identities need the even-index
orientation q p_{n-1} - p q_{n-1} = +1.

Diophantine typing: sigma_n = log q_{n+1} / log q_n - 1 measures how fast
the denominators grow; bounded quotients give sigma_n -> 0, the quotient
rule above gives sigma_n -> sigma. classify_sigma estimates limsup/liminf
over a tail window and only commits to a class when they agree closely.
The Khinchin-Levy constant pi^2 / (12 ln 2) is the almost-sure limit of
(ln q_n)/n and is reported as a sanity diagnostic for generic inputs.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .errors import DomainError, PrecisionExhaustedError

__all__ = [
    "KHINCHIN_LEVY",
    "iroot",
    "floor_quadratic",
    "canonical_quotients",
    "expand_rational",
    "CFExpansion",
    "TimeSpec",
    "Rational",
    "QuadraticIrrational",
    "QuotientRule",
    "DecimalLiteral",
    "cf_of_real",
    "construct_in_class",
    "SigmaEstimate",
    "classify_sigma",
    "khinchin_levy_diagnostic",
    "parse_timespec",
]

# Almost-sure limit of (ln q_n)/n for a random real (Khinchin-Levy).
KHINCHIN_LEVY = math.pi ** 2 / (12.0 * math.log(2.0))


def iroot(x: int, k: int) -> int:
    """floor(x ** (1/k)) for integers x >= 0, k >= 1, by Newton + correction."""
    if x < 0 or k <= 0:
        raise DomainError("iroot needs x >= 0 and k >= 1")
    if x == 0:
        return 0
    if k == 1:
        return x
    if k == 2:
        return math.isqrt(x)
    r = 1 << (x.bit_length() // k + 1)
    while True:
        nr = ((k - 1) * r + x // r ** (k - 1)) // k
        if nr >= r:
            break
        r = nr
    while r ** k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def _le_times_sqrt(m: int, b: int, c: int) -> bool:
    """Exact predicate m <= b*sqrt(c); c positive and not a perfect square."""
    if b >= 0:
        if m <= 0:
            return True
        return m * m <= b * b * c
    if m > 0:
        return False
    return m * m >= b * b * c


def floor_quadratic(a: int, b: int, c: int, d: int) -> int:
    """floor((a + b*sqrt(c))/d) exactly, for d > 0, c > 0 not a square."""
    if d <= 0:
        raise DomainError("d must be positive")
    scale = 1 << 32
    guess = (a * scale + b * math.isqrt(c * scale * scale)) // (d * scale)
    radius = abs(b) // (d * scale) + 2
    lo, hi = guess - radius, guess + radius
    # largest k with k*d - a <= b*sqrt(c)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _le_times_sqrt(mid * d - a, b, c):
            lo = mid
        else:
            hi = mid - 1
    return lo


def canonical_quotients(p: int, q: int) -> list[int]:
    """Plain Euclidean expansion of p/q >= 0 (last quotient >= 2 unless alone)."""
    if q <= 0:
        raise DomainError("q must be positive")
    if p < 0:
        raise DomainError("expansion is defined here for p/q >= 0")
    if math.gcd(p, q) != 1:
        raise DomainError(f"{p}/{q} is not in lowest terms")
    quots: list[int] = []
    a, b = p, q
    while b:
        quots.append(a // b)
        a, b = b, a % b
    return quots


def expand_rational(p: int, q: int) -> list[int]:
    """Euclidean expansion of p/q >= 0, normalised to an odd quotient count."""
    quots = canonical_quotients(p, q)
    if len(quots) % 2 == 0:
        if quots[-1] > 1:
            quots[-1] -= 1
            quots.append(1)
        else:
            quots.pop()
            quots[-1] += 1
    return quots


@dataclass(frozen=True)
class CFExpansion:
    """Partial quotients a_0, a_1, ... with their convergents p_k/q_k.

    Recurrences p_{k+1} = a_{k+1} p_k + p_{k-1} (likewise q), seeded by
    p_{-1} = 1, q_{-1} = 0, p_0 = a_0, q_0 = 1. ``exact_terminates`` marks
    the complete expansion of a rational; ``truncated`` marks a quotient or
    digit source that was cut off before it was done.
    """

    quotients: tuple[int, ...]
    exact_terminates: bool = False
    truncated: bool = False

    def __post_init__(self) -> None:
        if not self.quotients:
            raise DomainError("need at least one quotient")
        if self.quotients[0] < 0:
            raise DomainError("a_0 must be >= 0")
        if any(a < 1 for a in self.quotients[1:]):
            raise DomainError("a_k must be >= 1 for k >= 1")

    def __len__(self) -> int:
        return len(self.quotients)

    @property
    def _pq(self) -> tuple[list[int], list[int]]:
        cached = self.__dict__.get("_pq_cache")
        if cached is None:
            ps, qs = [1], [0]  # index shifted by one: position k+1 holds p_k
            for a in self.quotients:
                if len(ps) == 1:
                    ps.append(a)
                    qs.append(1)
                else:
                    ps.append(a * ps[-1] + ps[-2])
                    qs.append(a * qs[-1] + qs[-2])
            cached = (ps, qs)
            self.__dict__["_pq_cache"] = cached
        return cached

    def p(self, k: int) -> int:
        """Numerator p_k; k = -1 is the seed value 1."""
        return self._pq[0][k + 1]

    def q(self, k: int) -> int:
        """Denominator q_k; k = -1 is the seed value 0."""
        return self._pq[1][k + 1]

    def convergents(self) -> list[tuple[int, int]]:
        ps, qs = self._pq
        return list(zip(ps[1:], qs[1:]))

    def value(self) -> Fraction:
        """Value of the (finite) quotient list."""
        return Fraction(self.p(len(self) - 1), self.q(len(self) - 1))

    def determinant_alternates(self) -> bool:
        """p_k q_{k-1} - p_{k-1} q_k == (-1)^(k+1) for every k >= 0."""
        for k in range(len(self)):
            det = self.p(k) * self.q(k - 1) - self.p(k - 1) * self.q(k)
            if det != (-1) ** (k + 1):
                return False
        return True


class TimeSpec:
    """Base for time parameters. Subclasses fill in the small protocol below."""

    kind = "abstract"

    def exact_value(self) -> Fraction | None:
        """The exact rational value, when there is one."""
        raise NotImplementedError

    def resolution(self) -> Fraction | None:
        """Coarseness of a digit-limited literal; None when exact."""
        return None

    @property
    def is_rational(self) -> bool:
        return self.exact_value() is not None

    def partial_quotients(self) -> Iterator[int]:
        raise NotImplementedError

    def convergent_pairs(self) -> Iterator[tuple[int, int]]:
        """Successive (p_k, q_k); finite for rationals."""
        p_prev, q_prev = 1, 0
        p_cur: int | None = None
        q_cur = 1
        for a in self.partial_quotients():
            if p_cur is None:
                p_cur, q_cur = a, 1
            else:
                p_cur, p_prev = a * p_cur + p_prev, p_cur
                q_cur, q_prev = a * q_cur + q_prev, q_cur
            yield p_cur, q_cur

    def expansion(self, max_terms: int = 64, max_q_bits: int = 100_000) -> CFExpansion:
        """Quotients up to the given budgets; truncated=True when cut off."""
        quots: list[int] = []
        q_prev, q_cur = 0, 1
        p_prev, p_cur = 1, None
        truncated = True
        source = self.partial_quotients()
        while len(quots) < max_terms:
            try:
                a = next(source)
            except StopIteration:
                truncated = False
                break
            quots.append(a)
            if p_cur is None:
                p_cur, q_cur = a, 1
            else:
                p_cur, p_prev = a * p_cur + p_prev, p_cur
                q_cur, q_prev = a * q_cur + q_prev, q_cur
            if q_cur.bit_length() > max_q_bits:
                break
        if not quots:
            raise PrecisionExhaustedError("no quotients could be produced")
        return CFExpansion(tuple(quots), exact_terminates=not truncated,
                           truncated=truncated)

    def value_bracket(self, eps: Fraction) -> tuple[Fraction, Fraction]:
        """Exact lo <= t <= hi with hi - lo <= eps."""
        if eps <= 0:
            raise DomainError("eps must be positive")
        exact = self.exact_value()
        if exact is not None:
            return exact, exact
        prev: tuple[int, int] | None = None
        for pk, qk in self.convergent_pairs():
            if prev is not None:
                gap = Fraction(1, prev[1] * qk)
                if gap <= eps:
                    lo = Fraction(prev[0], prev[1])
                    hi = Fraction(pk, qk)
                    return (lo, hi) if lo <= hi else (hi, lo)
            prev = (pk, qk)
        raise PrecisionExhaustedError("quotient source ended before the bracket closed")

    def describe(self) -> str:
        raise NotImplementedError

    def slug(self) -> str:
        """Filesystem-safe tag derived from describe()."""
        return re.sub(r"[^A-Za-z0-9._-]+", "_", self.describe()).strip("_")

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"<{type(self).__name__} {self.describe()}>"


@dataclass(eq=True)
class Rational(TimeSpec):
    """t = p/q, reduced and folded into [0, 2)."""

    p: int
    q: int
    kind = "rational"

    def __post_init__(self) -> None:
        if self.q == 0:
            raise DomainError("q must be nonzero")
        if self.q < 0:
            self.p, self.q = -self.p, -self.q
        g = math.gcd(self.p, self.q)
        self.p //= g
        self.q //= g
        self.p %= 2 * self.q

    def exact_value(self) -> Fraction | None:
        return Fraction(self.p, self.q)

    def partial_quotients(self) -> Iterator[int]:
        return iter(expand_rational(self.p, self.q))

    def expansion(self, max_terms: int = 64, max_q_bits: int = 100_000) -> CFExpansion:
        return CFExpansion(tuple(expand_rational(self.p, self.q)),
                           exact_terminates=True, truncated=False)

    def describe(self) -> str:
        return f"rat:{self.p}/{self.q}"


class QuadraticIrrational(TimeSpec):
    """t = (a + b sqrt(c))/d with c > 0 not a square, folded into [0, 2).

    Quotients come from the exact integer recursion on states
    (P + sqrt(D))/Q with Q | D - P^2; the orbit of states is finite, so the
    expansion is eventually periodic and arbitrarily many quotients cost
    nothing.
    """

    kind = "quadratic"

    def __init__(self, a: int, b: int, c: int, d: int):
        if d == 0:
            raise DomainError("d must be nonzero")
        if c <= 0:
            raise DomainError("c must be positive")
        if math.isqrt(c) ** 2 == c:
            raise DomainError(f"sqrt({c}) is an integer; use a rational time")
        if b == 0:
            raise DomainError("b = 0 gives a rational; use a rational time")
        if d < 0:
            a, b, d = -a, -b, -d
        shift = floor_quadratic(a, b, c, 2 * d)
        a -= 2 * d * shift
        self.a, self.b, self.c, self.d = a, b, c, d
        self._quots: list[int] = []
        self._state: tuple[int, int, int] | None = None  # (P, Q, rD) with D fixed
        self._D = 0
        self._period: tuple[int, int] | None = None
        self._seen: dict[tuple[int, int], int] = {}

    def __eq__(self, other) -> bool:
        return (isinstance(other, QuadraticIrrational)
                and (self.a, self.b, self.c, self.d)
                == (other.a, other.b, other.c, other.d))

    def exact_value(self) -> Fraction | None:
        return None

    def as_float(self) -> float:
        return (self.a + self.b * math.sqrt(self.c)) / self.d

    def _init_state(self) -> None:
        D = self.b * self.b * self.c
        if self.b > 0:
            P, Q = self.a, self.d
        else:
            P, Q = -self.a, -self.d
        if (D - P * P) % Q != 0:
            s = abs(Q)
            P, D, Q = P * s, D * s * s, Q * s
        self._D = D
        self._state = (P, Q, math.isqrt(D))

    def _extend(self, count: int) -> None:
        if self._state is None:
            self._init_state()
        P, Q, rD = self._state  # type: ignore[misc]
        while len(self._quots) < count:
            key = (P, Q)
            if key in self._seen and self._period is None:
                start = self._seen[key]
                self._period = (start, len(self._quots) - start)
            self._seen.setdefault(key, len(self._quots))
            if Q > 0:
                a = (P + rD) // Q
            else:
                a = (P + rD + 1) // Q
            self._quots.append(a)
            P = a * Q - P
            Q = (self._D - P * P) // Q
        self._state = (P, Q, rD)

    def partial_quotients(self) -> Iterator[int]:
        k = 0
        while True:
            if k >= len(self._quots):
                self._extend(k + 16)
            yield self._quots[k]
            k += 1

    def periodic_structure(self, max_terms: int = 10_000) -> tuple[list[int], list[int]]:
        """(preperiod quotients, repeating quotients)."""
        while self._period is None:
            if len(self._quots) > max_terms:
                raise PrecisionExhaustedError("period not found within budget")
            self._extend(len(self._quots) + 64)
        start, length = self._period
        self._extend(start + length)
        return self._quots[:start], self._quots[start:start + length]

    def describe(self) -> str:
        return f"quad:({self.a}{self.b:+d}*sqrt({self.c}))/{self.d}"


class QuotientRule(TimeSpec):
    """Quotients a_{k+1} = max(1, floor(q_k^sigma)) after a fixed seed.

    Denominator growth then satisfies log q_{k+1}/log q_k -> 1 + sigma, so
    the value lands in the Diophantine class indexed by sigma. sigma is an
    exact Fraction and the floor is an exact integer root, so the expansion
    is reproducible bit for bit.
    """

    kind = "rule"

    def __init__(self, sigma: Fraction, seed: tuple[int, ...]):
        sigma = Fraction(sigma)
        if sigma < 0:
            raise DomainError("sigma must be >= 0")
        if not seed:
            raise DomainError("seed must contain at least a_0")
        if seed[0] not in (0, 1):
            raise DomainError("a_0 must be 0 or 1 to keep t in [0, 2)")
        if any(a < 1 for a in seed[1:]):
            raise DomainError("seed quotients after a_0 must be >= 1")
        self.sigma = sigma
        self.seed = tuple(int(a) for a in seed)
        self._quots: list[int] = list(self.seed)
        self._pq: list[tuple[int, int]] = []

    def __eq__(self, other) -> bool:
        return (isinstance(other, QuotientRule)
                and (self.sigma, self.seed) == (other.sigma, other.seed))

    def exact_value(self) -> Fraction | None:
        return None

    def _extend(self, count: int) -> None:
        p_prev, q_prev = 1, 0
        p_cur: int | None = None
        q_cur = 1
        for a in self._quots:
            if p_cur is None:
                p_cur, q_cur = a, 1
            else:
                p_cur, p_prev = a * p_cur + p_prev, p_cur
                q_cur, q_prev = a * q_cur + q_prev, q_cur
        num, den = self.sigma.numerator, self.sigma.denominator
        while len(self._quots) < count:
            nxt = max(1, iroot(q_cur ** num, den)) if num else 1
            self._quots.append(nxt)
            p_cur, p_prev = nxt * p_cur + p_prev, p_cur  # type: ignore[operator]
            q_cur, q_prev = nxt * q_cur + q_prev, q_cur

    def partial_quotients(self) -> Iterator[int]:
        k = 0
        while True:
            if k >= len(self._quots):
                self._extend(k + 4)
            yield self._quots[k]
            k += 1

    def describe(self) -> str:
        sig = (str(self.sigma.numerator) if self.sigma.denominator == 1
               else f"{self.sigma.numerator}/{self.sigma.denominator}")
        return f"class:sigma={sig},seed=" + ",".join(str(a) for a in self.seed)


class DecimalLiteral(TimeSpec):
    """A decimal string, treated as exact but of known limited resolution."""

    kind = "decimal"

    def __init__(self, text: str):
        if not re.fullmatch(r"[01]?\.\d+", text.strip()):
            raise DomainError(
                f"decimal literal must look like 0.419... in [0, 2), got {text!r}")
        self.text = text.strip()
        self.value = Fraction(self.text)
        self.digits = len(self.text.split(".")[1])
        if not 0 <= self.value < 2:
            raise DomainError("decimal time must lie in [0, 2)")

    def __eq__(self, other) -> bool:
        return isinstance(other, DecimalLiteral) and self.text == other.text

    def exact_value(self) -> Fraction | None:
        return self.value

    def resolution(self) -> Fraction | None:
        return Fraction(1, 10 ** self.digits)

    def partial_quotients(self) -> Iterator[int]:
        return iter(expand_rational(self.value.numerator, self.value.denominator))

    def expansion(self, max_terms: int = 64, max_q_bits: int = 100_000) -> CFExpansion:
        """The certified expansion (see cf_of_real), not the literal's own."""
        certified, _center = cf_of_real(self.text, max_terms=max_terms)
        return certified

    def center_expansion(self) -> CFExpansion:
        """Complete canonical expansion of the literal value taken as exact."""
        return CFExpansion(
            tuple(canonical_quotients(self.value.numerator, self.value.denominator)),
            exact_terminates=True, truncated=False)

    def describe(self) -> str:
        return f"dec:{self.text}"


def cf_of_real(text: str, max_terms: int = 64) -> tuple[CFExpansion, CFExpansion]:
    """(certified expansion of text +- 1 ulp, exact expansion of the centre).

    The certified part contains exactly those leading quotients shared by
    every real within one last-digit unit of the literal; it is flagged
    truncated whenever certification stopped before the centre's expansion
    ended (more digits would be needed to see deeper).
    """
    lit = DecimalLiteral(text)
    ulp = Fraction(1, 10 ** lit.digits)
    lo, hi = lit.value - ulp, lit.value + ulp
    if lo < 0:
        lo = Fraction(0)
    quots: list[int] = []
    certified_all = False
    while len(quots) < max_terms:
        flo = lo.numerator // lo.denominator
        fhi = hi.numerator // hi.denominator
        if flo != fhi:
            break
        quots.append(flo)
        lo -= flo
        hi -= flo
        if lo == 0 or hi == 0:
            break
        lo, hi = 1 / hi, 1 / lo
    center = lit.center_expansion()
    if quots and quots == list(center.quotients):
        certified_all = True
    if not quots:
        quots = [lit.value.numerator // lit.value.denominator]
        certified = CFExpansion(tuple(quots), truncated=True)
    else:
        certified = CFExpansion(tuple(quots), exact_terminates=certified_all,
                                truncated=not certified_all)
    return certified, center


def construct_in_class(sigma, seed=(0, 2)) -> QuotientRule:
    """Time whose quotient growth realises the given sigma >= 0.

    sigma may be an int, Fraction, decimal string, or float (floats are
    read at decimal face value: 0.1 means 1/10).
    """
    if isinstance(sigma, float):
        sigma = Fraction(str(sigma))
    return QuotientRule(Fraction(sigma), tuple(seed))


@dataclass(frozen=True)
class SigmaEstimate:
    """Tail estimates of sigma_n = log q_{n+1}/log q_n - 1."""

    per_n: tuple[tuple[int, float], ...]
    limsup_est: float
    liminf_est: float
    verdict: str
    sigma: float | None

    def summary(self) -> str:
        if self.sigma is not None:
            return f"{self.verdict} (limsup {self.limsup_est:.4f}, liminf {self.liminf_est:.4f})"
        if math.isnan(self.limsup_est):
            return self.verdict
        return f"{self.verdict} [liminf {self.liminf_est:.4f}, limsup {self.limsup_est:.4f}]"


def classify_sigma(exp: CFExpansion, window: int = 8) -> SigmaEstimate:
    """Estimate the growth exponent class from a (possibly truncated) expansion.

    Uses sigma_n only where q_n >= 2. Declares a single class when the tail
    limsup and liminf estimates agree within 0.1; a complete rational
    expansion is inherently unclassifiable this way and says so.
    """
    pairs = exp.convergents()
    per: list[tuple[int, float]] = []
    for k in range(len(pairs) - 1):
        qn, qn1 = pairs[k][1], pairs[k + 1][1]
        if qn >= 2:
            per.append((k, math.log(qn1) / math.log(qn) - 1.0))
    if exp.exact_terminates:
        verdict = "indeterminate-finite"
        if per:
            tail = [s for _, s in per[-window:]]
            return SigmaEstimate(tuple(per), max(tail), min(tail), verdict, None)
        return SigmaEstimate((), math.nan, math.nan, verdict, None)
    if len(per) < 4:
        return SigmaEstimate(tuple(per),
                             max((s for _, s in per), default=math.nan),
                             min((s for _, s in per), default=math.nan),
                             "indeterminate-short", None)
    tail = [s for _, s in per[-window:]]
    hi, lo = max(tail), min(tail)
    if hi - lo <= 0.1:
        mid = 0.5 * (hi + lo)
        return SigmaEstimate(tuple(per), hi, lo, f"I({mid:.4g})", mid)
    return SigmaEstimate(tuple(per), hi, lo, "indeterminate-range", None)


def khinchin_levy_diagnostic(exp: CFExpansion) -> list[tuple[int, float]]:
    """(n, (ln q_n)/n) for each convergent with n >= 1; compare KHINCHIN_LEVY."""
    pairs = exp.convergents()
    return [(k, math.log(pairs[k][1]) / k) for k in range(1, len(pairs))]


_QUAD_RE = re.compile(
    r"\(\s*(-?\d+)\s*([+-]\s*\d+)\s*\*\s*sqrt\(\s*(\d+)\s*\)\s*\)\s*/\s*(-?\d+)"
)
_RAT_RE = re.compile(r"(-?\d+)\s*/\s*(-?\d+)")
_CLASS_RE = re.compile(r"sigma\s*=\s*([^,]+)\s*,\s*seed\s*=\s*(.+)")


def parse_timespec(text: str) -> TimeSpec:
    """Parse a time parameter string.

    Grammar:
      rat:<p>/<q>                      exact rational
      quad:(<a>+<b>*sqrt(<c>))/<d>     quadratic irrational
      class:sigma=<v>,seed=<a0,a1,..>  quotient growth rule
      dec:<digits>                     decimal literal, e.g. dec:0.4142135
    """
    s = text.strip()
    if ":" not in s:
        raise DomainError(
            f"time spec {text!r} needs a kind prefix rat:/quad:/class:/dec:")
    kind, _, rest = s.partition(":")
    kind = kind.strip().lower()
    rest = rest.strip()
    if kind == "rat":
        m = _RAT_RE.fullmatch(rest)
        if not m:
            raise DomainError(f"rat: expects p/q, got {rest!r}")
        return Rational(int(m.group(1)), int(m.group(2)))
    if kind == "quad":
        m = _QUAD_RE.fullmatch(rest)
        if not m:
            raise DomainError(
                f"quad: expects (a+b*sqrt(c))/d with integer a,b,c,d, got {rest!r}")
        a = int(m.group(1))
        b = int(m.group(2).replace(" ", ""))
        return QuadraticIrrational(a, b, int(m.group(3)), int(m.group(4)))
    if kind == "class":
        m = _CLASS_RE.fullmatch(rest)
        if not m:
            raise DomainError(
                f"class: expects sigma=<v>,seed=<list>, got {rest!r}")
        sig_text = m.group(1).strip()
        try:
            sigma = Fraction(sig_text)
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"bad sigma {sig_text!r}") from exc
        try:
            seed = tuple(int(a.strip()) for a in m.group(2).split(","))
        except ValueError as exc:
            raise DomainError(f"bad seed list {m.group(2)!r}") from exc
        return QuotientRule(sigma, seed)
    if kind == "dec":
        return DecimalLiteral(rest)
    raise DomainError(f"unknown time kind {kind!r} in {text!r}")
