"""Dense univariate polynomials over a :class:`FieldSpec`, factorization, excess."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

from .finite_field import FieldElement, FieldError, FieldSpec

if TYPE_CHECKING:
    from .irreducibles import IrreducibleStore


class _ZeroDegree:
    """Degree of the zero polynomial; below every integer, supports no arithmetic."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ZERO_DEGREE"

    def __lt__(self, other):
        return isinstance(other, int)

    def __le__(self, other):
        return isinstance(other, int) or other is self

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return other is self

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("ZERO_DEGREE")


ZERO_DEGREE = _ZeroDegree()


@dataclass(frozen=True)
class Poly:
    """Polynomial with coefficient indices ``coeffs`` (lowest degree first)."""

    field: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.coeffs and self.coeffs[-1] == 0:
            raise ValueError("coefficients carry trailing zeros; use Poly.make")

    # -- construction -------------------------------------------------------

    @classmethod
    def make(cls, field: FieldSpec, coeffs: Iterable[int | FieldElement]) -> "Poly":
        c = [int(a) for a in coeffs]
        for a in c:
            field._check(a)
        while c and c[-1] == 0:
            c.pop()
        return cls(field, tuple(c))

    @classmethod
    def zero(cls, field: FieldSpec) -> "Poly":
        return cls(field, ())

    @classmethod
    def one(cls, field: FieldSpec) -> "Poly":
        return cls(field, (1,))

    @classmethod
    def x(cls, field: FieldSpec) -> "Poly":
        return cls(field, (0, 1))

    @classmethod
    def monomial(cls, field: FieldSpec, k: int, c: int = 1) -> "Poly":
        return cls.make(field, [0] * k + [c])

    @classmethod
    def from_code(cls, field: FieldSpec, code: int) -> "Poly":
        return decode(field, code)

    # -- basic properties ---------------------------------------------------

    @property
    def degree(self) -> int | _ZeroDegree:
        return len(self.coeffs) - 1 if self.coeffs else ZERO_DEGREE

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    @property
    def code(self) -> int:
        return encode(self)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({self.field}, {format_poly(self)!r})"

    # -- arithmetic ---------------------------------------------------------

    def _same(self, other: "Poly") -> None:
        if not isinstance(other, Poly):
            raise TypeError(f"expected Poly, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldError("polynomials over different fields")

    def __add__(self, other: "Poly") -> "Poly":
        self._same(other)
        F = self.field
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = F.add(out[i], c)
        return Poly.make(F, out)

    def __neg__(self) -> "Poly":
        return Poly(self.field, tuple(self.field.neg(c) for c in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        self._same(other)
        F = self.field
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly.zero(F)
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        out[i + j] = F.add(out[i + j], F.mul(ai, bj))
        return Poly.make(F, out)

    def scale(self, c: int) -> "Poly":
        return Poly.make(self.field, [self.field.mul(c, a) for a in self.coeffs])

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative polynomial power")
        result, base = Poly.one(self.field), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other: "Poly") -> tuple["Poly", "Poly"]:
        self._same(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        F = self.field
        r = list(self.coeffs)
        db = len(other.coeffs) - 1
        inv_lead = F.inv(other.coeffs[-1])
        quot = [0] * max(len(r) - db, 0)
        while len(r) - 1 >= db and r:
            c = F.mul(r[-1], inv_lead)
            shift = len(r) - 1 - db
            quot[shift] = c
            for j, bj in enumerate(other.coeffs):
                if bj:
                    r[shift + j] = F.sub(r[shift + j], F.mul(c, bj))
            while r and r[-1] == 0:
                r.pop()
        return Poly.make(F, quot), Poly.make(F, r)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def derivative(self) -> "Poly":
        F = self.field
        out = []
        for k in range(1, len(self.coeffs)):
            # k * c in characteristic p: k mod p copies of c
            c, acc = self.coeffs[k], 0
            for _ in range(k % F.p):
                acc = F.add(acc, c)
            out.append(acc)
        return Poly.make(F, out)

    def monic(self) -> "Poly":
        if self.is_zero:
            raise ZeroDivisionError("zero polynomial has no monic associate")
        return self.scale(self.field.inv(self.leading))

    def __call__(self, a: int) -> int:
        F, acc = self.field, 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, a), c)
        return acc


def gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd; gcd(0, 0) is the zero polynomial."""
    while not b.is_zero:
        a, b = b, a % b
    return a if a.is_zero else a.monic()


# -- integer codes ---------------------------------------------------------------

def encode(f: Poly) -> int:
    """``sum(index(c_i) * q**i)``; monic degree-n codes fill ``[q^n, 2q^n)``."""
    q, code = f.field.q, 0
    for c in reversed(f.coeffs):
        code = code * q + c
    return code


def decode(field: FieldSpec, code: int, degree: int | None = None) -> Poly:
    """Inverse of :func:`encode`.

    With ``degree`` given, the code must denote a polynomial of exactly that
    degree (as the monic code ranges require).
    """
    code = int(code)
    if code < 0:
        raise ValueError("negative polynomial code")
    q, c = field.q, []
    while code:
        code, r = divmod(code, q)
        c.append(r)
    f = Poly(field, tuple(c))
    if degree is not None and f.degree != degree:
        raise ValueError(f"code does not denote a degree-{degree} polynomial")
    return f


def monic_code_range(q: int, n: int) -> range:
    return range(q ** n, 2 * q ** n)


# -- text format -----------------------------------------------------------------

def format_poly(f: Poly) -> str:
    if f.is_zero:
        return "0"
    terms = []
    for k in range(len(f.coeffs) - 1, -1, -1):
        c = f.coeffs[k]
        if c == 0:
            continue
        if k == 0:
            terms.append(str(c))
            continue
        mono = "x" if k == 1 else f"x^{k}"
        terms.append(mono if c == 1 else f"{c}*{mono}")
    return "+".join(terms)


_TERM = re.compile(r"^(?:(\d+)\*)?x(?:\^(\d+))?$|^(\d+)$")


def parse_poly(field: FieldSpec, text: str) -> Poly:
    """Parse terms ``c*x^k``, ``x^k``, ``x`` and constants joined by ``+``.

    Integer coefficients are reduced mod p over a prime field; over GF(p^e)
    they are element indices and must lie in ``[0, q)``.  Repeated powers add.
    """
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    coeffs: dict[int, int] = {}
    for term in s.split("+"):
        m = _TERM.match(term)
        if not m:
            raise ValueError(f"malformed term {term!r}")
        if m.group(3) is not None:
            c, k = int(m.group(3)), 0
        else:
            c = int(m.group(1)) if m.group(1) is not None else 1
            k = int(m.group(2)) if m.group(2) is not None else 1
        if field.e == 1:
            c %= field.p
        else:
            field._check(c)
        coeffs[k] = field.add(coeffs.get(k, 0), c)
    top = max(coeffs)
    return Poly.make(field, [coeffs.get(k, 0) for k in range(top + 1)])


# -- factorization ----------------------------------------------------------------

@dataclass(frozen=True)
class Factorization:
    """``unit * prod(pi**alpha)`` with pairs sorted by (degree, code)."""

    field: FieldSpec
    unit: int
    factors: tuple[tuple[Poly, int], ...]

    def expand(self) -> Poly:
        out = Poly.make(self.field, [self.unit])
        for pi, alpha in self.factors:
            out = out * pi ** alpha
        return out

    def __str__(self) -> str:
        parts = [f"({pi})" + (f"^{a}" if a > 1 else "") for pi, a in self.factors]
        if self.unit != 1 or not parts:
            parts.insert(0, str(self.unit))
        return "*".join(parts)


def is_squarefree(f: Poly) -> bool:
    """True iff gcd(f, f') = 1."""
    if f.is_zero or f.degree < 1:
        raise ValueError("squarefree test needs degree >= 1")
    return gcd(f, f.derivative()).degree == 0


def excess(fac: Factorization | Sequence[tuple[object, int]]) -> int:
    """Total multiplicity minus number of distinct primes."""
    pairs = fac.factors if isinstance(fac, Factorization) else fac
    return sum(alpha - 1 for _, alpha in pairs)


def _collect(field: FieldSpec, unit: int, primes: list[Poly]) -> Factorization:
    counts: dict[int, list] = {}
    for pi in primes:
        entry = counts.setdefault(pi.code, [pi, 0])
        entry[1] += 1
    ordered = sorted(counts.values(), key=lambda e: (e[0].degree, e[0].code))
    return Factorization(field, unit, tuple((pi, a) for pi, a in ordered))


def factor(f: Poly, irr: "IrreducibleStore") -> Factorization:
    """Factor ``f`` using an irreducible store.

    Uses table lookups when ``deg f`` lies within the store's SPF range and
    trial division by the stored irreducibles (degrees <= deg f / 2) otherwise.
    """
    if f.is_zero:
        raise ValueError("cannot factor the zero polynomial")
    F = f.field
    if irr.field != F:
        raise FieldError("irreducible store belongs to another field")
    unit = f.leading
    g = f.monic()
    n = g.degree
    if n == 0:
        return Factorization(F, unit, ())
    if irr.has_spf(n):
        return _collect(F, unit, [Poly.from_code(F, c) for c in irr.spf_chain(g.code)])
    if irr.max_degree < n // 2:
        raise ValueError(
            f"irreducible store covers degree {irr.max_degree}, need {n // 2} for degree {n}"
        )
    primes: list[Poly] = []
    for d in range(1, n // 2 + 1):
        if 2 * d > g.degree:
            break
        for code in irr.irreducible_codes(d):
            pi = Poly.from_code(F, code)
            while True:
                quo, rem = divmod(g, pi)
                if not rem.is_zero:
                    break
                primes.append(pi)
                g = quo
            if 2 * d > g.degree:
                break
    if g.degree >= 1:
        primes.append(g)
    return _collect(F, unit, primes)


def is_irreducible_trial(f: Poly) -> bool:
    """Independent irreducibility check: no monic divisor of degree <= deg/2.

    Exhaustive over all monic candidates; intended for test-sized inputs.
    """
    if f.is_zero or f.degree < 1:
        return False
    F, n = f.field, f.degree
    for d in range(1, n // 2 + 1):
        for code in monic_code_range(F.q, d):
            if (f % decode(F, code)).is_zero:
                return False
    return True
