"""Finite fields GF(p^e) in polynomial basis over GF(p).

An element is an integer index in ``[0, q)``; the index ``sum(c_j * p**j)``
encodes the coefficient vector ``(c_0, ..., c_{e-1})`` of the element written
in the basis ``1, b, ..., b^(e-1)`` where ``b`` is a root of the modulus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

TABLE_BOUND = 1 << 12


class FieldError(ValueError):
    """Invalid field parameters or operands."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, e)`` with ``q == p**e``; raise if q is not a prime power."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    if r != 1:
        raise FieldError(f"{q} is not a prime power")
    return p, e


# -- dense polynomials over GF(p), lowest degree first --------------------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = [c % p for c in a]
    _trim(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for j, mj in enumerate(m):
            a[shift + j] = (a[shift + j] - c * mj) % p
        _trim(a)
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _psub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _pgcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(base: Sequence[int], k: int, m: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(base, m, p)
    while k:
        if k & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        k >>= 1
    return result


def is_irreducible_mod_p(coeffs: Sequence[int], p: int) -> bool:
    """Ben-Or test: f of degree e is irreducible iff gcd(f, x^(p^k) - x) = 1 for k <= e/2."""
    f = _trim([c % p for c in coeffs])
    e = len(f) - 1
    if e < 1:
        return False
    if e == 1:
        return True
    xk = [0, 1]
    for _ in range(e // 2):
        xk = _ppowmod(xk, p, f, p)
        if len(_pgcd(f, _psub(xk, [0, 1], p), p)) != 1:
            return False
    return True


def find_default_modulus(p: int, e: int) -> tuple[int, ...]:
    """First monic irreducible of degree e over GF(p).

    Candidates are scanned in ascending lexicographic order of
    ``(c_{e-1}, ..., c_0)``, i.e. ascending ``sum(c_j p^j)``.
    """
    if e < 2:
        raise FieldError("default modulus is only needed for e >= 2")
    for v in range(p ** e):
        coeffs = [(v // p ** j) % p for j in range(e)] + [1]
        if is_irreducible_mod_p(coeffs, p):
            return tuple(coeffs)
    raise AssertionError("no irreducible polynomial found")  # unreachable: nu_e >= 1


def _distinct_prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class FieldSpec:
    """GF(q) with q = p^e.  Build instances with :func:`make_field`."""

    p: int
    e: int
    modulus: tuple[int, ...] | None = None
    table_bound: int = field(default=TABLE_BOUND, compare=False, repr=False)

    @property
    def q(self) -> int:
        return self.p ** self.e

    @property
    def has_tables(self) -> bool:
        return self.q <= self.table_bound

    def __str__(self) -> str:
        return f"GF({self.q})"

    # -- index <-> coefficient vector ---------------------------------------

    def to_vector(self, a: int) -> tuple[int, ...]:
        return tuple((a // self.p ** j) % self.p for j in range(self.e))

    def from_vector(self, v: Sequence[int]) -> int:
        if len(v) > self.e:
            raise FieldError("vector longer than extension degree")
        return sum((c % self.p) * self.p ** j for j, c in enumerate(v))

    def element(self, index: int) -> "FieldElement":
        return FieldElement(self, self._check(index))

    def _check(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise FieldError(f"{a} is not an element index of {self}")
        return a

    # -- log/exp tables -----------------------------------------------------

    @cached_property
    def _log_exp(self) -> tuple[list[int], list[int]]:
        q = self.q
        if q == 2:
            return [0, 0], [1]
        primes = _distinct_prime_factors(q - 1)
        for g in range(2, q):
            if all(self._mul_direct_pow(g, (q - 1) // r) != 1 for r in primes):
                break
        else:
            raise AssertionError("no primitive element")  # unreachable
        exp = [1] * (q - 1)
        for k in range(1, q - 1):
            exp[k] = self._mul_direct(exp[k - 1], g)
        log = [0] * q
        for k, v in enumerate(exp):
            log[v] = k
        return log, exp

    @cached_property
    def add_table(self) -> np.ndarray:
        """Dense q x q addition table (only for q below the table bound)."""
        self._need_tables()
        vec = np.array([self.to_vector(a) for a in range(self.q)], dtype=np.int64)
        pw = self.p ** np.arange(self.e, dtype=np.int64)
        s = (vec[:, None, :] + vec[None, :, :]) % self.p
        return (s @ pw).astype(np.int32)

    @cached_property
    def mul_table(self) -> np.ndarray:
        """Dense q x q multiplication table (only for q below the table bound)."""
        self._need_tables()
        log, exp = self._log_exp
        q = self.q
        lg = np.array(log, dtype=np.int64)
        ex = np.array(exp, dtype=np.int32)
        t = ex[(lg[:, None] + lg[None, :]) % (q - 1)]
        t[0, :] = 0
        t[:, 0] = 0
        return t

    @cached_property
    def inv_table(self) -> np.ndarray:
        self._need_tables()
        out = np.zeros(self.q, dtype=np.int32)
        for a in range(1, self.q):
            out[a] = self.inv(a)
        return out

    def _need_tables(self) -> None:
        if not self.has_tables:
            raise FieldError(f"{self} exceeds the table bound {self.table_bound}")

    # -- scalar arithmetic on indices ---------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        p, out, w = self.p, 0, 1
        for _ in range(self.e):
            out += ((a % p + b % p) % p) * w
            a //= p
            b //= p
            w *= p
        return out

    def neg(self, a: int) -> int:
        if self.e == 1:
            return -a % self.p
        if self.p == 2:
            return a
        p, out, w = self.p, 0, 1
        for _ in range(self.e):
            out += (-(a % p) % p) * w
            a //= p
            w *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        if self.has_tables:
            log, exp = self._log_exp
            return exp[(log[a] + log[b]) % (self.q - 1)]
        return self._mul_direct(a, b)

    def _mul_direct(self, a: int, b: int) -> int:
        """Multiply by polynomial product and reduction by the modulus."""
        if self.e == 1:
            return a * b % self.p
        prod = _pmul(self.to_vector(a), self.to_vector(b), self.p)
        return self.from_vector(_pmod(prod, self.modulus, self.p))

    def _mul_direct_pow(self, a: int, n: int) -> int:
        r = 1
        while n:
            if n & 1:
                r = self._mul_direct(r, a)
            a = self._mul_direct(a, a)
            n >>= 1
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self}")
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        if self.has_tables:
            log, exp = self._log_exp
            return exp[-log[a] % (self.q - 1)]
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(a), -n)
        r = 1
        while n:
            if n & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            n >>= 1
        return r


@dataclass(frozen=True)
class FieldElement:
    field: FieldSpec
    index: int

    def _other(self, other: "FieldElement | int") -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError(f"cannot combine elements of {self.field} and {other.field}")
            return other.index
        if isinstance(other, int):
            return self.field._check(other)
        return NotImplemented

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.index, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.index, self._other(other)))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.index, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.index, self._other(other)))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.index))

    def __pow__(self, n: int):
        return FieldElement(self.field, self.field.pow(self.index, n))

    def inv(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.index))

    def __int__(self) -> int:
        return self.index

    def __repr__(self) -> str:
        return f"{self.field}({self.index})"


def make_field(
    p: int,
    e: int = 1,
    modulus: Sequence[int] | None = None,
    *,
    table_bound: int = TABLE_BOUND,
    allow_table_free: bool = True,
) -> FieldSpec:
    """Construct GF(p^e).

    ``modulus`` lists the GF(p) coefficients lowest degree first and must be
    monic irreducible of degree ``e``; when omitted and ``e > 1`` the default
    modulus from :func:`find_default_modulus` is used.
    """
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if e < 1:
        raise FieldError("extension degree must be >= 1")
    if p ** e > table_bound and not allow_table_free:
        raise FieldError(f"GF({p}^{e}) exceeds the table bound {table_bound}")
    if e == 1:
        if modulus is not None and len(_trim([c % p for c in modulus])) not in (0, 2):
            raise FieldError("a prime field takes no modulus of degree != 1")
        return FieldSpec(p, 1, None, table_bound)
    if modulus is None:
        mod = find_default_modulus(p, e)
    else:
        mod = tuple(_trim([int(c) % p for c in modulus]))
        if len(mod) != e + 1 or mod[-1] != 1:
            raise FieldError(f"modulus must be monic of degree {e}")
        if not is_irreducible_mod_p(mod, p):
            raise FieldError("modulus is reducible")
    return FieldSpec(p, e, mod, table_bound)


def field_of_order(q: int, **kwargs) -> FieldSpec:
    p, e = prime_power(q)
    return make_field(p, e, **kwargs)
