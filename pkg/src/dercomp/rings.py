"""Exact arithmetic over the supported commutative rings.

Ring descriptors are small frozen dataclasses.  Matrices and modules store
raw element payloads (``int``, ``Fraction`` or coefficient tuples) for speed;
:class:`RingElement` wraps a payload together with its ring for the public
element-level API.

Supported rings::

    Z            Integers()
    Z/m          IntegersMod(m)
    F/p          PrimeField(p)
    Q            Rationals()
    Z[t]/(f)     MonicQuotient(Integers(), f)     f monic, coefficients low -> high
    F/p[t]/(f)   MonicQuotient(PrimeField(p), f)
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Any

__all__ = [
    "RingError",
    "NonEuclideanError",
    "Ring",
    "Integers",
    "IntegersMod",
    "PrimeField",
    "Rationals",
    "MonicQuotient",
    "RingElement",
    "ZZ",
    "QQ",
    "arith",
    "divmod_euclidean",
    "parse_ring",
    "parse_polynomial",
    "is_prime",
]


class RingError(ValueError):
    """Invalid ring data or mixed-ring arithmetic."""


class NonEuclideanError(RingError):
    """Raised when a Euclidean operation is requested over a non-Euclidean ring."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Ring:
    """Common interface; concrete rings override the payload operations."""

    kind: str = "?"
    is_field = False
    is_euclidean = False

    # payload level -------------------------------------------------------
    def zero(self) -> Any:
        raise NotImplementedError

    def one(self) -> Any:
        raise NotImplementedError

    def from_int(self, n: int) -> Any:
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return not a

    def normalize(self, a):
        return a

    def format(self, a) -> str:
        return str(a)

    def parse_element(self, text: str):
        raise NotImplementedError

    # Euclidean structure -------------------------------------------------
    def norm(self, a) -> int:
        raise NonEuclideanError(f"{self} is non-Euclidean; use integer-representation fallback")

    def divmod(self, a, b):
        raise NonEuclideanError(f"{self} is non-Euclidean; use integer-representation fallback")

    def canonical_associate(self, a):
        """Return (unit, a') with a' = unit * a in canonical form."""
        raise NonEuclideanError(f"{self} has no canonical associates")

    def inverse(self, a):
        raise RingError(f"no inverse available in {self}")

    def element(self, value) -> "RingElement":
        if isinstance(value, str):
            value = self.parse_element(value)
        elif isinstance(value, int) and not isinstance(value, bool):
            value = self.from_int(value)
        return RingElement(self, self.normalize(value))


@dataclass(frozen=True)
class Integers(Ring):
    kind = "Z"
    is_euclidean = True

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n):
        return int(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def parse_element(self, text):
        return int(text.strip())

    def norm(self, a):
        return abs(a)

    def divmod(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero in Z")
        # least non-negative remainder
        r = a % abs(b)
        return (a - r) // b, r

    def canonical_associate(self, a):
        return (-1, -a) if a < 0 else (1, a)

    def inverse(self, a):
        if a in (1, -1):
            return a
        raise RingError(f"{a} is not a unit in Z")

    def __str__(self):
        return "Z"


@dataclass(frozen=True)
class IntegersMod(Ring):
    m: int

    kind = "Z/m"

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 2:
            raise RingError("Z/m requires m >= 2")

    def zero(self):
        return 0

    def one(self):
        return 1 % self.m

    def from_int(self, n):
        return int(n) % self.m

    def add(self, a, b):
        return (a + b) % self.m

    def sub(self, a, b):
        return (a - b) % self.m

    def neg(self, a):
        return -a % self.m

    def mul(self, a, b):
        return a * b % self.m

    def normalize(self, a):
        return a % self.m

    def parse_element(self, text):
        return int(text.strip()) % self.m

    def _prime(self):
        return is_prime(self.m)

    def norm(self, a):
        if not self._prime():
            return super().norm(a)
        return 0 if a == 0 else 1

    def divmod(self, a, b):
        if not self._prime():
            return super().divmod(a, b)
        if b % self.m == 0:
            raise ZeroDivisionError("division by zero")
        return a * pow(b, -1, self.m) % self.m, 0

    def canonical_associate(self, a):
        if not self._prime():
            return super().canonical_associate(a)
        if a % self.m == 0:
            return 1, 0
        return pow(a, -1, self.m), 1

    def inverse(self, a):
        if gcd(a, self.m) != 1:
            raise RingError(f"{a} is not a unit in {self}")
        return pow(a, -1, self.m)

    def __str__(self):
        return f"Z/{self.m}"


@dataclass(frozen=True)
class PrimeField(Ring):
    p: int

    kind = "F"
    is_field = True
    is_euclidean = True

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise RingError(f"F/{self.p}: characteristic must be prime")

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n):
        return int(n) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def normalize(self, a):
        return a % self.p

    def parse_element(self, text):
        return int(text.strip()) % self.p

    def norm(self, a):
        return 0 if a == 0 else 1

    def divmod(self, a, b):
        if b % self.p == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return a * pow(b, -1, self.p) % self.p, 0

    def canonical_associate(self, a):
        if a == 0:
            return 1, 0
        return pow(a, -1, self.p), 1

    def inverse(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return pow(a, -1, self.p)

    def __str__(self):
        return f"F/{self.p}"


@dataclass(frozen=True)
class Rationals(Ring):
    kind = "Q"
    is_field = True
    is_euclidean = True

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, n):
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def normalize(self, a):
        return Fraction(a)

    def parse_element(self, text):
        return Fraction(text.strip())

    def format(self, a):
        return str(a)

    def norm(self, a):
        return 0 if a == 0 else 1

    def divmod(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero in Q")
        return Fraction(a) / b, Fraction(0)

    def canonical_associate(self, a):
        if a == 0:
            return Fraction(1), Fraction(0)
        return 1 / Fraction(a), Fraction(1)

    def inverse(self, a):
        return 1 / Fraction(a)

    def __str__(self):
        return "Q"


@dataclass(frozen=True)
class MonicQuotient(Ring):
    """``base[t]/(modulus)`` with ``modulus`` monic, coefficients low to high."""

    base: Ring
    modulus: tuple

    kind = "monic"

    def __post_init__(self):
        if not isinstance(self.base, (Integers, PrimeField)):
            raise RingError("MonicQuotient base must be Z or F/p")
        mod = tuple(self.base.normalize(c) for c in self.modulus)
        while len(mod) > 1 and self.base.is_zero(mod[-1]):
            mod = mod[:-1]
        if len(mod) < 2:
            raise RingError("modulus must have degree >= 1")
        if mod[-1] != self.base.one():
            raise RingError("modulus must be monic")
        object.__setattr__(self, "modulus", mod)

    @property
    def degree(self) -> int:
        return len(self.modulus) - 1

    def zero(self):
        return (self.base.zero(),) * self.degree

    def one(self):
        return (self.base.one(),) + (self.base.zero(),) * (self.degree - 1)

    def from_int(self, n):
        return (self.base.from_int(n),) + (self.base.zero(),) * (self.degree - 1)

    def gen(self):
        """The class of t."""
        return self.reduce([self.base.zero(), self.base.one()])

    def reduce(self, coeffs) -> tuple:
        b = self.base
        c = [b.normalize(x) for x in coeffs]
        n = self.degree
        mod = self.modulus
        for top in range(len(c) - 1, n - 1, -1):
            lead = c[top]
            if b.is_zero(lead):
                continue
            shift = top - n
            for i in range(n + 1):
                c[shift + i] = b.sub(c[shift + i], b.mul(lead, mod[i]))
        c = c[:n] + [b.zero()] * max(0, n - len(c))
        return tuple(c)

    def normalize(self, a):
        if isinstance(a, int):
            return self.from_int(a)
        return self.reduce(list(a))

    def is_zero(self, a):
        return not any(a)

    def add(self, a, b):
        B = self.base
        return tuple(B.add(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        B = self.base
        return tuple(B.sub(x, y) for x, y in zip(a, b))

    def neg(self, a):
        return tuple(self.base.neg(x) for x in a)

    def mul(self, a, b):
        B = self.base
        out = [B.zero()] * (2 * self.degree - 1)
        for i, x in enumerate(a):
            if B.is_zero(x):
                continue
            for j, y in enumerate(b):
                if not B.is_zero(y):
                    out[i + j] = B.add(out[i + j], B.mul(x, y))
        return self.reduce(out)

    def power(self, a, e: int):
        out = self.one()
        for _ in range(e):
            out = self.mul(out, a)
        return out

    def evaluate(self, a, value):
        """Evaluate the representative polynomial at a base-ring value."""
        B = self.base
        acc = B.zero()
        for c in reversed(a):
            acc = B.add(B.mul(acc, value), c)
        return acc

    def parse_element(self, text):
        return self.reduce(parse_polynomial(text, self.base))

    def format(self, a):
        return format_polynomial(a, self.base)

    def __str__(self):
        return f"{self.base}[t]/({format_polynomial(self.modulus, self.base)})"


ZZ = Integers()
QQ = Rationals()


@dataclass(frozen=True)
class RingElement:
    ring: Ring
    value: Any

    def _check(self, other):
        if not isinstance(other, RingElement):
            other = self.ring.element(other)
        if other.ring != self.ring:
            raise RingError(f"ring mismatch: {self.ring} vs {other.ring}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return RingElement(self.ring, self.ring.add(self.value, other.value))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return RingElement(self.ring, self.ring.sub(self.value, other.value))

    def __mul__(self, other):
        other = self._check(other)
        return RingElement(self.ring, self.ring.mul(self.value, other.value))

    __rmul__ = __mul__

    def __neg__(self):
        return RingElement(self.ring, self.ring.neg(self.value))

    def __eq__(self, other):
        if not isinstance(other, RingElement):
            try:
                other = self.ring.element(other)
            except (RingError, ValueError, TypeError):
                return NotImplemented
        return self.ring == other.ring and self.value == other.value

    def __hash__(self):
        return hash((self.ring, self.value))

    def is_zero(self) -> bool:
        return self.ring.is_zero(self.value)

    def __str__(self):
        return self.ring.format(self.value)

    __repr__ = __str__


def arith(a: RingElement, b: RingElement, op: str) -> RingElement:
    """Exact ``add``/``sub``/``mul`` of two elements of the same ring."""
    if a.ring != b.ring:
        raise RingError(f"ring mismatch: {a.ring} vs {b.ring}")
    fn = {"add": a.ring.add, "sub": a.ring.sub, "mul": a.ring.mul}.get(op)
    if fn is None:
        raise ValueError(f"unknown operation {op!r}")
    return RingElement(a.ring, fn(a.value, b.value))


def divmod_euclidean(a: RingElement, b: RingElement) -> tuple[RingElement, RingElement]:
    if a.ring != b.ring:
        raise RingError(f"ring mismatch: {a.ring} vs {b.ring}")
    R = a.ring
    if not R.is_euclidean and not (isinstance(R, IntegersMod) and is_prime(R.m)):
        raise NonEuclideanError(f"{R} is non-Euclidean; use integer-representation fallback")
    if R.is_zero(b.value):
        raise ZeroDivisionError("division by zero")
    q, r = R.divmod(a.value, b.value)
    return RingElement(R, q), RingElement(R, r)


# -- literals ---------------------------------------------------------------

_TERM = re.compile(r"([+-]?)([^+-]+)")


def parse_polynomial(text: str, base: Ring) -> list:
    """Parse ``"1+2*t^3"`` style literals into a low-to-high coefficient list."""
    s = text.replace(" ", "")
    if not s:
        raise RingError("empty polynomial literal")
    coeffs: dict[int, Any] = {}
    pos = 0
    for m in _TERM.finditer(s):
        if m.start() != pos:
            raise RingError(f"cannot parse polynomial {text!r}")
        pos = m.end()
        sign, body = m.group(1), m.group(2)
        if "t" in body:
            if body.count("t") != 1:
                raise RingError(f"multivariate or malformed term {body!r}")
            coef_s, _, rest = body.partition("t")
            coef_s = coef_s.rstrip("*")
            coef = int(coef_s) if coef_s else 1
            if rest == "":
                exp = 1
            elif rest.startswith("^"):
                exp = int(rest[1:])
            else:
                raise RingError(f"malformed term {body!r}")
        else:
            if not re.fullmatch(r"\d+", body):
                raise RingError(f"malformed term {body!r} (only the variable t is supported)")
            coef, exp = int(body), 0
        if sign == "-":
            coef = -coef
        coeffs[exp] = coeffs.get(exp, 0) + coef
    if pos != len(s):
        raise RingError(f"cannot parse polynomial {text!r}")
    deg = max(coeffs)
    return [base.from_int(coeffs.get(i, 0)) for i in range(deg + 1)]


def format_polynomial(coeffs, base: Ring) -> str:
    terms = []
    for e in range(len(coeffs) - 1, -1, -1):
        c = coeffs[e]
        if base.is_zero(c):
            continue
        c = int(c)
        if isinstance(base, PrimeField) and c > base.p // 2 and base.p > 2:
            c -= base.p
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if e == 0:
            body = str(a)
        else:
            mon = "t" if e == 1 else f"t^{e}"
            body = mon if a == 1 else f"{a}*{mon}"
        terms.append((sign, body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += sign + body
    return out


_MONIC = re.compile(r"^(?P<base>Z|F/\d+)\[(?P<vars>[^\]]+)\]/\((?P<mod>.+)\)$")


def parse_ring(text: str) -> Ring:
    """Parse ring literals: ``Z``, ``Q``, ``Z/4``, ``F/5``, ``Z[t]/(t^4-1)``."""
    s = text.replace(" ", "")
    if s == "Z":
        return ZZ
    if s == "Q":
        return QQ
    m = _MONIC.match(s)
    if m:
        if m.group("vars") != "t":
            raise RingError("multivariate polynomial rings are not supported")
        base = parse_ring(m.group("base"))
        return MonicQuotient(base, tuple(parse_polynomial(m.group("mod"), base)))
    m = re.fullmatch(r"Z/(\d+)", s)
    if m:
        return IntegersMod(int(m.group(1)))
    m = re.fullmatch(r"F/?(\d+)", s)
    if m:
        return PrimeField(int(m.group(1)))
    raise RingError(f"unknown ring literal {text!r}")
