"""Complex Grassmann algebra with paired generators.

An algebra with ``m`` pairs has ``2m`` anticommuting generators.  Pair ``i``
(1-based in text, ``theta_i`` and ``theta_i#``) occupies bit slots ``2(i-1)``
and ``2(i-1)+1``.  A monomial is the ascending product of the generators whose
bits are set in an integer mask, so the empty mask is the unit.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from numbers import Number

import numpy as np

MAX_GENERATORS = 16
ATOL = 1e-12


class GrassmannError(ValueError):
    pass


class NotInvertibleError(GrassmannError):
    pass


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"
    MIXED = "mixed"
    ZERO = "zero"


@dataclass(frozen=True)
class AlgebraContext:
    num_pairs: int

    def __post_init__(self):
        if self.num_pairs < 0 or 2 * self.num_pairs > MAX_GENERATORS:
            raise GrassmannError(
                f"num_pairs must be in [0, {MAX_GENERATORS // 2}], got {self.num_pairs}")

    @property
    def num_generators(self) -> int:
        return 2 * self.num_pairs

    @property
    def size(self) -> int:
        return 1 << self.num_generators

    def zero(self) -> "Supernumber":
        return Supernumber(self, {})

    def one(self) -> "Supernumber":
        return Supernumber(self, {0: 1.0 + 0j})

    def scalar(self, c) -> "Supernumber":
        return Supernumber(self, {0: complex(c)})

    def theta(self, i: int, star: bool = False) -> "Supernumber":
        """Generator ``theta_i`` (or ``theta_i#``), ``i`` counted from 1."""
        if not 1 <= i <= self.num_pairs:
            raise GrassmannError(f"generator index {i} outside 1..{self.num_pairs}")
        return Supernumber(self, {1 << slot_of(i, star): 1.0 + 0j})


def slot_of(i: int, star: bool) -> int:
    return 2 * (i - 1) + int(star)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def merge_sign(a: int, b: int) -> int:
    """Sign of reordering theta_a * theta_b into ascending order (0 if they overlap)."""
    if a & b:
        return 0
    swaps = 0
    while b:
        low = b & -b
        swaps += popcount(a & ~((low << 1) - 1))
        b ^= low
    return -1 if swaps & 1 else 1


@lru_cache(maxsize=None)
def _star_image(mask: int) -> tuple[int, int]:
    # each factor is mapped in place: slot 2i -> 2i+1, slot 2i+1 -> -(2i)
    slots = []
    sign = 1
    k = 0
    m = mask
    while m:
        if m & 1:
            if k % 2 == 0:
                slots.append(k + 1)
            else:
                slots.append(k - 1)
                sign = -sign
        m >>= 1
        k += 1
    inversions = sum(1 for x in range(len(slots)) for y in range(x + 1, len(slots))
                     if slots[x] > slots[y])
    if inversions & 1:
        sign = -sign
    image = 0
    for s in slots:
        image |= 1 << s
    return image, sign


@lru_cache(maxsize=None)
def star_table(num_pairs: int) -> tuple[np.ndarray, np.ndarray]:
    """Arrays (image, sign) describing the superstar on every monomial."""
    size = 1 << (2 * num_pairs)
    image = np.empty(size, dtype=np.int64)
    sign = np.empty(size, dtype=np.int8)
    for mask in range(size):
        image[mask], sign[mask] = _star_image(mask)
    return image, sign


@lru_cache(maxsize=None)
def parity_table(num_pairs: int) -> np.ndarray:
    size = 1 << (2 * num_pairs)
    bits = np.arange(size, dtype=np.int64)
    par = np.zeros(size, dtype=np.int8)
    while bits.any():
        par ^= (bits & 1).astype(np.int8)
        bits >>= 1
    return par


_POPCOUNT16 = None


def _popcount_array(x: np.ndarray) -> np.ndarray:
    global _POPCOUNT16
    if _POPCOUNT16 is None:
        _POPCOUNT16 = np.array([popcount(i) for i in range(1 << 16)], dtype=np.int64)
    return _POPCOUNT16[x & 0xFFFF]


def merge_signs(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorised :func:`merge_sign` over broadcast mask arrays."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
    swaps = np.zeros(a.shape, dtype=np.int64)
    for j in range(MAX_GENERATORS):
        bit = (b >> j) & 1
        swaps += bit * _popcount_array(a >> (j + 1))
    sign = np.where(swaps & 1, -1, 1)
    return np.where(a & b, 0, sign)


def _as_complex(c) -> complex:
    return complex(c)


class Supernumber:
    """Immutable element of the Grassmann algebra; ``coeffs`` maps mask -> complex."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: AlgebraContext, coeffs: dict | None = None):
        clean = {}
        for mask, c in (coeffs or {}).items():
            c = complex(c)
            if c != 0:
                if mask < 0 or mask >= ctx.size:
                    raise GrassmannError(f"monomial mask {mask} outside algebra of size {ctx.size}")
                clean[int(mask)] = c
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Supernumber is immutable")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_array(cls, ctx: AlgebraContext, arr) -> "Supernumber":
        arr = np.asarray(arr)
        nz = np.flatnonzero(arr)
        return cls(ctx, {int(k): complex(arr[k]) for k in nz})

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.ctx.size, dtype=complex)
        for mask, c in self.coeffs.items():
            out[mask] = c
        return out

    def _coerce(self, other) -> "Supernumber":
        if isinstance(other, Supernumber):
            if other.ctx != self.ctx:
                raise GrassmannError(f"context mismatch: {self.ctx} vs {other.ctx}")
            return other
        if isinstance(other, Number):
            return self.ctx.scalar(other)
        return NotImplemented

    # -- decomposition --------------------------------------------------------

    @property
    def body(self) -> complex:
        return self.coeffs.get(0, 0j)

    def soul(self) -> "Supernumber":
        return Supernumber(self.ctx, {m: c for m, c in self.coeffs.items() if m})

    def even_part(self) -> "Supernumber":
        return Supernumber(self.ctx, {m: c for m, c in self.coeffs.items() if not popcount(m) & 1})

    def odd_part(self) -> "Supernumber":
        return Supernumber(self.ctx, {m: c for m, c in self.coeffs.items() if popcount(m) & 1})

    def grade(self) -> Parity:
        if not self.coeffs:
            return Parity.ZERO
        parities = {popcount(m) & 1 for m in self.coeffs}
        if parities == {0}:
            return Parity.EVEN
        if parities == {1}:
            return Parity.ODD
        return Parity.MIXED

    def is_zero(self) -> bool:
        return not self.coeffs

    # -- arithmetic -------------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return Supernumber(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return Supernumber(self.ctx, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return Supernumber(self.ctx, {m: c * other for m, c in self.coeffs.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[int, complex] = {}
        for a, ca in self.coeffs.items():
            for b, cb in other.coeffs.items():
                s = merge_sign(a, b)
                if s:
                    out[a | b] = out.get(a | b, 0) + s * ca * cb
        return Supernumber(self.ctx, out)

    def __rmul__(self, other):
        if isinstance(other, Number):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Number):
            return self * (1 / other)
        return self * self._coerce(other).inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.ctx.one()
        for _ in range(k):
            out = out * self
        return out

    def superstar(self) -> "Supernumber":
        out: dict[int, complex] = {}
        for m, c in self.coeffs.items():
            image, sign = _star_image(m)
            out[image] = out.get(image, 0) + sign * c.conjugate()
        return Supernumber(self.ctx, out)

    def conj_body(self) -> complex:
        return self.body.conjugate()

    def inverse(self) -> "Supernumber":
        """Exact inverse via the terminating series z_B^-1 sum (-z_B^-1 z_S)^k."""
        b = self.body
        if b == 0:
            raise NotInvertibleError("supernumber with zero body is not invertible")
        x = self.soul() * (-1 / b)
        term = self.ctx.one()
        total = self.ctx.one()
        for _ in range(self.ctx.num_generators):
            term = term * x
            if term.is_zero():
                break
            total = total + term
        return total * (1 / b)

    def _series(self, first: complex, coefficient) -> "Supernumber":
        # f(b + s) = sum_k f^(k)(b)/k! s^k, finite because s is nilpotent
        s = self.soul()
        total = self.ctx.scalar(first)
        power = self.ctx.one()
        for k in range(1, self.ctx.num_generators + 1):
            power = power * s
            if power.is_zero():
                break
            total = total + power * coefficient(k)
        return total

    def exp(self) -> "Supernumber":
        if self.odd_part().coeffs:
            raise GrassmannError("exp is defined here for even supernumbers only")
        eb = np.exp(self.body)
        return self._series(eb, lambda k: eb / math.factorial(k))

    def log(self) -> "Supernumber":
        b = self.body
        if b == 0 or self.odd_part().coeffs:
            raise GrassmannError("log needs an even supernumber with nonzero body")
        return self._series(np.log(b), lambda k: (-1) ** (k + 1) / (k * b ** k))

    def power(self, r: float) -> "Supernumber":
        """Real power of an even supernumber with nonzero body (principal branch)."""
        b = self.body
        if b == 0 or self.odd_part().coeffs:
            raise GrassmannError("power needs an even supernumber with nonzero body")
        br = b ** r

        def coeff(k):
            binom = 1.0
            for j in range(k):
                binom *= (r - j) / (j + 1)
            return br * binom / b ** k

        return self._series(br, coeff)

    # -- comparison ---------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Number):
            other = self.ctx.scalar(other)
        if not isinstance(other, Supernumber):
            return NotImplemented
        return self.ctx == other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx, frozenset(self.coeffs.items())))

    def isclose(self, other, atol: float = ATOL) -> bool:
        other = self._coerce(other)
        diff = self - other
        return all(abs(c) <= atol for c in diff.coeffs.values())

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def chop(self, atol: float = ATOL) -> "Supernumber":
        """Drop coefficients below ``atol`` and snap near-integer parts."""
        out = {}
        for m, c in self.coeffs.items():
            re_, im_ = c.real, c.imag
            if abs(re_) <= atol:
                re_ = 0.0
            if abs(im_) <= atol:
                im_ = 0.0
            out[m] = complex(re_, im_)
        return Supernumber(self.ctx, out)

    # -- text ------------------------------------------------------------------

    def __str__(self):
        return format_supernumber(self)

    def __repr__(self):
        return f"Supernumber({format_supernumber(self)!r}, pairs={self.ctx.num_pairs})"


# -- text format ----------------------------------------------------------------
#
# term ::= complex '*' mono | complex ;  mono ::= gen ('^' gen)* ;
# gen ::= 't'INT | 't'INT'#' ; terms joined by '+' (a leading '-' negates).


def _fmt_real(x: float) -> str:
    x = float(x)
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def format_complex(c: complex) -> str:
    re_, im_ = c.real, c.imag
    if im_ == 0:
        return _fmt_real(re_)
    if re_ == 0:
        return _fmt_real(im_) + "i"
    sign = "+" if im_ >= 0 else "-"
    return f"({_fmt_real(re_)}{sign}{_fmt_real(abs(im_))}i)"


def format_monomial(mask: int) -> str:
    gens = []
    k = 0
    while mask:
        if mask & 1:
            gens.append(f"t{k // 2 + 1}" + ("#" if k % 2 else ""))
        mask >>= 1
        k += 1
    return "^".join(gens)


def _monomial_key(mask: int):
    slots = [k for k in range(MAX_GENERATORS) if mask >> k & 1]
    return (len(slots), slots)


def format_supernumber(z: Supernumber) -> str:
    if not z.coeffs:
        return "0"
    parts = []
    for mask in sorted(z.coeffs, key=_monomial_key):
        c = z.coeffs[mask]
        negative = (c.imag == 0 and c.real < 0) or (c.real == 0 and c.imag < 0)
        coeff = format_complex(-c if negative else c)
        text = coeff if mask == 0 else f"{coeff}*{format_monomial(mask)}"
        parts.append(("-" if negative else "+", text))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, text in parts[1:]:
        out += f" {sign} {text}"
    return out


_TOKEN = re.compile(r"""
    (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?P<imag>i)?
  | (?P<gen>t(?P<idx>\d+)(?P<star>\#)?)
  | (?P<i>i)
  | (?P<op>[-+*^()])
  | (?P<ws>\s+)
""", re.VERBOSE)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise GrassmannError(f"cannot parse {text!r} at position {pos}")
        pos = m.end()
        if m.group("ws"):
            continue
        if m.group("num") is not None:
            v = float(m.group("num"))
            tokens.append(("num", complex(0, v) if m.group("imag") else complex(v)))
        elif m.group("gen"):
            tokens.append(("gen", (int(m.group("idx")), bool(m.group("star")))))
        elif m.group("i"):
            tokens.append(("num", 1j))
        else:
            tokens.append(("op", m.group("op")))
    return tokens


class _Parser:
    def __init__(self, ctx: AlgebraContext, text: str):
        self.ctx = ctx
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, op=None):
        tok = self.peek()
        if tok[0] is None or (op is not None and tok != ("op", op)):
            raise GrassmannError(f"expected {op or 'token'} at token {self.pos}, got {tok}")
        self.pos += 1
        return tok

    def expr(self) -> Supernumber:
        sign = 1
        if self.peek() in (("op", "+"), ("op", "-")):
            sign = -1 if self.take()[1] == "-" else 1
        total = self.term() * sign
        while self.peek() in (("op", "+"), ("op", "-")):
            sign = -1 if self.take()[1] == "-" else 1
            total = total + self.term() * sign
        return total

    def term(self) -> Supernumber:
        value = self.factor()
        while self.peek() in (("op", "*"), ("op", "^")):
            self.take()
            value = value * self.factor()
        return value

    def factor(self) -> Supernumber:
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return self.ctx.scalar(val)
        if kind == "gen":
            self.take()
            return self.ctx.theta(*val)
        if (kind, val) == ("op", "("):
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        if (kind, val) == ("op", "-"):
            self.take()
            return -self.factor()
        raise GrassmannError(f"unexpected token {val!r}")


def parse_supernumber(text: str, ctx: AlgebraContext) -> Supernumber:
    p = _Parser(ctx, text)
    value = p.expr()
    if p.pos != len(p.tokens):
        raise GrassmannError(f"trailing input in {text!r}")
    return value


def max_generator_pair(text: str) -> int:
    """Largest pair index mentioned in a text expression (0 if none)."""
    found = [int(m) for m in re.findall(r"t(\d+)", text)]
    return max(found, default=0)
