"""Prime-field arithmetic, discrete logarithms, characters, and Gauss sums.

Everything downstream works inside a fixed ``PrimeField``: a prime q, the
smallest primitive root g, and the full discrete-log table of F_q^x.  The
additive character is fixed once and for all as psi(x) = exp(2*pi*i*x / q);
variants psi_a(x) = psi(a*x) are realized through the scale parameter a.
Multiplicative characters are indices a in Z/(q-1) with
chi_a(g^m) = exp(2*pi*i*a*m / (q-1)) and chi(0) = 0 (all sums here range
over F_q^x, so the middle-extension value at 0 is never used).

Summation policy: bulk reductions use numpy pairwise summation, and the few
scalar accumulations use math.fsum; both keep the absolute error of an
n-term unit-scale sum well below 1e3 * n * eps, the budget assumed by the
tolerance constants in this package.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

from .errors import PreconditionError, ResourceLimitError

MAX_Q = 2**31  # dlog table memory bound

_TWO_PI = 2.0 * math.pi


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3,215,031,751 (witnesses 2,3,5,7)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _factorize(n: int) -> list[int]:
    """Distinct prime factors of n by trial division (n < 2^31 here)."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def smallest_primitive_root(q: int) -> int:
    """Smallest g generating F_q^x, found by checking g^((q-1)/p) != 1 for p | q-1."""
    if q == 2:
        return 1
    exponents = [(q - 1) // p for p in _factorize(q - 1)]
    g = 2
    while True:
        if all(pow(g, e, q) != 1 for e in exponents):
            return g
        g += 1


@dataclass(frozen=True)
class PrimeField:
    """Prime field F_q with primitive root, discrete-log and power tables.

    dlog has length q with dlog[0] = -1 (0 has no logarithm) and
    dlog[g^m mod q] = m for 0 <= m < q-1.  exp has length q-1 with
    exp[m] = g^m mod q.
    """

    q: int
    g: int
    dlog: np.ndarray = dc_field(repr=False)
    exp: np.ndarray = dc_field(repr=False)

    def inv(self, x: int) -> int:
        x %= self.q
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(x, self.q - 2, self.q)

    @cached_property
    def inv_table(self) -> np.ndarray:
        """Inverse table: inv_table[x] = x^{-1} mod q, with inv_table[0] = 0."""
        t = np.zeros(self.q, dtype=np.int64)
        t[self.exp] = self.exp[np.concatenate(([0], np.arange(self.q - 2, 0, -1)))]
        t.flags.writeable = False
        return t


def build_field(q: int) -> PrimeField:
    """Construct F_q with verified primitive root and complete dlog table."""
    if not isinstance(q, int):
        raise PreconditionError(f"q must be an integer, got {type(q).__name__}")
    if q >= MAX_Q:
        raise ResourceLimitError(f"q = {q} >= 2^31: dlog table would exceed the memory bound")
    if q < 3:
        raise PreconditionError(f"q = {q} < 3: need an odd prime")
    if not is_prime(q):
        raise PreconditionError(f"q = {q} is not prime (composite or unit)")
    g = smallest_primitive_root(q)
    exp = np.empty(q - 1, dtype=np.int64)
    x = 1
    for m in range(q - 1):
        exp[m] = x
        x = x * g % q
    dlog = np.full(q, -1, dtype=np.int64)
    dlog[exp] = np.arange(q - 1)
    if dlog[1] != 0 or x != 1:
        raise ArithmeticError("primitive-root table construction failed")  # pragma: no cover
    exp.flags.writeable = False
    dlog.flags.writeable = False
    return PrimeField(q=q, g=g, dlog=dlog, exp=exp)


@dataclass(frozen=True)
class MultChar:
    """Multiplicative character of F_q^x, as an index a in Z/(q-1)."""

    field: PrimeField
    a: int

    def __post_init__(self):
        object.__setattr__(self, "a", self.a % (self.field.q - 1))

    @property
    def is_trivial(self) -> bool:
        return self.a == 0

    @property
    def order(self) -> int:
        n = self.field.q - 1
        return n // math.gcd(self.a, n)

    @property
    def is_even(self) -> bool:
        """chi(-1) = 1, i.e. a*(q-1)/2 = 0 mod q-1."""
        return (self.a * ((self.field.q - 1) // 2)) % (self.field.q - 1) == 0

    def __call__(self, x: int) -> complex:
        return eval_char(self, x)

    def __mul__(self, other: "MultChar") -> "MultChar":
        if other.field is not self.field and other.field.q != self.field.q:
            raise PreconditionError("characters live over different fields")
        return MultChar(self.field, self.a + other.a)

    def inverse(self) -> "MultChar":
        return MultChar(self.field, -self.a)

    def values_by_log(self) -> np.ndarray:
        """Vector chi(g^m) for m = 0..q-2."""
        n = self.field.q - 1
        return np.exp(2j * np.pi * (self.a * np.arange(n) % n) / n)

    def values_by_residue(self) -> np.ndarray:
        """Vector of length q: chi(x) for x = 0..q-1, with chi(0) = 0."""
        q = self.field.q
        out = np.zeros(q, dtype=np.complex128)
        out[self.field.exp] = self.values_by_log()
        return out


def eval_char(chi: MultChar, x: int) -> complex:
    """chi(x); returns 0 at x = 0, 1 for the trivial character at x != 0."""
    q = chi.field.q
    x %= q
    if x == 0:
        return 0j
    if chi.a == 0:
        return 1 + 0j
    m = int(chi.field.dlog[x])
    return cmath.exp(2j * math.pi * ((chi.a * m) % (q - 1)) / (q - 1))


def eval_additive(field: PrimeField, a: int, x: int) -> complex:
    """psi_a(x) = exp(2*pi*i*a*x / q)."""
    q = field.q
    return cmath.exp(2j * math.pi * ((a * x) % q) / q)


def additive_char_vector(field: PrimeField, a: int = 1) -> np.ndarray:
    """Vector psi_a(x) for x = 0..q-1."""
    q = field.q
    return np.exp(2j * np.pi * ((a * np.arange(q)) % q) / q)


def gauss_sum(chi: MultChar) -> complex:
    """tau(chi) = sum over y in F_q^x of chi(y) e(y/q), by direct summation."""
    f = chi.field
    psi = additive_char_vector(f)
    return complex(np.sum(chi.values_by_log() * psi[f.exp]))


def normalized_gauss_sum(chi: MultChar) -> complex:
    """epsilon_chi = tau(chi) / sqrt(q); modulus 1 for nontrivial chi, -1/sqrt(q) for trivial."""
    return gauss_sum(chi) / math.sqrt(chi.field.q)
