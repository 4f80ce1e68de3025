"""Classification of k-tuples of multiplicative characters.

A tuple is stored as its multiset of indices in Z/(q-1).  The properties
decided here are purely combinatorial:

* Kummer-induced: the multiset is a union of full fibers of the d-th power
  map on the character group, for some divisor d != 1 of k (the map a -> d*a
  on Z/(q-1); a fiber is nonempty only when d | q-1, in which case it is a
  coset of the subgroup generated by (q-1)/d).
* self-dual with dualizing character xi: the multiset is stable under
  a -> e - a, where e is the index of xi.  A dualizing xi is alternating
  when k is even and Lambda = xi^(k/2), otherwise symmetric.
* NIO: not Kummer-induced, and (k odd, or no dualizing character is
  symmetric).  When several dualizing characters of mixed tags exist we take
  the conservative reading: one symmetric dualizing character kills NIO; the
  report carries a ``mixed_duality`` flag so the ambiguity stays visible.
* CGM: not Kummer-induced, Lambda trivial, and (k odd, or not self-dual, or
  the trivial character is a dualizing character with the alternating tag).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .errors import PreconditionError
from .field import MultChar, PrimeField


@dataclass(frozen=True)
class CharTuple:
    """Ordered tuple of character indices over one prime field."""

    field: PrimeField
    indices: tuple[int, ...]

    def __post_init__(self):
        if len(self.indices) < 1:
            raise PreconditionError("need k >= 1 characters")
        n = self.field.q - 1
        object.__setattr__(self, "indices", tuple(a % n for a in self.indices))

    @property
    def k(self) -> int:
        return len(self.indices)

    @property
    def lambda_index(self) -> int:
        """Index of Lambda = chi_1 * ... * chi_k."""
        return sum(self.indices) % (self.field.q - 1)

    def chars(self) -> tuple[MultChar, ...]:
        return tuple(MultChar(self.field, a) for a in self.indices)

    def twist(self, a0: int) -> "CharTuple":
        """The tuple chi_0 * chars with chi_0 of index a0."""
        return CharTuple(self.field, tuple(a + a0 for a in self.indices))


@dataclass(frozen=True)
class KummerWitness:
    d: int
    xi_indices: tuple[int, ...]  # k/d fiber base points, with multiplicity


@dataclass
class ClassificationReport:
    lambda_index: int
    kummer_induced: bool
    kummer_witness: KummerWitness | None
    dualizing: list[tuple[int, str]]  # (xi index, "symmetric" | "alternating")
    nio: bool
    cgm: bool
    mixed_duality: bool

    def to_json(self) -> dict:
        return {
            "lambda_index": self.lambda_index,
            "kummer_induced": self.kummer_induced,
            "kummer_witness": (
                None
                if self.kummer_witness is None
                else {"d": self.kummer_witness.d, "xi_indices": list(self.kummer_witness.xi_indices)}
            ),
            "dualizing": [{"xi_index": e, "tag": tag} for e, tag in self.dualizing],
            "nio": self.nio,
            "cgm": self.cgm,
            "mixed_duality": self.mixed_duality,
        }


def _divisors(k: int) -> list[int]:
    return [d for d in range(2, k + 1) if k % d == 0]


def _fiber(d: int, xi_index: int, n: int) -> list[int] | None:
    """Indices a with d*a = xi_index mod n, i.e. the d-th power fiber over xi."""
    g = math.gcd(d, n)
    if xi_index % g != 0:
        return None
    # one solution of d*a = xi (mod n), then translate by the kernel n/g * t
    a0 = (xi_index // g) * pow(d // g, -1, n // g) % (n // g)
    return sorted((a0 + (n // g) * t) % n for t in range(g))


def is_kummer_induced(t: CharTuple) -> tuple[bool, KummerWitness | None]:
    """Exhaustive search over divisors d | k, d != 1, for a full-fiber decomposition.

    A union of k/d fibers of a -> d*a has size (k/d) * gcd(d, q-1), so only
    divisors with gcd(d, q-1) = d (i.e. d | q-1) can work.  Distinct fibers
    are disjoint cosets, so greedy peeling is exact.
    """
    n = t.field.q - 1
    k = t.k
    for d in _divisors(k):
        if n % d != 0:
            continue
        remaining = Counter(t.indices)
        xi_list: list[int] = []
        ok = True
        while remaining:
            a = min(remaining)
            fib = _fiber(d, d * a % n, n)
            assert fib is not None and a in fib
            if any(remaining[b] < 1 for b in fib):
                ok = False
                break
            for b in fib:
                remaining[b] -= 1
                if remaining[b] == 0:
                    del remaining[b]
            xi_list.append(d * a % n)
        if ok:
            return True, KummerWitness(d=d, xi_indices=tuple(sorted(xi_list)))
    return False, None


def check_kummer_witness(t: CharTuple, w: KummerWitness) -> bool:
    """Recheck: the multiset of the witness fibers reproduces the tuple exactly."""
    n = t.field.q - 1
    acc: Counter = Counter()
    for e in w.xi_indices:
        fib = _fiber(w.d, e, n)
        if fib is None:
            return False
        acc.update(fib)
    return acc == Counter(t.indices)


def dualizing_characters(t: CharTuple) -> list[tuple[int, str]]:
    """All xi with the multiset stable under a -> xi - a, tagged symmetric/alternating."""
    n = t.field.q - 1
    ms = Counter(t.indices)
    lam = t.lambda_index
    out = []
    for e in range(n):
        if Counter((e - a) % n for a in t.indices) == ms:
            alternating = t.k % 2 == 0 and (e * (t.k // 2)) % n == lam
            out.append((e, "alternating" if alternating else "symmetric"))
    return out


def classify_tuple(t: CharTuple) -> ClassificationReport:
    ki, witness = is_kummer_induced(t)
    duals = dualizing_characters(t)
    tags = {tag for _, tag in duals}
    has_symmetric = "symmetric" in tags
    trivial_alternating = any(e == 0 and tag == "alternating" for e, tag in duals)
    nio = (not ki) and (t.k % 2 == 1 or not has_symmetric)
    cgm = (
        (not ki)
        and t.lambda_index == 0
        and (t.k % 2 == 1 or not duals or trivial_alternating)
    )
    return ClassificationReport(
        lambda_index=t.lambda_index,
        kummer_induced=ki,
        kummer_witness=witness,
        dualizing=duals,
        nio=nio,
        cgm=cgm,
        mixed_duality=len(tags) > 1,
    )


def cgm_twist_from_nio(t: CharTuple) -> CharTuple | None:
    """Twist an NIO tuple into a CGM tuple over F_q itself, when possible.

    For a self-dual alternating tuple the twist is the inverse of a square
    root of the dualizing character; otherwise it is the inverse of a k-th
    root of Lambda.  Passing to an extension field is out of scope, so when
    the required root does not exist in Z/(q-1) this returns None
    ("needs extension").
    """
    rep = classify_tuple(t)
    if not rep.nio:
        raise PreconditionError("tuple does not have NIO")
    n = t.field.q - 1
    if t.k % 2 == 0 and rep.dualizing:
        # all dualizing tags are alternating here (NIO excludes symmetric ones)
        for e, _tag in rep.dualizing:
            a0 = _solve_root(2, -e % n, n)
            if a0 is not None:
                return t.twist(a0)
        return None
    a0 = _solve_root(t.k, -rep.lambda_index % n, n)
    return None if a0 is None else t.twist(a0)


def _solve_root(m: int, target: int, n: int) -> int | None:
    """Some a with m*a = target mod n, or None."""
    g = math.gcd(m, n)
    if target % g != 0:
        return None
    return (target // g) * pow(m // g, -1, n // g) % n
