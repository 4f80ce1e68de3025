"""Classification tests, cross-checked against a literal brute-force
classifier that enumerates divisors and dualizing characters straight from
the definition."""

import itertools
from collections import Counter

import numpy as np
import pytest

from klsums.chartuples import (
    CharTuple,
    cgm_twist_from_nio,
    check_kummer_witness,
    classify_tuple,
    dualizing_characters,
    is_kummer_induced,
)
from klsums.errors import PreconditionError
from klsums.field import build_field


# --- literal oracle, written independently from the definition --------------


def oracle_kummer(indices, n):
    """True iff the multiset is a union of full fibers of a -> d*a for some
    d | k, d != 1.  Enumerates ALL tuples of fiber base points."""
    k = len(indices)
    target = Counter(indices)
    for d in range(2, k + 1):
        if k % d != 0:
            continue
        base_points = [e for e in range(n) if any(d * a % n == e for a in range(n))]
        for xi in itertools.combinations_with_replacement(base_points, k // d):
            acc = Counter()
            for e in xi:
                acc.update(a for a in range(n) if d * a % n == e)
            if acc == target:
                return True
    return False


def oracle_dualizing(indices, n):
    ms = Counter(indices)
    out = []
    k = len(indices)
    lam = sum(indices) % n
    for e in range(n):
        if Counter((e - a) % n for a in indices) == ms:
            alt = k % 2 == 0 and (e * (k // 2)) % n == lam
            out.append((e, "alternating" if alt else "symmetric"))
    return out


def oracle_nio(indices, n):
    k = len(indices)
    if oracle_kummer(indices, n):
        return False
    if k % 2 == 1:
        return True
    return not any(tag == "symmetric" for _, tag in oracle_dualizing(indices, n))


def oracle_cgm(indices, n):
    k = len(indices)
    if oracle_kummer(indices, n):
        return False
    if sum(indices) % n != 0:
        return False
    duals = oracle_dualizing(indices, n)
    if k % 2 == 1 or not duals:
        return True
    return any(e == 0 and tag == "alternating" for e, tag in duals)


# --- exhaustive cross-checks -------------------------------------------------


@pytest.mark.parametrize("q,k", [(5, 1), (5, 2), (5, 3), (7, 2), (7, 3), (13, 2), (13, 3)])
def test_exhaustive_cross_check(q, k):
    f = build_field(q)
    n = q - 1
    for idx in itertools.product(range(n), repeat=k):
        t = CharTuple(f, idx)
        rep = classify_tuple(t)
        assert rep.kummer_induced == oracle_kummer(idx, n), idx
        assert sorted(rep.dualizing) == sorted(oracle_dualizing(idx, n)), idx
        assert rep.nio == oracle_nio(idx, n), idx
        assert rep.cgm == oracle_cgm(idx, n), idx
        if rep.kummer_induced:
            assert check_kummer_witness(t, rep.kummer_witness)


# --- pinned examples ---------------------------------------------------------


def test_salie_is_kummer_induced(f5):
    flag, witness = is_kummer_induced(CharTuple(f5, (0, 2)))
    assert flag and witness.d == 2


def test_double_trivial_not_kummer_induced(f5):
    # the fiber of squaring above the trivial character is {1, chi_(2)}, not {1, 1}
    flag, _ = is_kummer_induced(CharTuple(f5, (0, 0)))
    assert not flag


def test_k_coprime_to_group_order(f7):
    # k = 5 has no divisor d != 1 with d | q-1 = 6, so never Kummer-induced
    flag, _ = is_kummer_induced(CharTuple(f7, (1, 2, 3, 4, 5)))
    assert not flag


def test_all_trivial_has_nio():
    for q, k in [(5, 2), (5, 3), (7, 4), (13, 5)]:
        f = build_field(q)
        assert classify_tuple(CharTuple(f, (0,) * k)).nio


def test_classical_kloosterman_cgm(f5):
    rep = classify_tuple(CharTuple(f5, (0, 0)))
    assert rep.dualizing == [(0, "alternating")]
    assert rep.cgm and rep.nio


def test_odd_k_nio_iff_not_induced(f13):
    for idx in [(0, 0, 1), (1, 2, 3), (0, 5, 5)]:
        t = CharTuple(f13, idx)
        rep = classify_tuple(t)
        assert rep.nio == (not rep.kummer_induced)


def test_permutation_invariance(f13):
    rng = np.random.Generator(np.random.PCG64(5))
    for _ in range(50):
        k = int(rng.integers(2, 5))
        idx = tuple(int(v) for v in rng.integers(0, 12, size=k))
        perm = tuple(idx[i] for i in rng.permutation(k))
        a, b = classify_tuple(CharTuple(f13, idx)), classify_tuple(CharTuple(f13, perm))
        assert (a.nio, a.cgm, a.kummer_induced) == (b.nio, b.cgm, b.kummer_induced)
        assert sorted(a.dualizing) == sorted(b.dualizing)


@pytest.mark.parametrize("q", [5, 7, 13])
def test_twist_preserves_kummer_induced(q):
    f = build_field(q)
    n = q - 1
    rng = np.random.Generator(np.random.PCG64(9))
    for _ in range(200):
        k = int(rng.integers(2, 4))
        idx = tuple(int(v) for v in rng.integers(0, n, size=k))
        a0 = int(rng.integers(0, n))
        t = CharTuple(f, idx)
        assert is_kummer_induced(t)[0] == is_kummer_induced(t.twist(a0))[0]


@pytest.mark.parametrize("q,k", [(5, 2), (5, 3), (7, 2), (7, 3), (13, 2), (13, 3)])
def test_lemma_how_to_twist(q, k):
    """Every NIO tuple whose required root character exists over F_q twists to CGM."""
    f = build_field(q)
    n = q - 1
    checked = 0
    for idx in itertools.product(range(n), repeat=k):
        t = CharTuple(f, idx)
        if not classify_tuple(t).nio:
            continue
        twisted = cgm_twist_from_nio(t)
        if twisted is None:
            continue  # needs an extension field: out of scope
        checked += 1
        assert classify_tuple(twisted).cgm, idx
    assert checked > 0


def test_cgm_twist_requires_nio(f5):
    with pytest.raises(PreconditionError):
        cgm_twist_from_nio(CharTuple(f5, (0, 2)))  # Salie: not NIO


def test_report_json_fields(f5):
    data = classify_tuple(CharTuple(f5, (0, 0))).to_json()
    assert set(data) == {
        "lambda_index",
        "kummer_induced",
        "kummer_witness",
        "dualizing",
        "nio",
        "cgm",
        "mixed_duality",
    }
    assert data["dualizing"][0] == {"xi_index": 0, "tag": "alternating"}


def test_empty_tuple_rejected(f5):
    with pytest.raises(PreconditionError):
        CharTuple(f5, ())


def test_mixed_duality_flagged(f5):
    assert classify_tuple(CharTuple(f5, (0, 2))).mixed_duality


def test_dualizing_direct(f13):
    # self-dual with xi = chi1*chi2 always holds for k = 2
    for idx in [(0, 0), (1, 3), (5, 2)]:
        duals = dualizing_characters(CharTuple(f13, idx))
        assert any(e == sum(idx) % 12 for e, _ in duals)
