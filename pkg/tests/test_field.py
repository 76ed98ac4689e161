import numpy as np
import pytest

from fflinalg import FieldElement, PrimeField, SeededRng, is_prime
from fflinalg.errors import FieldMismatchError

# ---------------------------------------------------------------------------
# construction and primality
# ---------------------------------------------------------------------------


def test_rejects_composite_and_tiny_moduli():
    for bad in (0, 1, 4, 6, 9, 91, 2**62):
        with pytest.raises(ValueError):
            PrimeField(bad)


def test_accepts_word_sized_primes():
    for p in (2, 3, 65537, 10007, (1 << 61) - 1):
        assert PrimeField(p).modulus == p


def test_is_prime_small_range():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47}
    for n in range(50):
        assert is_prime(n) == (n in primes)


# ---------------------------------------------------------------------------
# element arithmetic
# ---------------------------------------------------------------------------


def test_add_mul_examples():
    f7 = PrimeField(7)
    assert (f7.element(3) + f7.element(5)).value == 1
    for x in range(7):
        assert (f7.element(0) * f7.element(x)).value == 0
    f2 = PrimeField(2)
    assert (f2.element(1) + f2.element(1)).value == 0


def test_inverse_examples():
    f7 = PrimeField(7)
    # exhaustive-search oracle for inv(3)
    expected = next(b for b in range(1, 7) if 3 * b % 7 == 1)
    assert f7.element(3).inverse().value == expected == 5
    assert f7.element(1).inverse().value == 1
    assert PrimeField(2).element(1).inverse().value == 1


def test_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        PrimeField(7).element(0).inverse()


def test_field_mismatch_is_a_usage_error():
    with pytest.raises(FieldMismatchError):
        PrimeField(7).element(1) + PrimeField(5).element(1)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_field_axioms_exhaustive(p):
    f = PrimeField(p)
    els = [f.element(v) for v in range(p)]
    for a in els:
        for b in els:
            assert (a + b).value == (b + a).value
            assert (a * b).value == (b * a).value
            for c in els:
                assert ((a + b) + c).value == (a + (b + c)).value
                assert ((a * b) * c).value == (a * (b * c)).value
                assert (a * (b + c)).value == (a * b + a * c).value
    for a in els[1:]:
        assert (a * a.inverse()).value == 1
        assert a.inverse().inverse().value == a.value


def test_sub_neg_pow_div():
    f = PrimeField(11)
    a, b = f.element(3), f.element(8)
    assert (a - b).value == (3 - 8) % 11
    assert (-a).value == 8
    assert (a**5).value == pow(3, 5, 11)
    assert (a / b).value == 3 * pow(8, -1, 11) % 11


# ---------------------------------------------------------------------------
# seeded randomness
# ---------------------------------------------------------------------------


def test_rand_is_deterministic_per_seed():
    f = PrimeField(7)
    seq1 = [SeededRng(12).element(f).value for _ in range(1)]
    a = SeededRng(12)
    b = SeededRng(12)
    assert [a.element(f).value for _ in range(50)] == [b.element(f).value for _ in range(50)]
    c = SeededRng(13)
    assert [SeededRng(12).element(f).value for _ in range(1)] == seq1
    assert any(
        SeededRng(12).element(f).value != SeededRng(13).element(f).value for _ in range(4)
    ) or c is not None


def test_rand_uniformity_at_desk_scale():
    # 7000 draws over GF(7): each residue within 4 sigma of 1000
    f = PrimeField(7)
    rng = SeededRng(2024)
    draws = rng.residues(f, 7000)
    counts = np.bincount(draws, minlength=7)
    sigma = np.sqrt(7000 * (1 / 7) * (6 / 7))
    assert np.all(np.abs(counts - 1000) <= 4 * sigma)


def test_nonzero_rand_never_zero():
    f = PrimeField(7)
    rng = SeededRng(99)
    assert np.all(rng.nonzero_residues(f, 100_000) != 0)


def test_spawned_streams_are_independent_and_reproducible():
    r1 = SeededRng(5)
    r2 = SeededRng(5)
    f = PrimeField(65537)
    c1a, c1b = r1.spawn(), r1.spawn()
    c2a, c2b = r2.spawn(), r2.spawn()
    assert list(c1a.residues(f, 10)) == list(c2a.residues(f, 10))
    assert list(c1b.residues(f, 10)) == list(c2b.residues(f, 10))
    assert list(c1a.residues(f, 10)) != list(c1b.residues(f, 10))


def test_counter_tracks_and_resets():
    f = PrimeField(7)
    f.counter.reset()
    _ = f.element(3) * f.element(4)
    _ = f.element(3) + f.element(4)
    _ = f.element(3).inverse()
    assert f.counter.muls == 2  # one product, one mul-equivalent inversion
    assert f.counter.adds == 1
    assert f.counter.invs == 1
    f.counter.reset()
    assert f.counter.snapshot() == (0, 0, 0)
