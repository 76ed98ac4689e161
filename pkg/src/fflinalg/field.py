"""Arithmetic in GF(p) for a word-sized prime modulus.

A ``PrimeField`` is the arithmetic context every matrix in this library is
bound to.  Scalars are plain Python integers in canonical form ``[0, p)``;
``FieldElement`` wraps one together with its field for operator syntax.
The field also owns an ``OpCounter`` that the matrix kernels use to record
how many field multiplications/additions a computation performed.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .errors import FieldMismatchError

MAX_MODULUS = 1 << 62

# Deterministic Miller-Rabin witnesses for n < 3.3e24 (covers 62-bit moduli).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic primality test for word-sized integers."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n == q:
            return True
        if n % q == 0:
            return False
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class OpCounter:
    """Tally of field operations, attached to a PrimeField.

    Counters are bulk-incremented by vectorized kernels and are monotone
    nondecreasing until ``reset``.  An inversion counts as one
    mul-equivalent plus one entry in ``invs``.
    """

    __slots__ = ("muls", "adds", "invs")

    def __init__(self):
        self.muls = 0
        self.adds = 0
        self.invs = 0

    def reset(self):
        self.muls = 0
        self.adds = 0
        self.invs = 0

    def snapshot(self):
        return (self.muls, self.adds, self.invs)

    def as_dict(self):
        return {"muls": self.muls, "adds": self.adds, "invs": self.invs}

    def __repr__(self):
        return f"OpCounter(muls={self.muls}, adds={self.adds}, invs={self.invs})"


class PrimeField:
    """GF(p) context for a runtime-checked prime 2 <= p < 2**62.

    Instances compare and hash by modulus only; the attached counter is
    bookkeeping, not value state.  Fields are otherwise immutable and safe
    to share (counters assume single-threaded kernels).
    """

    __slots__ = ("modulus", "counter")

    def __init__(self, modulus: int):
        modulus = int(modulus)
        if not 2 <= modulus < MAX_MODULUS:
            raise ValueError(f"modulus must lie in [2, 2^62), got {modulus}")
        if not is_prime(modulus):
            raise ValueError(f"modulus {modulus} is not prime")
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "counter", OpCounter())

    def __setattr__(self, name, value):
        raise AttributeError("PrimeField is immutable")

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.modulus == self.modulus

    def __hash__(self):
        return hash(("PrimeField", self.modulus))

    def __repr__(self):
        return f"PrimeField({self.modulus})"

    # -- scalar arithmetic on canonical ints ------------------------------

    def element(self, value: int) -> "FieldElement":
        return FieldElement(int(value) % self.modulus, self)

    def add(self, a: int, b: int) -> int:
        self.counter.adds += 1
        return (a + b) % self.modulus

    def sub(self, a: int, b: int) -> int:
        self.counter.adds += 1
        return (a - b) % self.modulus

    def mul(self, a: int, b: int) -> int:
        self.counter.muls += 1
        return (a * b) % self.modulus

    def neg(self, a: int) -> int:
        return (-a) % self.modulus

    def inv(self, a: int) -> int:
        """Multiplicative inverse; raises ZeroDivisionError on 0."""
        if a % self.modulus == 0:
            raise ZeroDivisionError("0 has no inverse in GF(p)")
        self.counter.muls += 1
        self.counter.invs += 1
        return pow(a, -1, self.modulus)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a = self.inv(a)
            e = -e
        self.counter.muls += max(e.bit_length() - 1, 0) * 2
        return pow(a, e, self.modulus)

    # -- numpy plumbing ----------------------------------------------------

    @property
    def dtype(self):
        """int64 when every product of canonical residues fits; else exact objects."""
        return np.int64 if (self.modulus - 1) ** 2 < 2**63 else object


@dataclass(frozen=True)
class FieldElement:
    """A canonical residue bound to its field."""

    value: int
    field: PrimeField

    def __post_init__(self):
        if not 0 <= self.value < self.field.modulus:
            object.__setattr__(self, "value", self.value % self.field.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatchError(
                    f"GF({self.field.modulus}) vs GF({other.field.modulus})"
                )
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other) % self.field.modulus
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.field.add(self.value, v), self.field)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.field.sub(self.value, v), self.field)

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.field.sub(v, self.value), self.field)

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.field.mul(self.value, v), self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.field.neg(self.value), self.field)

    def __pow__(self, e: int):
        return FieldElement(self.field.pow(self.value, e), self.field)

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.field.mul(self.value, self.field.inv(v)), self.field)

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.field.modulus})"


class SeededRng:
    """Splittable deterministic randomness source.

    One SeededRng is threaded explicitly through every probabilistic
    operation so that whole pipelines are reproducible from a single seed.
    ``spawn`` derives independent child streams (for retry loops that must
    not perturb sibling draws).
    """

    def __init__(self, seed, _bit_generator=None):
        if _bit_generator is not None:
            self._gen = np.random.Generator(_bit_generator)
            self.seed = seed
        else:
            self.seed = int(seed)
            self._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed)))

    def spawn(self) -> "SeededRng":
        (child,) = self._gen.bit_generator.seed_seq.spawn(1)
        return SeededRng(child.entropy, _bit_generator=np.random.PCG64(child))

    def integers(self, low, high, size=None):
        out = self._gen.integers(low, high, size=size, dtype=np.int64)
        return out

    def element(self, field: PrimeField) -> FieldElement:
        """Uniform over [0, p)."""
        return FieldElement(int(self.integers(0, field.modulus)), field)

    def nonzero_element(self, field: PrimeField) -> FieldElement:
        """Uniform over [1, p)."""
        return FieldElement(int(self.integers(1, field.modulus)), field)

    def residues(self, field: PrimeField, size) -> np.ndarray:
        return self.integers(0, field.modulus, size=size)

    def nonzero_residues(self, field: PrimeField, size) -> np.ndarray:
        return self.integers(1, field.modulus, size=size)

    def shuffle(self, seq):
        self._gen.shuffle(seq)
