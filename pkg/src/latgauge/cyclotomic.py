"""Exact arithmetic with roots of unity.

A phase is a power of the primitive L-th root of unity w = exp(2*pi*i/L),
stored as an integer exponent mod L.  A sum of such phases is stored as an
integer count vector c of length L, meaning sum_k c[k] * w**k.  Count
vectors multiply by cyclic convolution and a vector equals an ordinary
integer n exactly when the polynomial sum_k c[k] x**k - n is divisible by
the L-th cyclotomic polynomial, which is decided with exact integer
polynomial division.  No floating point enters any of these checks.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@functools.lru_cache(maxsize=None)
def cyclotomic_polynomial(order: int) -> tuple[int, ...]:
    """Coefficients (ascending) of the cyclotomic polynomial Phi_order."""
    if order < 1:
        raise ValueError("order must be positive")
    # x**order - 1 divided by the product of Phi_d over proper divisors d.
    poly = [-1] + [0] * (order - 1) + [1]
    for d in range(1, order):
        if order % d == 0:
            poly = _polydiv_exact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials; remainder must vanish."""
    num = list(num)
    quot = [0] * (len(num) - len(den) + 1)
    for k in range(len(quot) - 1, -1, -1):
        c = num[k + len(den) - 1]
        if c % den[-1] != 0:
            raise ArithmeticError("inexact polynomial division")
        q = c // den[-1]
        quot[k] = q
        for i, dc in enumerate(den):
            num[k + i] -= q * dc
    if any(num):
        raise ArithmeticError("nonzero remainder in exact polynomial division")
    return quot


def phase_counts_as_integer(counts: np.ndarray) -> int:
    """Exact integer value of sum_k counts[k] * w**k, or raise.

    The value is an integer iff the count polynomial is congruent to a
    constant modulo Phi_L.  Raises ArithmeticError otherwise.
    """
    counts = np.asarray(counts, dtype=object)
    modulus = counts.shape[-1]
    phi = list(cyclotomic_polynomial(modulus))
    rem = [int(c) for c in counts]
    # Reduce modulo Phi_L by exact long division (quotient discarded).
    for k in range(len(rem) - 1, len(phi) - 2, -1):
        c = rem[k]
        if c == 0:
            continue
        # Phi_L is monic, so the division is always exact.
        for i, pc in enumerate(phi):
            rem[k - len(phi) + 1 + i] -= c * pc
    if any(rem[1:]):
        raise ArithmeticError("phase sum is not a rational integer")
    return rem[0]


def phase_counts_value(counts: np.ndarray) -> complex:
    """Floating point value of a count vector (for reports only)."""
    modulus = counts.shape[-1]
    roots = np.exp(2j * np.pi * np.arange(modulus) / modulus)
    return complex(np.tensordot(np.asarray(counts, dtype=float), roots, axes=1))


@dataclass
class PhaseTensor:
    """Exact tensor whose entries are integer combinations of L-th roots.

    counts has shape (*dims, L); entry(i) = scale * sum_k counts[i, k] w**k.
    Used for operator-level identity checks where zero tolerance is
    required: equality is integer array equality.
    """

    counts: np.ndarray
    scale: Fraction = Fraction(1)

    @property
    def modulus(self) -> int:
        return self.counts.shape[-1]

    @classmethod
    def zeros(cls, shape: tuple[int, ...], modulus: int) -> "PhaseTensor":
        return cls(np.zeros(shape + (modulus,), dtype=np.int64))

    def copy(self) -> "PhaseTensor":
        return PhaseTensor(self.counts.copy(), self.scale)

    def mul_root(self, k: int) -> "PhaseTensor":
        """Multiply every entry by w**k."""
        return PhaseTensor(np.roll(self.counts, k % self.modulus, axis=-1), self.scale)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PhaseTensor):
            return NotImplemented
        return self.scale == other.scale and np.array_equal(self.counts, other.counts)

    def proportional(self, other: "PhaseTensor") -> Fraction | None:
        """Return r with self = r * other entrywise (exact), else None.

        Only count-identical tensors up to the scalar prefactor are
        recognised, which covers the term-by-term constructions used here.
        """
        if self.counts.shape != other.counts.shape:
            return None
        if not np.array_equal(self.counts, other.counts):
            return None
        if other.scale == 0:
            return None
        return self.scale / other.scale

    def to_complex(self) -> np.ndarray:
        roots = np.exp(2j * np.pi * np.arange(self.modulus) / self.modulus)
        return float(self.scale) * np.tensordot(
            self.counts.astype(float), roots, axes=1
        )


def mono_mul_left(tensor: PhaseTensor, perm: np.ndarray, phase: np.ndarray) -> PhaseTensor:
    """Exact product M . T for a matrix-shaped tensor T.

    M is the monomial matrix M|o> = w**phase[o] |perm[o]>, acting on the
    first (row) index of T.
    """
    counts = tensor.counts
    modulus = tensor.modulus
    rows = counts.shape[0]
    k = np.arange(modulus)
    gather = (k[None, :] - np.asarray(phase)[:, None]) % modulus
    rolled = np.take_along_axis(
        counts.reshape(rows, -1, modulus),
        gather[:, None, :].repeat(counts.reshape(rows, -1, modulus).shape[1], axis=1),
        axis=2,
    ).reshape(counts.shape)
    out = np.empty_like(rolled)
    out[np.asarray(perm)] = rolled
    return PhaseTensor(out, tensor.scale)


def mono_mul_right(tensor: PhaseTensor, perm: np.ndarray, phase: np.ndarray) -> PhaseTensor:
    """Exact product T . M on the second (column) index of T."""
    counts = tensor.counts
    modulus = tensor.modulus
    perm = np.asarray(perm)
    phase = np.asarray(phase)
    # (T.M)[o, i] = w**phase[i] T[o, perm[i]]
    picked = counts[:, perm, :]
    k = np.arange(modulus)
    gather = (k[None, :] - phase[:, None]) % modulus
    out = np.take_along_axis(picked, gather[None, :, :].repeat(counts.shape[0], axis=0), axis=2)
    return PhaseTensor(out, tensor.scale)
