"""Unit-modulus signature groups: the cyclic roots of unity and the full circle."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


class GroupMismatchError(ValueError):
    """Raised when combining elements of incompatible signature groups."""


@dataclass(frozen=True)
class CyclicElement:
    """Element xi^exponent of the order-k cyclic group on the unit circle.

    Exponents are kept as exact integers mod ``order`` so products and
    inverses never accumulate rounding error.
    """

    order: int
    exponent: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"cyclic group order must be >= 1, got {self.order}")
        object.__setattr__(self, "exponent", self.exponent % self.order)

    @property
    def value(self) -> complex:
        return cmath.exp(2j * math.pi * self.exponent / self.order)

    def inverse(self) -> "CyclicElement":
        return CyclicElement(self.order, -self.exponent)

    def negated(self) -> "CyclicElement":
        # -xi^j = xi^(j + k/2); only a group element when k is even
        if self.order % 2 != 0:
            raise GroupMismatchError(
                f"negation stays in the cyclic group only for even order, got {self.order}"
            )
        return CyclicElement(self.order, self.exponent + self.order // 2)

    def __mul__(self, other: "CyclicElement") -> "CyclicElement":
        if not isinstance(other, CyclicElement) or other.order != self.order:
            raise GroupMismatchError(f"cannot multiply {self} by {other}")
        return CyclicElement(self.order, self.exponent + other.exponent)

    @property
    def is_identity(self) -> bool:
        return self.exponent == 0


@dataclass(frozen=True)
class CircleElement:
    """Element e^{i*angle} of U(1), angle stored in radians reduced to [0, 2pi)."""

    angle: float

    def __post_init__(self):
        a = math.fmod(self.angle, TWO_PI)
        if a < 0.0:
            a += TWO_PI
        if a >= TWO_PI:  # fmod can land exactly on 2pi after the correction
            a -= TWO_PI
        object.__setattr__(self, "angle", a)

    @property
    def value(self) -> complex:
        return cmath.exp(1j * self.angle)

    def inverse(self) -> "CircleElement":
        return CircleElement(-self.angle)

    def negated(self) -> "CircleElement":
        return CircleElement(self.angle + math.pi)

    def __mul__(self, other: "CircleElement") -> "CircleElement":
        if not isinstance(other, CircleElement):
            raise GroupMismatchError(f"cannot multiply {self} by {other}")
        return CircleElement(self.angle + other.angle)

    @property
    def is_identity(self) -> bool:
        return self.angle == 0.0


GroupElement = CyclicElement | CircleElement


def same_group(a: GroupElement, b: GroupElement) -> bool:
    if isinstance(a, CyclicElement) and isinstance(b, CyclicElement):
        return a.order == b.order
    return isinstance(a, CircleElement) and isinstance(b, CircleElement)


def identity_like(g: GroupElement) -> GroupElement:
    if isinstance(g, CyclicElement):
        return CyclicElement(g.order, 0)
    return CircleElement(0.0)


def chord_lengths(k: int):
    """|1 - xi^l| for l = 0..k-1, the per-exponent mismatch penalties."""
    return [2.0 * math.sin(math.pi * l / k) for l in range(k)]
