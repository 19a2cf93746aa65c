"""Closed-form algebra of 2x2 LCT parameter matrices ``[a, b; c, d]``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DeterminantError, InvalidParameterError

DET_TOL = 1e-12


@dataclass(frozen=True)
class LctMatrix:
    """Unit-determinant parameter matrix ``[[a, b], [c, d]]``.

    Serialized as the flat row-major list ``[a, b, c, d]``.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in "abcd":
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidParameterError(f"matrix entry {name} is not finite: {value}")
            object.__setattr__(self, name, value)
        if abs(self.det - 1.0) > DET_TOL:
            raise DeterminantError(
                f"ad - bc = {self.det!r} for [{self.a}, {self.b}; {self.c}, {self.d}]; "
                "LCT matrices need unit determinant"
            )

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def to_list(self) -> list[float]:
        return [self.a, self.b, self.c, self.d]

    @classmethod
    def from_list(cls, values) -> "LctMatrix":
        values = list(values)
        if len(values) != 4:
            raise InvalidParameterError(f"expected [a, b, c, d], got {len(values)} values")
        return cls(*values)

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def __matmul__(self, other: "LctMatrix") -> "LctMatrix":
        return compose(self, other)


def compose(left: LctMatrix, right: LctMatrix) -> LctMatrix:
    """Matrix product ``left @ right`` (apply ``right`` first, then ``left``)."""
    return LctMatrix(
        left.a * right.a + left.b * right.c,
        left.a * right.b + left.b * right.d,
        left.c * right.a + left.d * right.c,
        left.c * right.b + left.d * right.d,
    )


def invert(m: LctMatrix) -> LctMatrix:
    return LctMatrix(m.d, -m.b, -m.c, m.a)


def identity() -> LctMatrix:
    return LctMatrix(1.0, 0.0, 0.0, 1.0)


def cft_matrix() -> LctMatrix:
    """The ordinary (angular-frequency) Fourier transform, ``[0, 1; -1, 0]``."""
    return LctMatrix(0.0, 1.0, -1.0, 0.0)


def frft_matrix(alpha: float) -> LctMatrix:
    """Rotation by ``alpha``; reduces to :func:`cft_matrix` at ``pi/2``."""
    ca, sa = math.cos(alpha), math.sin(alpha)
    # exact zeros keep the B = 0 dispatch and the cft comparison clean
    if abs(ca) < 1e-15:
        ca = 0.0
    if abs(sa) < 1e-15:
        sa = 0.0
    return LctMatrix(ca, sa, -sa, ca)


def theorem1_matrix(b: float, d: float = 0.0) -> LctMatrix:
    """``[1/b, -d; 0, b]``: maps a W-bandlimited signal to conventional bandwidth W*b."""
    if b == 0:
        raise InvalidParameterError("theorem1 matrix needs b != 0")
    return LctMatrix(1.0 / b, 0.0 - d, 0.0, b)  # 0.0 - d avoids a signed zero


def theorem2_matrix(a: float, b: float = 0.0) -> LctMatrix:
    """``[a, b; 0, 1/a]``: maps a W-bandlimited signal to conventional bandwidth W/a."""
    if a == 0:
        raise InvalidParameterError("theorem2 matrix needs a != 0")
    return LctMatrix(a, b, 0.0, 1.0 / a)


def special_matrix(kind: str, **params) -> LctMatrix:
    """Build a named matrix.

    ``kind`` is one of ``identity``, ``cft``, ``frft`` (``alpha``),
    ``theorem1`` (``b``, ``d``), ``theorem2`` (``a``, ``b``) or
    ``general`` (``a``, ``b``, ``c``, ``d``).
    """
    try:
        if kind == "identity":
            return identity()
        if kind == "cft":
            return cft_matrix()
        if kind == "frft":
            return frft_matrix(params["alpha"])
        if kind == "theorem1":
            return theorem1_matrix(params["b"], params.get("d", 0.0))
        if kind == "theorem2":
            return theorem2_matrix(params["a"], params.get("b", 0.0))
        if kind == "general":
            return LctMatrix(params["a"], params["b"], params["c"], params["d"])
    except KeyError as exc:
        raise InvalidParameterError(f"matrix kind {kind!r} is missing parameter {exc.args[0]!r}") from None
    raise InvalidParameterError(f"unknown matrix kind {kind!r}")


def matrix_from_config(spec) -> LctMatrix:
    """Accept either a flat ``[a, b, c, d]`` list or ``{"kind": ..., **params}``."""
    if isinstance(spec, LctMatrix):
        return spec
    if isinstance(spec, dict):
        spec = dict(spec)
        kind = spec.pop("kind", None)
        if kind is None:
            raise InvalidParameterError("matrix object needs a 'kind' field")
        return special_matrix(kind, **spec)
    return LctMatrix.from_list(spec)


def random_matrix(rng: np.random.Generator, scale: float = 1.0) -> LctMatrix:
    """Random valid matrix built from two shears and a scaling.

    Each factor has unit determinant, so no normalization of a
    near-singular draw is ever needed.
    """
    b, c = rng.uniform(-scale, scale, size=2)
    s = math.exp(rng.uniform(-0.7, 0.7))
    shear_b = LctMatrix(1.0, b, 0.0, 1.0)
    shear_c = LctMatrix(1.0, 0.0, c, 1.0)
    return compose(compose(shear_b, shear_c), LctMatrix(s, 0.0, 0.0, 1.0 / s))
