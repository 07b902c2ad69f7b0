"""Dense probability tables and exact information measures.

All logarithms are base 2, so entropies and rates are in bits, and the
0*log(0) = 0 convention applies everywhere. Alphabets in this package are
tiny (a handful of symbols per axis), so joint distributions are stored as
dense numpy arrays and every measure is computed exactly from the table.

Sign conventions: information quantities are mathematically nonnegative;
float cancellation can produce values like -3e-16, which are clamped to 0.
Anything below -1e-10 indicates a real bug and raises IntegrityError.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .errors import (
    DomainError,
    IntegrityError,
    InvalidDistributionError,
    UsageError,
)

__all__ = [
    "DiscreteDistribution",
    "JointTable",
    "ConditionalKernel",
    "entropy",
    "conditional_entropy",
    "mutual_information",
    "conditional_mutual_information",
    "binary_entropy",
    "binary_entropy_derivative",
    "MASS_TOL",
    "NEG_CLAMP",
]

_LN2 = float(np.log(2.0))

# Total probability mass may deviate from 1 by at most this much.
MASS_TOL = 1e-12
# Information values in (-NEG_CLAMP, 0) are treated as float noise.
NEG_CLAMP = 1e-10


def _as_readonly(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


def _check_mass(arr: np.ndarray, what: str) -> None:
    if np.any(arr < 0.0):
        worst = float(arr.min())
        raise InvalidDistributionError(f"{what} has a negative entry ({worst:g})")
    total = float(arr.sum())
    if abs(total - 1.0) > MASS_TOL:
        raise InvalidDistributionError(
            f"{what} mass sums to {total:.17g}, off from 1 by more than {MASS_TOL:g}"
        )


def entropy_bits(mass: np.ndarray) -> float:
    """Shannon entropy in bits of an unnormalized-safe nonnegative array."""
    return float(-xlogy(mass, mass).sum() / _LN2)


@dataclass(frozen=True)
class DiscreteDistribution:
    """A probability mass function on {0, ..., n-1}."""

    mass: np.ndarray

    def __post_init__(self):
        arr = _as_readonly(self.mass)
        if arr.ndim != 1 or arr.size == 0:
            raise UsageError("DiscreteDistribution needs a nonempty 1-D array")
        _check_mass(arr, "distribution")
        object.__setattr__(self, "mass", arr)

    @property
    def support_size(self) -> int:
        return int(self.mass.size)


@dataclass(frozen=True)
class JointTable:
    """A joint pmf over named finite axes, stored densely.

    ``axis_names`` is optional; assemblers set it so downstream code can
    locate axes like "y" or "u" without positional guesswork.
    """

    mass: np.ndarray
    axis_names: tuple[str, ...] | None = None

    def __post_init__(self):
        arr = _as_readonly(self.mass)
        if arr.ndim == 0:
            raise UsageError("JointTable needs at least one axis")
        _check_mass(arr, "joint table")
        if self.axis_names is not None:
            names = tuple(self.axis_names)
            if len(names) != arr.ndim:
                raise UsageError(
                    f"{len(names)} axis names for a {arr.ndim}-axis table"
                )
            object.__setattr__(self, "axis_names", names)
        object.__setattr__(self, "mass", arr)

    @property
    def axis_sizes(self) -> tuple[int, ...]:
        return tuple(self.mass.shape)

    def axis(self, name: str) -> int:
        """Index of a named axis; UsageError if unnamed or absent."""
        if self.axis_names is None:
            raise UsageError("this JointTable has no axis names")
        try:
            return self.axis_names.index(name)
        except ValueError:
            raise UsageError(
                f"axis {name!r} not present (have {self.axis_names})"
            ) from None

    def marginal(self, keep_axes: list[int] | tuple[int, ...]) -> np.ndarray:
        """Marginal mass over ``keep_axes``, in the listed order."""
        keep = _validated_axes(self, keep_axes, "keep_axes")
        if not keep:
            raise UsageError("keep_axes must be nonempty")
        drop = tuple(i for i in range(self.mass.ndim) if i not in keep)
        summed = self.mass.sum(axis=drop) if drop else self.mass
        # sum() keeps surviving axes in ascending order; permute to the request.
        kept_sorted = sorted(keep)
        perm = [kept_sorted.index(k) for k in keep]
        return np.transpose(summed, perm) if perm != list(range(len(keep))) else summed


@dataclass(frozen=True)
class ConditionalKernel:
    """A stochastic map: rows[input indices] is a pmf over the output axis."""

    rows: np.ndarray

    def __post_init__(self):
        arr = _as_readonly(self.rows)
        if arr.ndim < 2:
            raise UsageError("ConditionalKernel needs >= 1 input axis plus the output axis")
        if np.any(arr < 0.0):
            raise InvalidDistributionError("kernel has a negative entry")
        sums = arr.sum(axis=-1)
        bad = np.abs(sums - 1.0) > MASS_TOL
        if np.any(bad):
            idx = tuple(int(i) for i in np.argwhere(bad)[0])
            raise InvalidDistributionError(
                f"kernel row {idx} sums to {float(sums[bad][0]):.17g}"
            )
        object.__setattr__(self, "rows", arr)

    @property
    def input_sizes(self) -> tuple[int, ...]:
        return tuple(self.rows.shape[:-1])

    @property
    def output_size(self) -> int:
        return int(self.rows.shape[-1])


def _validated_axes(j: JointTable, axes, what: str) -> tuple[int, ...]:
    try:
        out = tuple(int(a) for a in axes)
    except TypeError:
        raise UsageError(f"{what} must be a sequence of axis indices") from None
    for a in out:
        if not 0 <= a < j.mass.ndim:
            raise UsageError(f"{what} index {a} out of range for {j.mass.ndim} axes")
    if len(set(out)) != len(out):
        raise UsageError(f"{what} repeats an axis: {out}")
    return out


def entropy(d: DiscreteDistribution) -> float:
    """H(X) in bits."""
    return entropy_bits(d.mass)


def _joint_entropy(j: JointTable, axes: tuple[int, ...]) -> float:
    if not axes:
        return 0.0
    return entropy_bits(j.marginal(list(axes)))


def conditional_entropy(j: JointTable, target_axes, given_axes=()) -> float:
    """H(targets | given) = H(targets, given) - H(given), in bits."""
    tgt = _validated_axes(j, target_axes, "target_axes")
    giv = _validated_axes(j, given_axes, "given_axes")
    if not tgt:
        raise UsageError("target_axes must be nonempty")
    if set(tgt) & set(giv):
        raise UsageError(f"target and given axes overlap: {tgt} vs {giv}")
    value = _joint_entropy(j, tgt + giv) - _joint_entropy(j, giv)
    return _clamp_information(value, "conditional entropy")


def mutual_information(j: JointTable, axes_a, axes_b) -> float:
    """I(A; B) in bits."""
    return conditional_mutual_information(j, axes_a, axes_b, ())


def conditional_mutual_information(j: JointTable, axes_a, axes_b, given_axes=()) -> float:
    """I(A; B | C) = H(A|C) - H(A|B,C), in bits.

    Tiny negatives from cancellation are clamped to 0; a value below
    -NEG_CLAMP raises IntegrityError since it cannot be float noise.
    """
    a = _validated_axes(j, axes_a, "axes_a")
    b = _validated_axes(j, axes_b, "axes_b")
    c = _validated_axes(j, given_axes, "given_axes")
    if not a or not b:
        raise UsageError("axes_a and axes_b must be nonempty")
    groups = (set(a), set(b), set(c))
    if (groups[0] & groups[1]) or (groups[0] & groups[2]) or (groups[1] & groups[2]):
        raise UsageError(f"axis groups overlap: {a}, {b}, {c}")
    value = (
        _joint_entropy(j, a + c)
        + _joint_entropy(j, b + c)
        - _joint_entropy(j, a + b + c)
        - _joint_entropy(j, c)
    )
    return _clamp_information(value, "conditional mutual information")


def _clamp_information(value: float, what: str) -> float:
    if value < 0.0:
        if value < -NEG_CLAMP:
            raise IntegrityError(f"{what} = {value:.3e} is negative beyond tolerance")
        return 0.0
    return value


def binary_entropy(x: float) -> float:
    """H2(x) in bits, defined on [0, 1] with H2(0) = H2(1) = 0."""
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"binary_entropy needs x in [0, 1], got {x!r}")
    return float(-(xlogy(x, x) + xlogy(1.0 - x, 1.0 - x)) / _LN2)


def binary_entropy_derivative(x: float) -> float:
    """d H2 / dx = log2((1-x)/x), defined on the open interval (0, 1)."""
    x = float(x)
    if not 0.0 < x < 1.0:
        raise DomainError(f"binary_entropy_derivative needs x in (0, 1), got {x!r}")
    return float(np.log2((1.0 - x) / x))
