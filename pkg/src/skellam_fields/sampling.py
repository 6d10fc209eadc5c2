"""Random-variate generation: Poisson counts, box point scatters, one-sided
stable variates, and single-point / path samples of the inverse stable
subordinator.

Single-point inverse-subordinator draws use the self-similarity identity
E(t) =_d (t / H(1))^alpha, which is exact; joint draws at several times fall
back to first-passage inversion of a step-discretized subordinator path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .rng import RngStream

__all__ = [
    "BoxRegion",
    "PointProcessSample",
    "SubordinatorPath",
    "sample_poisson",
    "sample_point_field",
    "count_at",
    "sample_stable_unit",
    "sample_inverse_subordinator",
    "sample_inverse_subordinator_path",
    "DEFAULT_PATH_STEP",
]

# Keeps the first-passage discretization bias of the path sampler below 1%
# of the marginal mean at desk-scale times (validated against the exact
# single-point sampler in the test suite).
DEFAULT_PATH_STEP = 1e-3


@dataclass(frozen=True)
class BoxRegion:
    """Axis-aligned box in R^M with finite Lebesgue measure."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        if len(self.lower) != len(self.upper) or not self.lower:
            raise ValidationError("lower/upper: must be nonempty and of equal length")
        for lo, hi in zip(self.lower, self.upper):
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValidationError("lower/upper: coordinates must be finite")
            if lo > hi:
                raise ValidationError("lower/upper: lower[i] must be <= upper[i]")

    @property
    def dims(self) -> int:
        return len(self.lower)

    @property
    def measure(self) -> float:
        out = 1.0
        for lo, hi in zip(self.lower, self.upper):
            out *= hi - lo
        return out

    def intersection_measure(self, other: "BoxRegion") -> float:
        if other.dims != self.dims:
            raise ValidationError("regions: dimension mismatch")
        out = 1.0
        for lo1, hi1, lo2, hi2 in zip(self.lower, self.upper, other.lower, other.upper):
            out *= max(0.0, min(hi1, hi2) - max(lo1, lo2))
        return out


def unit_square() -> BoxRegion:
    return BoxRegion((0.0, 0.0), (1.0, 1.0))


@dataclass(frozen=True)
class PointProcessSample:
    """A realized Poisson scatter inside a box region."""

    region: BoxRegion
    points: np.ndarray  # shape (count, dims)
    rate: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, self.region.dims)
        object.__setattr__(self, "points", pts)
        if not self.rate > 0.0:
            raise ValidationError("rate: must be > 0")
        lo = np.asarray(self.region.lower)
        hi = np.asarray(self.region.upper)
        if pts.size and (np.any(pts < lo) or np.any(pts > hi)):
            raise ValidationError("points: every point must lie inside region")

    @property
    def count(self) -> int:
        return self.points.shape[0]


def sample_poisson(mean: float, rng: RngStream, size: int | None = None):
    """Poisson(mean) draw; with ``size`` an array of iid draws."""
    if mean < 0.0:
        raise ValidationError("mean: must be >= 0")
    out = rng.generator.poisson(mean, size=size)
    return int(out) if size is None else out


def sample_point_field(rate: float, region: BoxRegion, rng: RngStream) -> PointProcessSample:
    """Scatter a homogeneous Poisson point field over ``region``.

    The count is Poisson(rate * |region|) and locations are iid uniform, so
    counts over disjoint sub-boxes of one sample are independent Poisson with
    the right means.
    """
    if not rate > 0.0:
        raise ValidationError("rate: must be > 0")
    gen = rng.generator
    n = int(gen.poisson(rate * region.measure))
    lo = np.asarray(region.lower)
    hi = np.asarray(region.upper)
    pts = lo + (hi - lo) * gen.random((n, region.dims))
    return PointProcessSample(region, pts, rate)


def count_at(sample: PointProcessSample, corner: Sequence[float]) -> int:
    """Number of sample points dominated coordinatewise by ``corner``."""
    c = np.asarray([float(v) for v in corner])
    if c.shape != (sample.region.dims,):
        raise ValidationError("corner: must have one coordinate per region dimension")
    lo = np.asarray(sample.region.lower)
    hi = np.asarray(sample.region.upper)
    if np.any(c < lo) or np.any(c > hi):
        raise ValidationError("corner: must lie inside the region's bounding box")
    if sample.count == 0:
        return 0
    return int(np.all(sample.points <= c, axis=1).sum())


def _stable_std(alpha: float, gen: np.random.Generator, size):
    """Kanter draw of the one-sided stable law with Laplace transform e^{-u^alpha}."""
    theta = np.pi * gen.random(size)
    theta = np.maximum(theta, 1e-300)  # avoid 0/0 at the left endpoint
    w = np.maximum(gen.standard_exponential(size), 1e-300)
    ratio = alpha / (1.0 - alpha)
    a = (np.sin(alpha * theta) / np.sin(theta)) ** ratio \
        * (np.sin((1.0 - alpha) * theta) / np.sin(theta))
    return (a / w) ** ((1.0 - alpha) / alpha)


def sample_stable_unit(alpha: float, rng: RngStream, size: int | None = None):
    """One draw (or ``size`` draws) of H(1) with E e^{-u H(1)} = e^{-u^alpha}."""
    if not 0.0 < alpha < 1.0:
        raise ValidationError("alpha: must be in (0, 1)")
    out = _stable_std(alpha, rng.generator, size)
    return float(out) if size is None else out


def sample_inverse_subordinator(alpha: float, t: float, rng: RngStream,
                                size: int | None = None):
    """Draw the inverse stable subordinator E(t); E(t) = t exactly at alpha = 1."""
    if not 0.0 < alpha <= 1.0:
        raise ValidationError("alpha: must be in (0, 1]")
    if t < 0.0:
        raise ValidationError("t: must be >= 0")
    if alpha == 1.0:
        return t if size is None else np.full(size, t)
    if t == 0.0:
        return 0.0 if size is None else np.zeros(size)
    out = (t / _stable_std(alpha, rng.generator, size)) ** alpha
    return float(out) if size is None else out


def _validate_grid(time_grid: Sequence[float]) -> np.ndarray:
    grid = np.asarray([float(v) for v in time_grid])
    if grid.ndim != 1 or grid.size == 0:
        raise ValidationError("time_grid: must be a nonempty 1-d sequence")
    if np.any(grid < 0.0):
        raise ValidationError("time_grid: times must be >= 0")
    if np.any(np.diff(grid) <= 0.0):
        raise ValidationError("time_grid: must be strictly increasing")
    return grid


def _inverse_subordinator_paths(alpha: float, grid: np.ndarray, step: float,
                                gen: np.random.Generator, n: int,
                                block: int = 256, chunk: int = 16384) -> np.ndarray:
    """First-passage inversion of step-discretized subordinator paths.

    Returns an (n, len(grid)) array of E(t_j) draws, nondecreasing along the
    grid axis of every row.  Work proceeds in replicate chunks and step
    blocks so memory stays bounded at large n.
    """
    m = grid.size
    out = np.zeros((n, m))
    scale = step ** (1.0 / alpha)
    positive = np.nonzero(grid > 0.0)[0]
    if positive.size == 0:
        return out
    levels = grid[positive]
    for start in range(0, n, chunk):
        c = min(chunk, n - start)
        cur = np.zeros(c)
        next_level = np.zeros(c, dtype=np.intp)  # index into `levels`
        vals = np.zeros((c, levels.size))
        steps_done = 0
        while np.any(next_level < levels.size):
            h = cur[None, :] + np.cumsum(scale * _stable_std(alpha, gen, (block, c)), axis=0)
            for j in range(levels.size):
                pending = next_level == j
                if not np.any(pending):
                    continue
                crossed = h[:, pending] > levels[j]
                hit = crossed.any(axis=0)
                rows = crossed.argmax(axis=0)
                idx = np.nonzero(pending)[0][hit]
                vals[idx, j] = step * (steps_done + rows[hit] + 1)
                next_level[idx] += 1
            cur = h[-1]
            steps_done += block
        out[start:start + c, positive] = vals
    return out


def sample_inverse_subordinator_path(alpha: float, time_grid: Sequence[float],
                                     step: float = DEFAULT_PATH_STEP,
                                     rng: RngStream | None = None,
                                     size: int | None = None):
    """Joint draw of E(t) over an increasing time grid.

    Marginals converge to the exact single-point law as ``step`` shrinks; at
    alpha = 1 the values equal the grid exactly.  Returns a (len(grid),)
    array, or (size, len(grid)) when ``size`` is given.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValidationError("alpha: must be in (0, 1]")
    if not step > 0.0:
        raise ValidationError("step: must be > 0")
    grid = _validate_grid(time_grid)
    n = 1 if size is None else int(size)
    if alpha == 1.0:
        out = np.broadcast_to(grid, (n, grid.size)).copy()
    else:
        if rng is None:
            raise ValidationError("rng: required for alpha < 1")
        out = _inverse_subordinator_paths(alpha, grid, step, rng.generator, n)
    return out[0] if size is None else out


@dataclass(frozen=True)
class SubordinatorPath:
    """A realized nondecreasing path of E(t) over a grid starting at 0."""

    alpha: float
    time_grid: tuple
    values: tuple

    def __post_init__(self):
        grid = tuple(float(v) for v in self.time_grid)
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "time_grid", grid)
        object.__setattr__(self, "values", vals)
        if not 0.0 < self.alpha <= 1.0:
            raise ValidationError("alpha: must be in (0, 1]")
        if len(grid) != len(vals) or not grid:
            raise ValidationError("values: must match time_grid length")
        if grid[0] != 0.0 or vals[0] != 0.0:
            raise ValidationError("time_grid/values: must start at 0")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValidationError("time_grid: must be strictly increasing")
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise ValidationError("values: must be nondecreasing")
