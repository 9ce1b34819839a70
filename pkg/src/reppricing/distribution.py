"""Mixed-strategy price laws: an absolutely continuous part plus point masses."""

from __future__ import annotations

from typing import Iterable

import numpy as np
from scipy import integrate


class PriceDistribution:
    """Price law on ``[lower, upper]``.

    Subclasses supply the continuous part through ``_cont_cdf`` (mass at or
    below ``x``), ``_cont_pdf`` and ``_cont_ppf`` (inverse of ``_cont_cdf`` on
    ``[0, continuous_mass]``). Point masses are ``(price, probability)`` pairs.
    """

    def __init__(self, lower: float, upper: float, point_masses: Iterable = ()):
        if not upper >= lower:
            raise ValueError(f"upper ({upper}) < lower ({lower})")
        self.lower = float(lower)
        self.upper = float(upper)
        atoms = sorted((float(x), float(m)) for x, m in point_masses if m != 0)
        self.point_masses = tuple(atoms)
        self._atom_x = np.array([x for x, _ in atoms])
        self._atom_m = np.array([m for _, m in atoms])

    # continuous part; overridden
    def _cont_cdf(self, x):
        return np.zeros_like(x)

    def _cont_pdf(self, x):
        return np.zeros_like(x)

    def _cont_ppf(self, q):
        return np.full_like(q, self.lower)

    @property
    def atom_mass(self) -> float:
        return float(self._atom_m.sum())

    @property
    def continuous_mass(self) -> float:
        return float(self._cont_cdf(np.array(self.upper)))

    def _atoms_upto(self, x, inclusive: bool):
        if not len(self._atom_x):
            return np.zeros_like(x)
        side = "right" if inclusive else "left"
        idx = np.searchsorted(self._atom_x, x, side=side)
        cum = np.concatenate(([0.0], np.cumsum(self._atom_m)))
        return cum[idx]

    def cdf(self, x):
        """P(price <= x)."""
        x = np.asarray(x, dtype=float)
        return np.clip(self._cont_cdf(x) + self._atoms_upto(x, inclusive=True), 0.0, 1.0)

    def cdf_left(self, x):
        """P(price < x)."""
        x = np.asarray(x, dtype=float)
        return np.clip(self._cont_cdf(x) + self._atoms_upto(x, inclusive=False), 0.0, 1.0)

    def pdf(self, x):
        """Density of the continuous part (zero off the support)."""
        return self._cont_pdf(np.asarray(x, dtype=float))

    def ppf(self, q):
        """Generalised inverse ``inf{x : cdf(x) >= q}``."""
        q = np.asarray(q, dtype=float)
        out = np.empty(q.shape)
        done = np.zeros(q.shape, dtype=bool)
        consumed = 0.0
        for x_atom, m_atom in self.point_masses:
            before = consumed + float(self._cont_cdf(np.array(x_atom)))
            seg = ~done & (q <= before)
            out[seg] = self._cont_ppf(np.clip(q[seg] - consumed, 0.0, None))
            done |= seg
            hit = ~done & (q <= before + m_atom)
            out[hit] = x_atom
            done |= hit
            consumed += m_atom
        rest = ~done
        out[rest] = self._cont_ppf(np.clip(q[rest] - consumed, 0.0, self.continuous_mass))
        return np.clip(out, self.lower, self.upper)

    def mean(self) -> float:
        """Expected price by numerical integration of the continuous part."""
        cont = 0.0
        if self.upper > self.lower and self.continuous_mass > 0:
            cont = _quad(lambda x: x * float(self._cont_pdf(np.array(x))), self.lower, self.upper)
        return cont + float(np.dot(self._atom_x, self._atom_m))

    def total_mass(self) -> float:
        """Integral of the density plus point masses (should be 1)."""
        cont = 0.0
        if self.upper > self.lower:
            cont = _quad(lambda x: float(self._cont_pdf(np.array(x))), self.lower, self.upper)
        return cont + self.atom_mass

    def invariant_violations(self, tol: float = 1e-9, grid: int = 2001) -> list[str]:
        """List the distribution invariants that fail at tolerance ``tol``."""
        problems = []
        below = float(self.cdf_left(np.array(self.lower)))
        if abs(below) > tol:
            problems.append(f"cdf(lower-) = {below}")
        top = float(self.cdf(np.array(self.upper)))
        if abs(top - 1.0) > tol:
            problems.append(f"cdf(upper) = {top}")
        xs = np.linspace(self.lower, self.upper, grid)
        steps = np.diff(self.cdf(xs))
        if steps.size and steps.min() < -tol:
            problems.append(f"cdf decreases by {-steps.min()}")
        dens = self.pdf(xs[:-1] if self.continuous_mass > 0 else xs)
        if dens.size and dens.min() < -tol:
            problems.append(f"negative density {dens.min()}")
        total = self.total_mass()
        if abs(total - 1.0) > tol:
            problems.append(f"total mass = {total}")
        if any(m < 0 for _, m in self.point_masses):
            problems.append("negative point mass")
        return problems

    def describe(self) -> dict:
        return {
            "kind": type(self).__name__,
            "lower": self.lower,
            "upper": self.upper,
            "point_masses": [[x, m] for x, m in self.point_masses],
        }


def _quad(f, a, b):
    value, _ = integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-13, limit=200)
    return value


class InverseSquareLaw(PriceDistribution):
    """Density ``scale / (x - shift)**2`` on ``[lower, upper]`` plus point masses.

    Every equilibrium density of the game has this shape; the CDF is the
    exact antiderivative ``scale * (1/(lower-shift) - 1/(x-shift))``.
    """

    def __init__(self, lower, upper, scale, shift, point_masses=()):
        if not shift < lower:
            raise ValueError(f"shift ({shift}) must lie below the support ({lower})")
        super().__init__(lower, upper, point_masses)
        self.scale = float(scale)
        self.shift = float(shift)
        self._inv_lower = 1.0 / (self.lower - self.shift)

    def _cont_cdf(self, x):
        z = np.clip(x, self.lower, self.upper) - self.shift
        return self.scale * (self._inv_lower - 1.0 / z)

    def _cont_pdf(self, x):
        inside = (x >= self.lower) & (x <= self.upper)
        z = np.where(inside, x - self.shift, 1.0)
        return np.where(inside, self.scale / z**2, 0.0)

    def _cont_ppf(self, q):
        return self.shift + 1.0 / (self._inv_lower - q / self.scale)

    def describe(self) -> dict:
        out = super().describe()
        out.update(scale=self.scale, shift=self.shift)
        return out


class TabulatedLaw(PriceDistribution):
    """Continuous part given by CDF values on a grid, linearly interpolated."""

    def __init__(self, grid, cdf_values, point_masses=()):
        grid = np.asarray(grid, dtype=float)
        values = np.maximum.accumulate(np.asarray(cdf_values, dtype=float))
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
            raise ValueError("grid and cdf_values must be 1-d arrays of equal length >= 2")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        super().__init__(grid[0], grid[-1], point_masses)
        self.grid = grid
        self.values = values - values[0]

    def _cont_cdf(self, x):
        return np.interp(x, self.grid, self.values)

    def _cont_pdf(self, x):
        slopes = np.diff(self.values) / np.diff(self.grid)
        idx = np.clip(np.searchsorted(self.grid, x, side="right") - 1, 0, slopes.size - 1)
        inside = (x >= self.lower) & (x <= self.upper)
        return np.where(inside, slopes[idx], 0.0)

    def _cont_ppf(self, q):
        # interp needs strictly increasing abscissae; flat cells are skipped
        keep = np.concatenate(([True], np.diff(self.values) > 0))
        return np.interp(q, self.values[keep], self.grid[keep])

    def mean(self) -> float:
        dv = np.diff(self.values)
        mid = 0.5 * (self.grid[1:] + self.grid[:-1])
        return float(np.dot(dv, mid) + np.dot(self._atom_x, self._atom_m))

    def total_mass(self) -> float:
        return float(self.values[-1]) + self.atom_mass


class DiscreteLaw(PriceDistribution):
    """Finitely many prices; a single atom of mass 1 is a pure strategy."""

    def __init__(self, point_masses):
        atoms = [(float(x), float(m)) for x, m in point_masses if m > 0]
        if not atoms:
            raise ValueError("a discrete law needs at least one positive mass")
        xs = [x for x, _ in atoms]
        super().__init__(min(xs), max(xs), atoms)

    @classmethod
    def pure(cls, price: float) -> "DiscreteLaw":
        return cls([(price, 1.0)])

    def mean(self) -> float:
        return float(np.dot(self._atom_x, self._atom_m))

    def total_mass(self) -> float:
        return self.atom_mass


def sample_prices(dist: PriceDistribution, seed: int, count: int) -> np.ndarray:
    """Draw ``count`` prices by inverse-transform sampling; deterministic in ``seed``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    return dist.ppf(rng.random(count))


def sup_distance(a: PriceDistribution, b: PriceDistribution, points: int = 99991) -> float:
    """Sup-norm distance between two CDFs on a grid spanning both supports."""
    lo = min(a.lower, b.lower)
    hi = max(a.upper, b.upper)
    xs = np.unique(np.concatenate((np.linspace(lo, hi, points), [a.lower, a.upper, b.lower, b.upper])))
    right = np.max(np.abs(a.cdf(xs) - b.cdf(xs)))
    left = np.max(np.abs(a.cdf_left(xs) - b.cdf_left(xs)))
    return float(max(right, left))
