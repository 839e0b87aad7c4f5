"""Radially symmetric discretization of R^N.

A function u(|x|) on R^N is stored by its samples on a radial mesh
0 = r_0 < r_1 < ... < r_K = r_max together with quadrature weights that
absorb the surface measure of the unit (N-1)-sphere, so that

    integral_{R^N} phi(|x|) dx  ~=  sum_j  w_j phi(r_j).

The weights are moment-fitted per cell: on [r_i, r_{i+1}] the rule
integrates p(r) r^{N-1} exactly for every linear p, using closed-form
moments of r^{N-1}.  Constants are therefore integrated exactly (the
ball volume comes out to machine precision), every weight is strictly
positive, and the coordinate origin needs no special treatment.

Dirichlet energies use the compact two-point stencil on each cell
(midpoint-centered difference quotients).  Kinks that sit exactly on a
node, such as a Moser plateau edge or a spliced nonlinearity, then
never straddle a stencil, which keeps the energy second-order accurate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

SCHEMES = ("uniform", "graded", "custom")

MIN_CELLS = 16
MAX_DIMENSION = 10


class TruncationLossError(RuntimeError):
    """Raised when a rescaling would push non-negligible mass off the grid."""


def sphere_area(dimension: int) -> float:
    """Surface area of the unit (N-1)-sphere in R^N."""
    return 2.0 * math.pi ** (dimension / 2.0) / math.gamma(dimension / 2.0)


def ball_volume(dimension: int, radius: float) -> float:
    """Volume of the ball of given radius in R^N."""
    return math.pi ** (dimension / 2.0) * radius**dimension / math.gamma(dimension / 2.0 + 1.0)


@dataclass
class RadialGrid:
    """Radial mesh with quadrature weights for integrals over R^N.

    Attributes
    ----------
    dimension : spatial dimension N of the ambient space.
    nodes : array of K+1 radii, strictly increasing from 0 to r_max.
    weights : node quadrature weights, angular measure included.
    cell_volumes : per-cell integrals of the measure, omega_{N-1} * int r^{N-1} dr.
    scheme : the node-placement rule used to build the grid.
    """

    dimension: int
    nodes: np.ndarray
    weights: np.ndarray = field(repr=False)
    cell_volumes: np.ndarray = field(repr=False)
    scheme: str = "custom"

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])

    @property
    def n_cells(self) -> int:
        return len(self.nodes) - 1

    @property
    def cell_widths(self) -> np.ndarray:
        return np.diff(self.nodes)

    def integrate(self, values: np.ndarray) -> float:
        """Quadrature of a node-sampled radial integrand over R^N."""
        return float(self.weights @ np.asarray(values))

    def ball_volume(self) -> float:
        return ball_volume(self.dimension, self.r_max)

    def derivative(self, values: np.ndarray) -> np.ndarray:
        """Node-centered first derivative, second order on non-uniform meshes.

        One-sided three-point stencils are used at both endpoints.
        """
        u = np.asarray(values, dtype=float)
        r = self.nodes
        h = np.diff(r)
        out = np.empty_like(u)
        hl, hr = h[:-1], h[1:]
        out[1:-1] = (
            -hr / (hl * (hl + hr)) * u[:-2]
            + (hr - hl) / (hl * hr) * u[1:-1]
            + hl / (hr * (hl + hr)) * u[2:]
        )
        h0, h1 = h[0], h[1]
        out[0] = (
            -(2 * h0 + h1) / (h0 * (h0 + h1)) * u[0]
            + (h0 + h1) / (h0 * h1) * u[1]
            - h0 / (h1 * (h0 + h1)) * u[2]
        )
        hm, hn = h[-2], h[-1]
        out[-1] = (
            (2 * hn + hm) / (hn * (hn + hm)) * u[-1]
            - (hn + hm) / (hn * hm) * u[-2]
            + hn / (hm * (hn + hm)) * u[-3]
        )
        return out

    def stiffness_apply(self, values: np.ndarray) -> np.ndarray:
        """Apply the Dirichlet stiffness operator A with a(u,v) = v.A u.

        a(u, v) = sum_i cell_volumes_i * D_i(u) * D_i(v) where D_i is the
        difference quotient on cell i, so a(u, u) equals grad_norm_sq.
        """
        u = np.asarray(values, dtype=float)
        flux = self.cell_volumes * np.diff(u) / self.cell_widths**2
        out = np.zeros_like(u)
        out[:-1] -= flux
        out[1:] += flux
        return out

    def stiffness_banded(self) -> np.ndarray:
        """Upper-form banded representation of A for scipy.linalg.solveh_banded."""
        k = self.cell_volumes / self.cell_widths**2
        n = len(self.nodes)
        ab = np.zeros((2, n))
        ab[1, :-1] += k
        ab[1, 1:] += k
        ab[0, 1:] = -k
        return ab

    def __post_init__(self) -> None:
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        self.cell_volumes = np.asarray(self.cell_volumes, dtype=float)
        if self.nodes[0] != 0.0:
            raise ValueError("radial grid must start at r = 0")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("radial nodes must be strictly increasing")
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be strictly positive")


def _weights_from_nodes(dimension: int, nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Moment-fitted per-cell weights, exact for piecewise-linear integrands."""
    area = sphere_area(dimension)
    rl, rr = nodes[:-1], nodes[1:]
    h = rr - rl
    n = dimension
    m0 = area * (rr**n - rl**n) / n
    m1 = area * (rr ** (n + 1) - rl ** (n + 1)) / (n + 1)
    w_left = (rr * m0 - m1) / h
    w_right = (m1 - rl * m0) / h
    weights = np.zeros(len(nodes))
    weights[:-1] += w_left
    weights[1:] += w_right
    return weights, m0


def from_nodes(dimension: int, nodes: np.ndarray, scheme: str = "custom") -> RadialGrid:
    """Build a grid from an explicit node array (must start at 0)."""
    nodes = np.asarray(nodes, dtype=float)
    _validate_dimension(dimension)
    weights, cell_volumes = _weights_from_nodes(dimension, nodes)
    return RadialGrid(dimension, nodes, weights, cell_volumes, scheme)


def make_grid(dimension: int, r_max: float, n_cells: int, scheme: str = "uniform") -> RadialGrid:
    """Build a radial grid on [0, r_max] with n_cells cells.

    scheme 'uniform' spaces nodes evenly; 'graded' uses the quadratic
    grading r_i = r_max (i/K)^2, clustering resolution near the origin.
    """
    _validate_dimension(dimension)
    if not r_max > 0:
        raise ValueError(f"r_max must be positive, got {r_max}")
    if n_cells < MIN_CELLS:
        raise ValueError(f"n_cells must be at least {MIN_CELLS}, got {n_cells}")
    if scheme == "uniform":
        nodes = np.linspace(0.0, r_max, n_cells + 1)
    elif scheme == "graded":
        frac = np.arange(n_cells + 1) / n_cells
        nodes = r_max * frac**2
    else:
        raise ValueError(f"unknown scheme {scheme!r}, expected one of {SCHEMES[:2]}")
    return from_nodes(dimension, nodes, scheme)


def _validate_dimension(dimension: int) -> None:
    if not isinstance(dimension, (int, np.integer)) or not 1 <= dimension <= MAX_DIMENSION:
        raise ValueError(f"dimension must be an integer in [1, {MAX_DIMENSION}], got {dimension}")


@dataclass
class RadialFunction:
    """Samples of a radial function on a RadialGrid."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.nodes.shape:
            raise ValueError("values must match the grid node count")

    def with_values(self, values: np.ndarray) -> "RadialFunction":
        return RadialFunction(self.grid, values)

    def mass(self) -> float:
        """Squared L2 norm over R^N."""
        return self.grid.integrate(self.values**2)

    def grad_norm_sq(self) -> float:
        """Squared L2 norm of the gradient, by cell-midpoint difference quotients."""
        d = np.diff(self.values) / self.grid.cell_widths
        return float(self.grid.cell_volumes @ d**2)

    def lp_norm(self, p: float) -> float:
        if p < 1:
            raise ValueError(f"lp_norm requires p >= 1, got {p}")
        return self.grid.integrate(np.abs(self.values) ** p) ** (1.0 / p)

    def h1_norm(self) -> float:
        return math.sqrt(self.grad_norm_sq() + self.mass())


def normalize_mass(u: RadialFunction, c: float) -> RadialFunction:
    """Rescale u so that its L2 norm equals c."""
    m = u.mass()
    if m <= 0 or not np.isfinite(m):
        raise ValueError("cannot normalize a function with vanishing or invalid mass")
    return u.with_values(u.values * (c / math.sqrt(m)))


def fiber_scale(u: RadialFunction, s: float, mass_loss_tol: float = 1e-6) -> RadialFunction:
    """Mass-preserving dilation T(u, s)(r) = e^{Ns/2} u(e^s r), resampled.

    The profile is resampled on the original grid through a monotone
    cubic interpolant and extended by zero beyond r_max.  For s < 0 the
    visible window shrinks to [0, e^s r_max]; if more than mass_loss_tol
    of the relative mass lives outside that window the truncation is
    refused rather than silently clipped.
    """
    n = u.grid.dimension
    r = u.grid.nodes
    if s < 0:
        cutoff = math.exp(s) * u.grid.r_max
        outside = r >= cutoff
        lost = float(u.grid.weights[outside] @ u.values[outside] ** 2)
        total = u.mass()
        if total > 0 and lost > mass_loss_tol * total:
            raise TruncationLossError(
                f"rescaling by s={s:g} would drop {lost / total:.3e} of the mass "
                f"(tolerance {mass_loss_tol:g})"
            )
    # flat zero tails give zero slopes; pchip's weighted-harmonic-mean
    # formula divides by them and recovers, so hide the spurious warning
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        interp = PchipInterpolator(r, u.values, extrapolate=False)
    sampled = interp(np.exp(s) * r)
    sampled = np.where(np.isnan(sampled), 0.0, sampled)
    return u.with_values(math.exp(n * s / 2.0) * sampled)


def write_profile_csv(u: RadialFunction, path: str) -> None:
    """Serialize a radial profile: JSON grid header then (r, value) rows."""
    meta = {
        "dimension": int(u.grid.dimension),
        "scheme": u.grid.scheme,
        "n_cells": int(u.grid.n_cells),
        "r_max": u.grid.r_max,
    }
    with open(path, "w") as fh:
        fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        fh.write("r,value\n")
        for r, v in zip(u.grid.nodes, u.values):
            fh.write(f"{r:.17g},{v:.17g}\n")


def read_profile_csv(path: str) -> RadialFunction:
    """Load a profile written by write_profile_csv."""
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise ValueError(f"{path}: missing grid metadata header")
        meta = json.loads(header[1:].strip())
        column_line = fh.readline().strip()
        if column_line != "r,value":
            raise ValueError(f"{path}: unexpected column header {column_line!r}")
        data = np.loadtxt(fh, delimiter=",")
    grid = from_nodes(int(meta["dimension"]), data[:, 0], meta.get("scheme", "custom"))
    return RadialFunction(grid, data[:, 1])
