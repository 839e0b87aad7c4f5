"""Coercivity infima and explicit existence / non-existence thresholds.

Everything here reduces to the two-term-over-two-term infimum

    omega = inf_{t>0} (k1 t^q1 + k2 t^q2) / (k3 t^q3 + k4 t^q4),

which is positive and attained whenever the active denominator powers sit
strictly between the numerator powers.  In the quadratic-quartic
configuration (q1, q2) = (2, 4) with a single denominator power q in
(2, 4) the infimum has a closed form; combined with the Sobolev constant
of the critical embedding and the mass of the interpolation extremal it
yields the explicit mass thresholds below which no nontrivial normalized
solution can exist.

The extremal mass ``q_mass`` and the interpolation constant are always
injected by the caller (see gn_ground_state); nothing is hard-coded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from scipy.optimize import brentq

from .models import two_star
from .radial_grid import RadialFunction, RadialGrid, make_grid
from .scalar_opt import log_grid_min

# relative backoff from the admissibility boundary when maximizing the
# margin parameter delta; keeps the reported constant strictly certified
DELTA_BACKOFF = 1e-6


@dataclass(frozen=True)
class OmegaQuery:
    """Coefficients and exponents of the two-over-two infimum.

    k1, k2 > 0 always; k3, k4 >= 0 with at least one positive.  An
    exponent whose coefficient vanishes may be None.  Every active
    denominator exponent must lie strictly inside (q1, q2), otherwise
    the infimum degenerates to zero.
    """

    k1: float
    k2: float
    k3: float
    k4: float
    q1: float = 2.0
    q2: float = 4.0
    q3: float | None = None
    q4: float | None = None

    def __post_init__(self) -> None:
        if not (self.k1 > 0.0 and self.k2 > 0.0):
            raise ValueError("numerator coefficients must be positive")
        if self.k3 < 0.0 or self.k4 < 0.0 or (self.k3 == 0.0 and self.k4 == 0.0):
            raise ValueError("denominator needs nonnegative coefficients, not both zero")
        if not self.q1 < self.q2:
            raise ValueError("numerator exponents must be ordered q1 < q2")
        for k, q, name in ((self.k3, self.q3, "q3"), (self.k4, self.q4, "q4")):
            if k > 0.0:
                if q is None or not (self.q1 < q < self.q2):
                    raise ValueError(
                        f"{name} must lie strictly inside ({self.q1:g}, {self.q2:g})")

    def ratio(self, t: float) -> float:
        num = self.k1 * t**self.q1 + self.k2 * t**self.q2
        den = 0.0
        if self.k3 > 0.0:
            den += self.k3 * t**self.q3
        if self.k4 > 0.0:
            den += self.k4 * t**self.q4
        return num / den


def omega(query: OmegaQuery, tol: float = 1e-12) -> tuple[float, float]:
    """Infimum of the two-over-two ratio; returns (value, argmin t*)."""
    t_star, value = log_grid_min(query.ratio, tol=tol)
    return value, t_star


def omega_closed_form(big_a: float, big_b: float, q: float) -> float:
    """Closed form of the infimum for numerator A t^2 + B t^4 over t^q."""
    if not (big_a > 0.0 and big_b > 0.0):
        raise ValueError("coefficients must be positive")
    if not 2.0 < q < 4.0:
        raise ValueError(f"denominator power must lie in (2, 4), got {q}")
    half = 0.5 * q
    return (2.0 * (q - 2.0) ** (1.0 - half) * (4.0 - q) ** (half - 2.0)
            * big_a ** (2.0 - half) * big_b ** (half - 1.0))


def aubin_talenti_bubble(grid: RadialGrid) -> RadialFunction:
    """The standard decaying extremal (1 + r^2)^{-(N-2)/2} of the critical embedding."""
    n = grid.dimension
    if n < 3:
        raise ValueError("critical embedding requires dimension >= 3")
    return RadialFunction(grid, (1.0 + grid.nodes**2) ** (-(n - 2) / 2.0))


def sobolev_quotient(u: RadialFunction) -> float:
    """Rayleigh quotient |grad u|_2^2 / |u|_{2*}^2 by quadrature."""
    ts = two_star(u.grid.dimension)
    return u.grad_norm_sq() / u.lp_norm(ts) ** 2


def _bubble_tails(n: int, r_max: float) -> tuple[float, float]:
    """Two-term analytic tails of the bubble integrals beyond r_max.

    Truncation would otherwise dominate the error for small N, where the
    gradient integrand decays only like r^{1-N}.
    """
    from .radial_grid import sphere_area

    area = sphere_area(n)
    grad_tail = area * ((n - 2) * r_max ** (2 - n) - (n - 2) ** 2 * r_max ** (-n))
    crit_tail = area * (r_max ** (-n) / n - n * r_max ** (-n - 2) / (n + 2))
    return grad_tail, crit_tail


@lru_cache(maxsize=None)
def sobolev_constant(dimension: int, r_max: float = 100.0, n_cells: int = 20000) -> float:
    """Best constant of the critical embedding via the decaying extremal."""
    n = int(dimension)
    if n < 3:
        raise ValueError("dimension must be at least 3")
    grid = make_grid(n, r_max=r_max, n_cells=n_cells, scheme="graded")
    u = aubin_talenti_bubble(grid)
    ts = two_star(n)
    grad_tail, crit_tail = _bubble_tails(n, r_max)
    grad = u.grad_norm_sq() + grad_tail
    crit = grid.integrate(u.values**ts) + crit_tail
    return grad / crit ** (2.0 / ts)


def existence_condition(a: float, b: float, dimension: int,
                        sobolev: float | None = None) -> bool:
    """Whether the quadratic-quartic form dominates the critical power.

    For N >= 5 this is the product inequality equivalent to the
    two-over-two infimum with unit critical weight exceeding 1; for
    N = 4 the quartic terms share the exponent and the condition
    collapses to b > 1/S^2.
    """
    if dimension < 4:
        raise ValueError("threshold theory covers dimension >= 4")
    s = sobolev_constant(dimension) if sobolev is None else sobolev
    if dimension == 4:
        return b > 1.0 / s**2
    ts = two_star(dimension)
    lhs = (2.0 * a / (4.0 - ts)) ** ((4.0 - ts) / 2.0) \
        * (2.0 * b / (ts - 2.0)) ** ((ts - 2.0) / 2.0)
    return lhs > s ** (-ts / 2.0)


def delta_star(a: float, b: float, dimension: int,
               sobolev: float | None = None) -> float:
    """Largest margin delta keeping (a-delta, b-delta) coercive, backed off.

    The admissibility boundary solves a strictly decreasing closed-form
    equation, so the supremum is a simple root; the returned value sits
    a relative DELTA_BACKOFF inside it, hence is always admissible.
    """
    if dimension < 5:
        raise ValueError("the margin construction needs dimension >= 5")
    s = sobolev_constant(dimension) if sobolev is None else sobolev
    ts = two_star(dimension)
    weight = s ** (ts / 2.0)

    def gap(d: float) -> float:
        return weight * omega_closed_form(a - d, b - d, ts) - 1.0

    if gap(0.0) <= 0.0:
        raise ValueError("coercivity fails already at zero margin")
    hi = min(a, b) * (1.0 - 1e-12)
    d_max = brentq(gap, 0.0, hi, xtol=1e-15, rtol=8.9e-16)
    return d_max * (1.0 - DELTA_BACKOFF)


def nonexistence_c0(a: float, b: float, p: float, dimension: int, q_mass: float,
                    sobolev: float | None = None) -> float:
    """Mass radius below which no nontrivial normalized solution exists.

    q_mass is the L2 norm of the interpolation extremal for (dimension, p).
    Covered ranges: p in [2 + 4/N, 2*) for N >= 5, and p in [3, 4) for
    N = 4; anything else raises.
    """
    n = int(dimension)
    if q_mass <= 0.0:
        raise ValueError("extremal mass must be positive")
    s = sobolev_constant(n) if sobolev is None else sobolev
    if n >= 5:
        if not existence_condition(a, b, n, s):
            raise ValueError("coercivity condition fails; no threshold certified")
        ts = two_star(n)
        p_mc = 2.0 + 4.0 / n
        if p >= ts or p < p_mc - 1e-12:
            raise ValueError(f"p must lie in [{p_mc:g}, {ts:g}) for dimension {n}")
        if abs(p - p_mc) <= 1e-12:
            bracket = a - (4.0 - ts) / (2.0 * s ** (n / (n - 4.0))) \
                * ((ts - 2.0) / (2.0 * b)) ** (2.0 / (n - 4.0))
            if bracket <= 0.0:
                raise ValueError("threshold bracket nonpositive despite coercivity")
            return q_mass * bracket ** (n / 4.0)
        d = delta_star(a, b, n, s)
        q3 = 0.5 * n * (p - 2.0)
        omega_val = omega_closed_form(2.0 * d, 2.0 * d, q3)
        return (2.0 * q_mass ** (p - 2.0) * omega_val
                / (n * (p - 2.0))) ** (2.0 / (2.0 * p - n * (p - 2.0)))
    if n == 4:
        if not existence_condition(a, b, 4, s):
            raise ValueError("coercivity condition fails; no threshold certified")
        if abs(p - 3.0) <= 1e-12:
            return a * q_mass
        if not 3.0 < p < 4.0:
            raise ValueError("dimension 4 threshold covers p in [3, 4)")
        excess = b - 1.0 / s**2
        return (a * q_mass ** ((p - 2.0) / (4.0 - p))
                / ((4.0 - p) * (p - 2.0) ** (1.0 / (4.0 - p)))
                * (excess / (p - 3.0)) ** ((p - 3.0) / (4.0 - p)))
    raise ValueError("thresholds are defined for dimension >= 4")


def c1_exact_n4_p3(a: float, q_mass: float) -> float:
    """The exact I_c sign-change radius in the quadratic-quartic borderline case."""
    if a <= 0.0 or q_mass <= 0.0:
        raise ValueError("arguments must be positive")
    return a * q_mass


def c_star(a: float, b: float, dimension: int, q_mass: float,
           sobolev: float | None = None) -> float:
    """Radius up to which the constrained infimum stays exactly zero (N >= 5)."""
    n = int(dimension)
    if n < 5:
        raise ValueError("this display needs dimension >= 5")
    s = sobolev_constant(n) if sobolev is None else sobolev
    ts = two_star(n)
    bracket = a - (4.0 - ts) / (ts ** ((n - 2.0) / (n - 4.0)) * s ** (n / (n - 4.0))) \
        * (2.0 * (ts - 2.0) / b) ** (2.0 / (n - 4.0))
    if bracket <= 0.0:
        raise ValueError("hypothesis violation: threshold bracket nonpositive")
    return q_mass * bracket ** (n / 4.0)


@dataclass(frozen=True)
class ThresholdSet:
    """All explicit constants for one (N, p, a, b) configuration."""

    dimension: int
    p: float
    a: float
    b: float
    sobolev: float
    gn_constant: float
    q_mass: float
    existence_ok: bool
    c0: float | None = None
    c_star: float | None = None
    c1_exact: float | None = None
    c1_upper: float | None = None
    c1_upper_variant: float | None = None
    delta: float | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "p": self.p,
            "a": self.a,
            "b": self.b,
            "sobolev": self.sobolev,
            "gn_constant": self.gn_constant,
            "q_mass": self.q_mass,
            "existence_ok": self.existence_ok,
            "c0": self.c0,
            "c_star": self.c_star,
            "c1_exact": self.c1_exact,
            "c1_upper": self.c1_upper,
            "c1_upper_variant": self.c1_upper_variant,
            "delta": self.delta,
            "notes": list(self.notes),
        }


def threshold_set(a: float, b: float, p: float, dimension: int, q_mass: float,
                  gn_const: float, sobolev: float | None = None) -> ThresholdSet:
    """Assemble every threshold that applies to the given configuration.

    Constants whose hypotheses fail are reported as None with a note
    rather than raising, so sweeps can tabulate mixed regimes.
    """
    n = int(dimension)
    s = sobolev_constant(n) if sobolev is None else sobolev
    notes: list[str] = []
    exists_ok = existence_condition(a, b, n, s) if n >= 4 else False
    if n < 4:
        notes.append("no explicit thresholds below dimension 4")

    c0 = cs = c1e = c1u = c1v = delta = None
    if exists_ok:
        try:
            c0 = nonexistence_c0(a, b, p, n, q_mass, s)
        except ValueError as exc:
            notes.append(f"c0 unavailable: {exc}")
        if n >= 5:
            try:
                cs = c_star(a, b, n, q_mass, s)
            except ValueError as exc:
                notes.append(f"c_star unavailable: {exc}")
            if abs(p - (2.0 + 4.0 / n)) <= 1e-12:
                # the sign-change radius is only bracketed here; both
                # printed exponent variants are reported (they disagree
                # in the source material), the first is the derived one
                c1u = a ** (n / 4.0) * q_mass
                c1v = a ** (4.0 / n) * q_mass
                notes.append("c1 upper bound exponent variants differ; trusting n/4")
            try:
                delta = delta_star(a, b, n, s)
            except ValueError:
                pass
        if n == 4 and abs(p - 3.0) <= 1e-12:
            c1e = c1_exact_n4_p3(a, q_mass)
    else:
        notes.append("coercivity condition fails: thresholds undefined")

    return ThresholdSet(
        dimension=n, p=p, a=a, b=b, sobolev=s, gn_constant=gn_const,
        q_mass=q_mass, existence_ok=exists_ok, c0=c0, c_star=cs, c1_exact=c1e,
        c1_upper=c1u, c1_upper_variant=c1v, delta=delta, notes=tuple(notes),
    )
