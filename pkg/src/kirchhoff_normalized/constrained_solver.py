"""Constrained descent, saddle search, and phase classification on the sphere.

Minimizers of I on the mass sphere |u|_2^2 = c^2 are found in two
stages.  A semi-implicit gradient flow with discrete renormalization
drives the iterate into a basin: each step solves the SPD banded system

    (diag(w)/tau + M A) v = w (u/tau + f(u)),

with the scalar M relaxed to self-consistency by an inner fixed point,
then renormalizes v to the sphere and backtracks on tau until the
energy decreases.  Once the flow slows, a bordered Newton iteration on
the full first-order system (gradient plus mass constraint) polishes
the pair (u, lambda) to the residual tolerance; the Kirchhoff rank-one
term is folded in by a Woodbury correction, so every Newton step costs
three banded solves.  Newton does not care about the Morse index, which
is what lets the same polish certify saddle points.

A converged candidate must pass four filters before it is reported:
the PDE residual relative to the H^1 norm, the dilation balance
|G(u)| relative to M(g) g, nontriviality of the gradient norm, and the
multiplier cross-check lambda vs. lambda_pohozaev in the power case.
The dilation balance is the load-bearing one on a truncated ball:
boundary-confined artifact states satisfy the PDE there but carry a
boundary flux in the dilation identity, so they fail the G filter and
are reported as the zero-energy diagnostic rather than as solutions.

Scale matters more than radius: for power models the closed-form fiber
energy of the scaled GN extremal (gn_fiber_energy) predicts where the
negative well sits, and recommended_grid sizes the domain to hold a
profile of that width.  Minimizers near the existence thresholds are
very spread out, and solving them on a unit-scale grid silently turns
an existence question into a truncation artifact.

Saddle points are located by relaxing a string of beads along the
dilation fiber (bead-wise descent plus arc-length reparametrization),
then refining the barrier bead: descent steps alternate with a
recentering onto the nearest fiber maximum of the dilation balance, and
the Newton polish takes over once the refinement is close.  At a fiber
maximum the gradient has no fiber component, so the recentered step is
a genuine descent on the maximum branch.

Nothing here proves anything: classify reports theory branches as
"corroborated" or "inconclusive", never as established, and a missing
minimizer is evidence only at the stated restart count and tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import interp1d
from scipy.linalg import LinAlgError, solve_banded, solveh_banded
from scipy.optimize import brentq

from .functional import (CriticalPointCandidate, energy, fiber_energy,
                         fiber_pohozaev, l2_gradient, multiplier_estimate,
                         pde_residual_norm, pohozaev)
from .gn_ground_state import gn_constant, ground_state
from .models import EXP_ARG_CAP, ExpOverflowError, Model, two_star
from .omega_thresholds import ThresholdSet, threshold_set
from .radial_grid import (RadialFunction, RadialGrid, TruncationLossError,
                          fiber_scale, make_grid, normalize_mass)
from .scalar_opt import BracketError, golden_min, sign_change_brackets

STATUS_MINIMIZER = "converged_minimizer"
STATUS_MOUNTAIN_PASS = "converged_mountain_pass"
STATUS_NONE_FOUND = "no_nontrivial_solution_found"
STATUS_DIVERGED = "diverged"

BRANCH_NO_SOLUTION = "no_solution"
BRANCH_ZERO_INF = "zero_infimum_unattained"
BRANCH_GROUND_STATE = "ground_state"
BRANCH_TRANSITION = "transition_window"
BRANCH_MOUNTAIN_PASS = "mountain_pass_regime"
BRANCH_UNCLASSIFIED = "unclassified"

# below this the profile counts as trivial; spread-out minimizing
# sequences land here on the truncated domain
TRIVIAL_GRAD_SQ = 1e-6
STEP_FLOOR = 1e-12
STEP_CAP = 1e4
DIVERGENCE_ENERGY = 1e12
DIVERGENCE_GRAD_SQ = 1e14
ZERO_LEVEL_TOL = 1e-6
# flow-progress window: attempt the Newton polish when the residual has
# not halved over this many iterations
STALL_WINDOW = 60
# the graded grid's cost is independent of the radius, so the cap only
# guards against absurd scale requests near degenerate thresholds
MAX_R_MAX = 20000.0


class FiberMonotoneError(RuntimeError):
    """Raised when the dilation balance has no root of the requested kind."""


@dataclass(frozen=True)
class SolveParams:
    """Discretization and stopping policy shared by both solvers.

    residual_tol is relative to the H^1 norm of the iterate; fiber_tol
    bounds |G(u)| relative to M(g) g.  restarts counts initial profiles
    for the minimizer (Gaussian widths, then the scaled GN extremal,
    then seeded random bumps).  r_max is a floor: minimize_on_sphere
    widens the domain per (model, c) via recommended_grid unless an
    explicit grid is supplied.
    """

    step: float = 0.5
    max_iter: int = 2000
    residual_tol: float = 1e-6
    fiber_tol: float = 1e-5
    multiplier_gap_tol: float = 1e-2
    restarts: int = 6
    gaussian_widths: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0)
    beads: int = 32
    sweeps: int = 80
    r_max: float = 24.0
    n_cells: int = 4000
    scheme: str = "graded"
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("step", "residual_tol", "fiber_tol", "multiplier_gap_tol"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not 1 <= self.max_iter <= 10**6:
            raise ValueError(f"max_iter must lie in [1, 1e6], got {self.max_iter}")
        if not 1 <= self.restarts <= 256:
            raise ValueError(f"restarts must lie in [1, 256], got {self.restarts}")
        if self.beads < 4:
            raise ValueError(f"need at least 4 beads, got {self.beads}")
        if self.sweeps < 1:
            raise ValueError(f"sweeps must be positive, got {self.sweeps}")
        if not self.r_max > 0:
            raise ValueError(f"r_max must be positive, got {self.r_max}")
        if not self.gaussian_widths:
            raise ValueError("need at least one Gaussian width")


@dataclass
class SolveReport:
    """Outcome of one solve: status, candidate, and the run diagnostics.

    infimum_estimate is the lowest final energy over all finite restarts
    (it is meaningful even when no candidate passes the filters, which
    is how the zero-infimum regimes are recognized); path_level is the
    saddle-search barrier estimate and None for plain minimization.
    """

    status: str
    candidate: CriticalPointCandidate | None
    infimum_estimate: float
    path_level: float | None
    iterations: int
    restarts_used: int
    residual_history: list[float] = field(repr=False, default_factory=list)
    energy_history: list[float] = field(repr=False, default_factory=list)
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "candidate": None if self.candidate is None else self.candidate.to_dict(),
            "infimum_estimate": self.infimum_estimate,
            "path_level": self.path_level,
            "iterations": self.iterations,
            "restarts_used": self.restarts_used,
            "final_residual": self.residual_history[-1] if self.residual_history else None,
            "notes": list(self.notes),
        }


def model_dimension(model: Model) -> int:
    nl = model.nonlinearity
    return nl.dimension if nl.kind == "power" else 2


def gn_fiber_energy(model: Model, c: float, t: float) -> float:
    """Energy of the c-normalized GN extremal dilated to scale t, in
    closed form from the extremal's norms (power models only)."""
    nl = model.nonlinearity
    if nl.kind != "power":
        raise ValueError("the GN fiber family needs a power nonlinearity")
    n, p = nl.dimension, nl.p
    q = ground_state(n, p)
    ratio = c / q.q_l2
    g = (c * t) ** 2 * q.grad_sq / q.mass
    val = 0.5 * model.coefficient.Mhat(g)
    val -= ratio**p * q.lp / p * t ** (0.5 * n * (p - 2.0))
    if nl.include_critical and q.crit is not None:
        qs = two_star(n)
        val -= ratio**qs * q.crit / qs * t ** (0.5 * n * (qs - 2.0))
    return val


def gn_fiber_min(model: Model, c: float, t_lo: float = 1e-4,
                 t_hi: float = 1e2, n_coarse: int = 600) -> tuple[float, float]:
    """Scale t minimizing gn_fiber_energy and the value there.

    The coarse log grid is polished by golden section when the minimum
    is interior; a boundary minimum is returned as-is (t_lo signals the
    spread-to-zero regime where no negative well exists).
    """
    def j(t: float) -> float:
        return gn_fiber_energy(model, c, t)
    ts = np.exp(np.linspace(math.log(t_lo), math.log(t_hi), n_coarse))
    vals = np.array([j(t) for t in ts])
    k = int(np.argmin(vals))
    if 0 < k < n_coarse - 1:
        t, v = golden_min(j, ts[k - 1], ts[k + 1])
        return float(t), float(v)
    return float(ts[k]), float(vals[k])


def gn_fiber_well(model: Model, c: float, t_lo: float = 1e-4,
                  t_hi: float = 1e2, n_coarse: int = 600
                  ) -> tuple[float, float] | None:
    """Deepest interior local minimum of the GN fiber energy, or None.

    Distinct from gn_fiber_min when the global minimum sits at the
    spread boundary: just below the attainment threshold the fiber
    still has a positive-depth well behind a barrier, which is what
    the saddle search and the grid-width heuristic need to see.
    """
    def j(t: float) -> float:
        return gn_fiber_energy(model, c, t)
    ts = np.exp(np.linspace(math.log(t_lo), math.log(t_hi), n_coarse))
    vals = np.array([j(t) for t in ts])
    best: tuple[float, float] | None = None
    for k in range(1, n_coarse - 1):
        if vals[k] <= vals[k - 1] and vals[k] <= vals[k + 1]:
            t, v = golden_min(j, ts[k - 1], ts[k + 1])
            if best is None or v < best[1]:
                best = (float(t), float(v))
    return best


def gn_fiber_barrier(model: Model, c: float, t_hi: float,
                     t_lo: float = 1e-4, n_coarse: int = 400
                     ) -> tuple[float, float] | None:
    """Highest interior local maximum of the GN fiber energy on
    (t_lo, t_hi), or None when the fiber has no barrier there."""
    def j(t: float) -> float:
        return gn_fiber_energy(model, c, t)
    if not t_hi > t_lo:
        return None
    ts = np.exp(np.linspace(math.log(t_lo), math.log(t_hi), n_coarse))
    vals = np.array([j(t) for t in ts])
    best: tuple[float, float] | None = None
    for k in range(1, n_coarse - 1):
        if vals[k] >= vals[k - 1] and vals[k] >= vals[k + 1]:
            t, v = golden_min(lambda x: -j(x), ts[k - 1], ts[k + 1])
            if best is None or -v > best[1]:
                best = (float(t), float(-v))
    return best


def recommended_grid(model: Model, c: float, params: SolveParams) -> RadialGrid:
    """Solver grid sized to the predicted minimizer width.

    For a power model whose GN fiber has an interior well at scale t*,
    the domain radius grows to hold the extremal spread by 1/t* (capped
    at MAX_R_MAX); otherwise params.r_max is kept.  The well is used
    whatever its depth sign, since the saddle search needs the barrier
    resolved even when the well floor is positive.  Exponential models
    keep params.r_max, their profiles concentrate rather than spread.
    """
    n = model_dimension(model)
    r_max = params.r_max
    if model.nonlinearity.kind == "power":
        well = gn_fiber_well(model, c)
        if well is not None:
            q = ground_state(model.nonlinearity.dimension, model.nonlinearity.p)
            r_max = max(r_max, min(MAX_R_MAX, 1.3 * q.truncation_radius / well[0]))
    return make_grid(n, r_max, params.n_cells, params.scheme)


def _onto_grid(u: RadialFunction, grid: RadialGrid) -> RadialFunction:
    if u.grid is grid:
        return u
    vals = np.interp(grid.nodes, u.grid.nodes, u.values, right=0.0)
    return RadialFunction(grid, vals)


def _pin_tail(u: RadialFunction) -> RadialFunction:
    vals = u.values.copy()
    vals[-1] = 0.0
    return u.with_values(vals)


def _f_prime(model: Model, u: np.ndarray) -> np.ndarray:
    """Diagonal Jacobian of the nonlinearity.

    The exponential family is one-sided (f vanishes on u <= 0), so its
    derivative is zero there; the power family is odd, so its
    derivative is even in u.
    """
    nl = model.nonlinearity
    if nl.kind == "power":
        au = np.abs(u)
        out = (nl.p - 1.0) * au ** (nl.p - 2.0)
        if nl.include_critical:
            qs = two_star(nl.dimension)
            out = out + (qs - 1.0) * au ** (qs - 2.0)
        return out
    out = np.zeros_like(u)
    low = (u > 0) & (u <= nl.u1)
    out[low] = (nl.sigma - 1.0) * u[low] ** (nl.sigma - 2.0)
    high = u > nl.u1
    if np.any(high):
        v = u[high]
        arg = nl.alpha0 * v * v
        if float(np.max(arg)) >= EXP_ARG_CAP:
            raise ExpOverflowError("exp argument exceeds the overflow cap")
        out[high] = np.exp(arg) * (2.0 * arg * arg - 3.0 * arg + 3.0) \
            / (nl.alpha0 * v**4)
    return out


def _implicit_step(model: Model, u: RadialFunction, tau: float,
                   ab0: np.ndarray, inner: int = 4) -> RadialFunction:
    """One semi-implicit flow step, with M relaxed to self-consistency."""
    grid = u.grid
    w = grid.weights
    rhs = w * (u.values / tau + model.nonlinearity.f(u.values))
    m = model.coefficient.M(u.grad_norm_sq())
    v = u
    for _ in range(inner):
        ab = ab0 * m
        ab[1] += w / tau
        vals = np.zeros_like(u.values)
        # Dirichlet tail: drop the outermost node from the solve
        vals[:-1] = solveh_banded(ab[:, :-1], rhs[:-1], lower=False,
                                  overwrite_ab=True, check_finite=False)
        v = u.with_values(vals)
        m_new = model.coefficient.M(v.grad_norm_sq())
        if abs(m_new - m) <= 1e-12 * (1.0 + m):
            break
        m = 0.5 * (m + m_new)
    return v


def _newton_polish(model: Model, u: RadialFunction, lam: float, c: float,
                   tol_norm: float, max_iter: int = 16, deepen: float = 1e-3
                   ) -> tuple[RadialFunction, float, float, bool]:
    """Bordered Newton on (gradient, mass constraint); returns (u, lam,
    residual, converged).

    The Jacobian splits into a tridiagonal part (stiffness, diagonal
    f', multiplier shift), the Kirchhoff rank-one M'(g) correction
    (folded in by Woodbury), and the constraint border (eliminated by a
    scalar solve), so each iteration is three banded LU solves.  Steps
    are halved until the residual norm decreases; a step that cannot
    decrease it ends the polish.  The target is deepen * tol_norm, well
    below the acceptance tolerance: the leftover gradient at tol_norm
    would otherwise dominate the dilation-balance defect of the
    converged profile, which is checked against a much smaller scale
    than the H^1 norm when the profile is spread out.
    """
    grid = u.grid
    w = grid.weights
    ab0 = grid.stiffness_banded()
    sup = ab0[0]
    diag = ab0[1]

    def resid_norm(x: RadialFunction, lm: float) -> float:
        return pde_residual_norm(model, x, lm)

    res = resid_norm(u, lam)
    for _ in range(max_iter):
        if res <= deepen * tol_norm:
            return u, lam, res, True
        vals = u.values
        g = u.grad_norm_sq()
        mcoef = model.coefficient.M(g)
        try:
            fp = _f_prime(model, vals)
        except ExpOverflowError:
            return u, lam, res, res <= tol_norm
        stiff = grid.stiffness_apply(vals)
        rho = (mcoef * stiff) / w - model.nonlinearity.f(vals) - lam * vals
        h = 0.5 * (float(w @ vals**2) - c * c)
        # tridiagonal Jacobian in node space, interior nodes only
        k = len(vals) - 1
        band = np.zeros((3, k))
        band[0, 1:] = mcoef * sup[1:k] / w[: k - 1]
        band[1, :] = mcoef * diag[:k] / w[:k] - fp[:k] - lam
        band[2, :-1] = mcoef * sup[1:k] / w[1:k]
        coef = model.coefficient
        if coef.kind == "affine" and coef.theta == 1.0:
            mprime = coef.b
        else:
            mprime = _m_prime(model, g)
        pvec = 2.0 * mprime * stiff[:k] / w[:k]
        qvec = stiff[:k]
        try:
            sols = solve_banded((1, 1), band,
                                np.column_stack([rho[:k], pvec, vals[:k]]),
                                check_finite=False)
        except (LinAlgError, ValueError):
            return u, lam, res, res <= tol_norm
        x_rho, x_p, x_u = sols[:, 0], sols[:, 1], sols[:, 2]
        denom = 1.0 + float(qvec @ x_p)
        if abs(denom) < 1e-300:
            return u, lam, res, res <= tol_norm
        b_rho = x_rho - x_p * (float(qvec @ x_rho) / denom)
        b_u = x_u - x_p * (float(qvec @ x_u) / denom)
        wu = w[:k] * vals[:k]
        slope = float(wu @ b_u)
        if abs(slope) < 1e-300:
            return u, lam, res, res <= tol_norm
        dlam = (-h + float(wu @ b_rho)) / slope
        du = -b_rho + dlam * b_u
        improved = False
        scale = 1.0
        for _ in range(7):
            new_vals = vals.copy()
            new_vals[:k] = vals[:k] + scale * du
            try:
                cand = u.with_values(new_vals)
                new_lam = lam + scale * dlam
                new_res = resid_norm(cand, new_lam)
            except ExpOverflowError:
                scale *= 0.5
                continue
            if math.isfinite(new_res) and new_res < res:
                u, lam, res = cand, new_lam, new_res
                improved = True
                break
            scale *= 0.5
        if not improved:
            return u, lam, res, res <= tol_norm
    return u, lam, res, res <= tol_norm


def _m_prime(model: Model, g: float, h: float = 1e-6) -> float:
    scale = h * (1.0 + abs(g))
    return (model.coefficient.M(g + scale) - model.coefficient.M(max(g - scale, 0.0))) \
        / (scale + min(g, scale))


@dataclass
class _Run:
    u: RadialFunction
    lam: float
    res: float
    energy: float
    iterations: int
    flag: str
    res_history: list[float]
    energy_history: list[float]
    note: str = ""


def _run_descent(model: Model, u0: RadialFunction, c: float,
                 params: SolveParams) -> _Run:
    grid = u0.grid
    ab0 = grid.stiffness_banded()
    u = normalize_mass(_pin_tail(u0), c)
    try:
        e = energy(model, u).total
    except ExpOverflowError:
        return _Run(u, math.nan, math.inf, -math.inf, 0, "diverged",
                    [], [], "initial profile overflows the exponential")
    tau = params.step
    res_hist: list[float] = []
    e_hist = [e]
    flag = "max_iter"
    it = 0
    polish_attempts = 0
    last_polish = -STALL_WINDOW
    for it in range(1, params.max_iter + 1):
        est = multiplier_estimate(model, u, c)
        res = pde_residual_norm(model, u, est.lam)
        res_hist.append(res)
        tol_norm = params.residual_tol * u.h1_norm()
        if res <= tol_norm:
            flag = "converged"
            break
        stalled_now = len(res_hist) > STALL_WINDOW \
            and res > 0.5 * res_hist[-STALL_WINDOW - 1]
        if stalled_now and polish_attempts < 4 \
                and it - last_polish >= STALL_WINDOW:
            polish_attempts += 1
            last_polish = it
            pu, plam, pres, ok = _newton_polish(model, u, est.lam, c, tol_norm)
            if ok:
                u = normalize_mass(pu, c)
                e = energy(model, u).total
                e_hist.append(e)
                flag = "converged"
                res_hist.append(pres)
                break
        stepped = False
        while tau >= STEP_FLOOR:
            try:
                v = normalize_mass(_implicit_step(model, u, tau, ab0.copy()), c)
                ev = energy(model, v).total
            except (ExpOverflowError, LinAlgError):
                tau *= 0.5
                continue
            if math.isfinite(ev) and ev <= e + 1e-12 * (1.0 + abs(e)):
                u, e = v, ev
                stepped = True
                tau = min(tau * 1.3, STEP_CAP)
                break
            tau *= 0.5
        e_hist.append(e)
        if not stepped:
            flag = "stalled"
            break
        if e < -DIVERGENCE_ENERGY or u.grad_norm_sq() > DIVERGENCE_GRAD_SQ:
            return _Run(u, math.nan, math.inf, e, it, "diverged", res_hist,
                        e_hist, f"energy {e:.3e}, |grad u|^2 {u.grad_norm_sq():.3e}")
    # final polish runs even after an in-loop convergence: the flow
    # stops at tol_norm, and the leftover gradient there would dominate
    # the dilation-balance defect of a spread-out profile
    est = multiplier_estimate(model, u, c)
    res = pde_residual_norm(model, u, est.lam)
    pu, plam, pres, ok = _newton_polish(model, u, est.lam, c,
                                        params.residual_tol * u.h1_norm())
    if pres < res:
        u = normalize_mass(pu, c)
        est = multiplier_estimate(model, u, c)
        res = pde_residual_norm(model, u, est.lam)
        e = energy(model, u).total
    if res <= params.residual_tol * u.h1_norm():
        flag = "converged"
    elif flag == "converged":
        flag = "stalled"
    return _Run(u, est.lam, res, e, it, flag, res_hist, e_hist)


def _filter_failures(model: Model, u: RadialFunction, c: float, res: float,
                     params: SolveParams) -> list[str]:
    fails = []
    g = u.grad_norm_sq()
    if g <= TRIVIAL_GRAD_SQ:
        fails.append(f"trivial profile: |grad u|^2 = {g:.3e}")
    if abs(u.mass() - c * c) > 1e-8 * c * c:
        fails.append("mass drifted off the sphere")
    if res > params.residual_tol * u.h1_norm():
        fails.append(f"pde residual {res:.3e} above tolerance")
    scale = model.coefficient.M(g) * g
    balance = abs(pohozaev(model, u))
    if balance > params.fiber_tol * scale:
        fails.append(f"dilation balance {balance:.3e} vs scale {scale:.3e}")
    est = multiplier_estimate(model, u, c)
    if est.gap is not None and abs(est.lam) > 1e-12 \
            and est.gap > params.multiplier_gap_tol:
        fails.append(f"multiplier gap {est.gap:.3e}")
    return fails


def _q_scaled_values(model: Model, c: float, grid: RadialGrid,
                     t: float) -> np.ndarray:
    """Values of the c-normalized GN extremal dilated to scale t."""
    nl = model.nonlinearity
    q = ground_state(nl.dimension, nl.p)
    return t ** (nl.dimension / 2.0) * (c / q.q_l2) * np.interp(
        t * grid.nodes, q.profile.grid.nodes, q.profile.values, right=0.0)


def _initial_profiles(model: Model, c: float, grid: RadialGrid,
                      params: SolveParams,
                      rng: np.random.Generator) -> list[tuple[str, RadialFunction]]:
    r = grid.nodes
    shapes: list[tuple[str, np.ndarray]] = []
    nl = model.nonlinearity
    if nl.kind == "power":
        t_star, j_star = gn_fiber_min(model, c)
        label = f"gn extremal t={t_star:.4g}"
        shapes.append((label, _q_scaled_values(model, c, grid, t_star)))
    # width fractions of the domain cover the spread regimes, the fixed
    # widths cover the concentrated ones
    for w in params.gaussian_widths:
        shapes.append((f"gaussian w={w:g}", np.exp(-0.5 * (r / w) ** 2)))
    shapes.append((f"gaussian w={grid.r_max / 6.0:g}",
                   np.exp(-0.5 * (r / (grid.r_max / 6.0)) ** 2)))
    while len(shapes) < params.restarts:
        w = float(rng.uniform(0.4, grid.r_max / 4.0))
        k = int(rng.integers(0, 3))
        shapes.append((f"random {len(shapes)}",
                       (1.0 + r) ** k * np.exp(-0.5 * (r / w) ** 2)))
    out = []
    for label, vals in shapes[: params.restarts]:
        u = _pin_tail(RadialFunction(grid, np.asarray(vals, dtype=float)))
        if u.mass() <= 0.0:
            continue
        out.append((label, normalize_mass(u, c)))
    return out


def _candidate(model: Model, run: _Run) -> CriticalPointCandidate:
    return CriticalPointCandidate(
        u=run.u, lam=run.lam, energy=run.energy,
        pohozaev_residual=pohozaev(model, run.u), pde_residual=run.res)


def minimize_on_sphere(model: Model, c: float, params: SolveParams | None = None,
                       grid: RadialGrid | None = None,
                       starts: list[RadialFunction] | None = None) -> SolveReport:
    """Minimize I over the mass sphere |u|_2^2 = c^2 with restarts.

    The grid defaults to recommended_grid(model, c, params), which
    widens the domain when the predicted minimizer is spread out.
    starts, when given, replaces the built-in initial profiles (they
    are resampled onto the solver grid and renormalized); this is how
    sweeps warm-start along a c-grid.
    """
    if not (isinstance(c, (int, float)) and math.isfinite(c) and c > 0):
        raise ValueError(f"mass radius c must be positive and finite, got {c!r}")
    params = params or SolveParams()
    grid = grid or recommended_grid(model, c, params)
    rng = np.random.default_rng(params.seed)
    if starts is None:
        labeled = _initial_profiles(model, c, grid, params, rng)
    else:
        labeled = [(f"supplied {i}", normalize_mass(_pin_tail(_onto_grid(s, grid)), c))
                   for i, s in enumerate(starts)]
    if not labeled:
        raise ValueError("no viable initial profiles on this grid")
    notes: list[str] = []
    best: _Run | None = None
    best_pass: _Run | None = None
    infimum = math.inf
    diverged = False
    for label, u0 in labeled:
        run = _run_descent(model, u0, c, params)
        if run.flag == "diverged":
            diverged = True
            notes.append(f"{label}: diverged ({run.note})")
            continue
        infimum = min(infimum, run.energy)
        fails = _filter_failures(model, run.u, c, run.res, params)
        if fails:
            notes.append(f"{label}: rejected ({'; '.join(fails)})")
        else:
            notes.append(f"{label}: candidate with I = {run.energy:.9g}, "
                         f"lambda = {run.lam:.9g}")
            if best_pass is None or run.energy < best_pass.energy:
                best_pass = run
        if best is None or run.energy < best.energy:
            best = run
    if best_pass is not None:
        if diverged:
            notes.append("warning: some restarts diverged; the minimizer may be local")
        run = best_pass
        return SolveReport(STATUS_MINIMIZER, _candidate(model, run), infimum,
                           None, run.iterations, len(labeled),
                           run.res_history, run.energy_history, tuple(notes))
    if diverged:
        notes.append("unbounded descent direction found and no restart "
                     "produced a candidate")
        rep_run = best
        return SolveReport(STATUS_DIVERGED, None, -math.inf, None,
                           0 if rep_run is None else rep_run.iterations,
                           len(labeled),
                           [] if rep_run is None else rep_run.res_history,
                           [] if rep_run is None else rep_run.energy_history,
                           tuple(notes))
    if abs(infimum) <= ZERO_LEVEL_TOL:
        notes.append("zero-energy diagnostic: infimum consistent with 0, "
                     "no profile passed the filters")
    run = best
    return SolveReport(STATUS_NONE_FOUND, None, infimum, None, run.iterations,
                       len(labeled), run.res_history, run.energy_history,
                       tuple(notes))


def _exp_safe_scale(model: Model, u: RadialFunction) -> float:
    """Largest fiber parameter s keeping alpha0 |T(u,s)|_inf^2 under the cap."""
    nl = model.nonlinearity
    if nl.kind != "exp":
        return math.inf
    peak = float(np.max(np.abs(u.values)))
    if peak == 0.0:
        return math.inf
    n = u.grid.dimension
    return math.log(0.98 * EXP_ARG_CAP / (nl.alpha0 * peak * peak)) / n


def _balance_roots(model: Model, u: RadialFunction, lo: float, hi: float,
                   n_scan: int) -> list[tuple[float, float]]:
    """Roots of s -> G(T(u, s)) in [lo, hi] with their slopes."""
    def g_of(s: float) -> float:
        try:
            return fiber_pohozaev(model, u, s)
        except ExpOverflowError:
            return math.nan
    xs = np.linspace(lo, hi, n_scan)
    out = []
    for a, b in sign_change_brackets(g_of, xs):
        root = a if a == b else float(brentq(g_of, a, b, xtol=1e-13))
        h = 1e-6
        slope = (g_of(root + h) - g_of(root - h)) / (2.0 * h)
        out.append((root, slope))
    return out


def pohozaev_project(model: Model, u: RadialFunction, c: float,
                     s_range: tuple[float, float] = (-6.0, 4.0),
                     n_scan: int = 241) -> tuple[float, RadialFunction]:
    """Project u onto the dilation-balance manifold along its fiber.

    Scans G(T(u, s)) for sign changes and polishes each root.  When
    I(u) < 0 the root minimizing the fiber energy is returned (the
    well); otherwise the fiber-maximum root with the largest energy (the
    barrier).  Raises FiberMonotoneError when G has no root in the
    scanned range, and ValueError when u is off the sphere.  The
    projected profile is resampled, so its own |G| is grid-limited even
    though the fiber root is polished to 1e-13.
    """
    if abs(u.mass() - c * c) > 1e-6 * c * c:
        raise ValueError("profile must lie on the mass sphere before projecting")
    lo, hi = s_range
    hi = min(hi, _exp_safe_scale(model, u))
    if not hi > lo:
        raise ValueError("empty dilation range after the overflow guard")
    roots = _balance_roots(model, u, lo, hi, n_scan)
    if not roots:
        raise FiberMonotoneError(
            f"dilation balance keeps one sign on [{lo:g}, {hi:g}]")
    if energy(model, u).total < 0.0:
        s_star = min((s for s, _ in roots),
                     key=lambda s: fiber_energy(model, u, s))
    else:
        maxima = [s for s, slope in roots if slope < 0.0]
        pool = maxima if maxima else [s for s, _ in roots]
        s_star = max(pool, key=lambda s: fiber_energy(model, u, s))
    v = normalize_mass(_pin_tail(fiber_scale(u, s_star)), c)
    return s_star, v


def _left_endpoint(base: RadialFunction) -> float:
    """Most negative fiber parameter the grid window can spread to."""
    s = -2.5
    while s < -1e-3:
        try:
            fiber_scale(base, s)
            return s
        except TruncationLossError:
            s += 0.25
    raise BracketError("profile tail too wide to spread within the grid")


def _right_endpoint(model: Model, base: RadialFunction, s_left: float) -> float:
    """Concentrated path endpoint: beyond the fiber barrier.

    Two geometries occur.  When the fiber energy eventually plunges
    (planar exponential, N=4 competition), the endpoint is the first
    scale well below min(0, J(s_left)).  When the Kirchhoff quartic
    dominates at infinity (N >= 5), the fiber instead dips into an
    interior well behind the barrier and rises again; the endpoint is
    then the well bottom.
    """
    e_left = fiber_energy(model, base, s_left)
    target = min(0.0, e_left) - 0.1 * (1.0 + abs(e_left))
    s_hi = min(6.0, _exp_safe_scale(model, base))
    ss = np.arange(0.05, s_hi, 0.05)
    vals = np.full(len(ss), math.inf)
    for i, s in enumerate(ss):
        try:
            vals[i] = fiber_energy(model, base, s)
        except ExpOverflowError:
            ss, vals = ss[:i], vals[:i]
            break
        if vals[i] < target:
            return float(ss[i])
    if len(ss) >= 3:
        k_bar = int(np.argmax(vals))
        if k_bar < len(ss) - 1:
            k_well = k_bar + 1 + int(np.argmin(vals[k_bar + 1:]))
            drop = vals[k_bar] - vals[k_well]
            if k_well < len(ss) - 1 and drop > 1e-9 * (1.0 + abs(vals[k_bar])) \
                    and vals[k_well] < vals[k_bar]:
                return float(ss[k_well])
    raise BracketError("no fiber descent beyond a barrier within the safe "
                       "dilation range")


def _reparametrize(grid: RadialGrid, beads: np.ndarray,
                   c: float) -> np.ndarray | None:
    """Redistribute beads to uniform weighted-L2 arc length; None on collapse."""
    gaps = np.sqrt(np.maximum(0.0, np.array(
        [grid.weights @ (beads[j + 1] - beads[j]) ** 2
         for j in range(len(beads) - 1)])))
    cum = np.concatenate([[0.0], np.cumsum(gaps)])
    if cum[-1] <= 1e-12:
        return None
    cum += np.arange(len(beads)) * (1e-14 * (1.0 + cum[-1]))
    fresh = interp1d(cum, beads, axis=0, assume_sorted=True)(
        np.linspace(cum[0], cum[-1], len(beads)))
    fresh[0], fresh[-1] = beads[0], beads[-1]
    for j in range(1, len(beads) - 1):
        fresh[j] = normalize_mass(RadialFunction(grid, fresh[j]), c).values
    return fresh


def _bead_sweeps(model: Model, grid: RadialGrid, beads: np.ndarray, c: float,
                 params: SolveParams,
                 ab0: np.ndarray) -> tuple[np.ndarray, list[float]] | None:
    tau = 0.2 * params.step
    levels: list[float] = []
    for _ in range(params.sweeps):
        for j in range(1, len(beads) - 1):
            u = RadialFunction(grid, beads[j])
            e = energy(model, u).total
            t = tau
            for _ in range(4):
                try:
                    v = normalize_mass(_implicit_step(model, u, t, ab0.copy()), c)
                    ev = energy(model, v).total
                except (ExpOverflowError, LinAlgError):
                    t *= 0.25
                    continue
                if math.isfinite(ev) and ev <= e + 1e-12 * (1.0 + abs(e)):
                    beads[j] = v.values
                    break
                t *= 0.25
        fresh = _reparametrize(grid, beads, c)
        if fresh is None:
            return None
        beads = fresh
        levels.append(max(energy(model, RadialFunction(grid, row)).total
                          for row in beads))
        if len(levels) >= 6 and abs(levels[-1] - levels[-6]) \
                <= 1e-10 * (1.0 + abs(levels[-1])):
            break
    return beads, levels


def _recenter_on_fiber_max(model: Model, u: RadialFunction, c: float,
                           window: float) -> RadialFunction:
    hi = min(window, _exp_safe_scale(model, u))
    roots = _balance_roots(model, u, -window, hi, 25)
    maxima = [s for s, slope in roots if slope < 0.0]
    if not maxima:
        raise FiberMonotoneError("no fiber maximum near the current profile")
    s_star = min(maxima, key=abs)
    return normalize_mass(_pin_tail(fiber_scale(u, s_star)), c)


def _refine_saddle(model: Model, u: RadialFunction, c: float,
                   params: SolveParams, ab0: np.ndarray) -> _Run:
    try:
        u = _recenter_on_fiber_max(model, u, c, 0.8)
    except (FiberMonotoneError, TruncationLossError):
        pass
    e = energy(model, u).total
    tau = 0.25 * params.step
    res_hist: list[float] = []
    e_hist = [e]
    flag = "max_iter"
    it = 0
    polish_attempts = 0
    last_polish = -STALL_WINDOW
    for it in range(1, params.max_iter + 1):
        est = multiplier_estimate(model, u, c)
        res = pde_residual_norm(model, u, est.lam)
        res_hist.append(res)
        tol_norm = params.residual_tol * u.h1_norm()
        if res <= tol_norm:
            flag = "converged"
            break
        stalled_now = len(res_hist) > STALL_WINDOW \
            and res > 0.5 * res_hist[-STALL_WINDOW - 1]
        if (stalled_now or res <= 1e-2 * u.h1_norm()) and polish_attempts < 4 \
                and it - last_polish >= STALL_WINDOW:
            polish_attempts += 1
            last_polish = it
            pu, plam, pres, ok = _newton_polish(model, u, est.lam, c, tol_norm)
            # accept only a local polish: the saddle must not slide into
            # a well, which a Newton step cannot do by itself unless the
            # start was far out
            if ok:
                drift = math.sqrt(float(u.grid.weights @ (pu.values - u.values) ** 2))
                if drift <= 0.25 * math.sqrt(u.mass()):
                    u = normalize_mass(pu, c)
                    e = energy(model, u).total
                    e_hist.append(e)
                    res_hist.append(pres)
                    flag = "converged"
                    break
        stepped = False
        while tau >= STEP_FLOOR:
            try:
                v = normalize_mass(_implicit_step(model, u, tau, ab0.copy()), c)
                w = _recenter_on_fiber_max(model, v, c, 0.8)
                ew = energy(model, w).total
            except (ExpOverflowError, LinAlgError, TruncationLossError,
                    FiberMonotoneError):
                tau *= 0.5
                continue
            # recentering climbs back to the fiber max, so the pair is
            # monotone on the maximum branch; backtrack otherwise
            if math.isfinite(ew) and ew <= e + 1e-11 * (1.0 + abs(e)):
                u, e = w, ew
                stepped = True
                tau = min(tau * 1.2, STEP_CAP)
                break
            tau *= 0.5
        e_hist.append(e)
        if not stepped:
            flag = "stalled"
            break
    est = multiplier_estimate(model, u, c)
    res = pde_residual_norm(model, u, est.lam)
    if flag != "converged" and res <= params.residual_tol * u.h1_norm():
        flag = "converged"
    return _Run(u, est.lam, res, energy(model, u).total, it, flag,
                res_hist, e_hist)


def _spread_limit(base: RadialFunction, s_lo: float, s_hi: float) -> float:
    """Most negative s in [s_lo, s_hi] the grid window accepts."""
    s = s_lo
    while s < s_hi:
        try:
            fiber_scale(base, s)
            return s
        except TruncationLossError:
            s += 0.1
    raise BracketError("profile tail too wide to spread within the grid")


def mountain_pass(model: Model, c: float, params: SolveParams | None = None,
                  initial_profile: RadialFunction | None = None,
                  grid: RadialGrid | None = None) -> SolveReport:
    """Estimate the mountain-pass level and refine the barrier bead.

    For a power model whose GN fiber shows a well behind a barrier (the
    saddle regime just below the attainment threshold), the path runs
    along the fiber of the scaled GN extremal from a spread endpoint
    below the barrier down into the well, on a grid sized to the
    barrier scale.  Otherwise the path follows the dilation fiber of
    initial_profile (default: the unit-width Gaussian) from a spread
    small-gradient endpoint to a negative-energy one.

    path_level is the relaxed string barrier, an upper estimate of the
    min-max level; the report carries it even when the saddle
    refinement stays above the residual tolerance, which is the
    expected outcome for the planar exponential models where the level
    is compared with the dilation ceiling 0.5 Mhat(4 pi / alpha0)
    rather than asserted convergent.
    """
    if not (isinstance(c, (int, float)) and math.isfinite(c) and c > 0):
        raise ValueError(f"mass radius c must be positive and finite, got {c!r}")
    params = params or SolveParams()
    nl = model.nonlinearity
    notes: list[str] = []
    well_bar: tuple[tuple[float, float], tuple[float, float]] | None = None
    if initial_profile is None and nl.kind == "power":
        well = gn_fiber_well(model, c)
        if well is not None:
            bar = gn_fiber_barrier(model, c, well[0])
            if bar is not None and bar[1] > well[1]:
                well_bar = (well, bar)
    if grid is None:
        r_max = params.r_max
        if well_bar is not None:
            q = ground_state(nl.dimension, nl.p)
            r_max = max(r_max, min(MAX_R_MAX,
                                   2.2 * q.truncation_radius / well_bar[1][0]))
        grid = make_grid(model_dimension(model), r_max, params.n_cells,
                         params.scheme)
    if initial_profile is not None:
        base = normalize_mass(_pin_tail(_onto_grid(initial_profile, grid)), c)
    elif well_bar is not None:
        (t_well, j_well), (t_bar, j_bar) = well_bar
        base = normalize_mass(_pin_tail(RadialFunction(
            grid, _q_scaled_values(model, c, grid, t_well))), c)
        notes.append(f"fiber well at scale {t_well:.4g} (J = {j_well:.4g}), "
                     f"barrier at {t_bar:.4g} (J = {j_bar:.4g})")
    else:
        vals = np.exp(-0.5 * grid.nodes**2)
        base = normalize_mass(_pin_tail(RadialFunction(grid, vals)), c)
    ab0 = grid.stiffness_banded()
    if well_bar is not None:
        s_bar = math.log(well_bar[1][0] / well_bar[0][0])
        s_left = _spread_limit(base, s_bar - 0.6, s_bar - 0.05)
        s_right = 0.0
    else:
        s_left = _left_endpoint(base)
        try:
            s_right = _right_endpoint(model, base, s_left)
        except BracketError as exc:
            # fiber never descends: there is no two-endpoint geometry to
            # string between, so report absence instead of failing
            notes.append(f"no saddle geometry: {exc}")
            return SolveReport(STATUS_NONE_FOUND, None, math.nan, None, 0, 1,
                               (), (), tuple(notes))
    swept = None
    end_levels = (math.nan, math.nan)
    for attempt in range(3):
        s_grid = np.linspace(s_left, s_right, params.beads)
        beads = np.array([
            normalize_mass(_pin_tail(fiber_scale(base, s)), c).values
            for s in s_grid])
        end_levels = (energy(model, RadialFunction(grid, beads[0])).total,
                      energy(model, RadialFunction(grid, beads[-1])).total)
        swept = _bead_sweeps(model, grid, beads, c, params, ab0)
        if swept is not None:
            beads, levels = swept
            if levels[-1] > max(end_levels) + 1e-9 * (1.0 + abs(levels[-1])):
                break
            swept = None
        if well_bar is not None:
            notes.append(f"attempt {attempt}: path collapsed, spreading the "
                         "left endpoint")
            try:
                s_left = _spread_limit(base, s_left - 0.5, s_left - 0.05)
            except BracketError:
                break
        else:
            notes.append(f"attempt {attempt}: path collapsed, stretching the fiber")
            safe = _exp_safe_scale(model, base)
            s_right = s_right + 0.75 * (attempt + 1)
            if math.isfinite(safe):
                s_right = min(s_right, safe - 1e-9)
    if swept is None:
        notes.append("string collapsed onto its endpoints after retries")
        return SolveReport(STATUS_DIVERGED, None, math.nan, None, 0, 1,
                           [], [], tuple(notes))
    beads, levels = swept
    path_level = levels[-1]
    bead_energies = [energy(model, RadialFunction(grid, row)).total
                     for row in beads]
    top = int(np.argmax(bead_energies))
    notes.append(f"string: {len(levels)} sweeps, barrier bead {top} "
                 f"of {params.beads}, level {path_level:.9g}")
    if path_level <= max(end_levels):
        notes.append("warning: barrier does not exceed the endpoint energies")
    if nl.kind == "exp":
        ceiling = 0.5 * model.coefficient.Mhat(4.0 * math.pi / nl.alpha0)
        side = "below" if path_level < ceiling else "not below"
        notes.append(f"level estimate {path_level:.6g} is {side} the "
                     f"dilation ceiling {ceiling:.6g}; the estimate is an "
                     "upper bound, it never certifies the strict inequality")
    run = _refine_saddle(model, RadialFunction(grid, beads[top]), c, params, ab0)
    fails = _filter_failures(model, run.u, c, run.res, params)
    if not fails:
        notes.append(f"saddle refined: I = {run.energy:.9g}, "
                     f"lambda = {run.lam:.9g}")
        return SolveReport(STATUS_MOUNTAIN_PASS, _candidate(model, run),
                           run.energy, path_level, run.iterations, 1,
                           run.res_history, run.energy_history, tuple(notes))
    notes.append(f"saddle refinement below tolerance: {'; '.join(fails)}")
    return SolveReport(STATUS_NONE_FOUND, None, run.energy, path_level,
                       run.iterations, 1, run.res_history, run.energy_history,
                       tuple(notes))


@dataclass
class ClassificationRecord:
    """Theory branch vs. numeric outcome for one (model, c) point."""

    dimension: int
    p: float | None
    a: float
    b: float
    c: float
    predicted: str
    observed_status: str
    infimum_estimate: float
    infimum_sign: str
    multiplier: float | None
    agreement: str
    thresholds: ThresholdSet | None = field(repr=False, default=None)
    report: SolveReport | None = field(repr=False, default=None)
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "p": self.p,
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "predicted": self.predicted,
            "observed_status": self.observed_status,
            "infimum_estimate": self.infimum_estimate,
            "infimum_sign": self.infimum_sign,
            "multiplier": self.multiplier,
            "agreement": self.agreement,
            "thresholds": None if self.thresholds is None else self.thresholds.to_dict(),
            "notes": list(self.notes),
        }


def _predicted_branch(thr: ThresholdSet, c: float) -> str:
    if not thr.existence_ok:
        return BRANCH_UNCLASSIFIED
    n, p = thr.dimension, thr.p
    mass_crit = 2.0 + 4.0 / n
    if abs(p - mass_crit) <= 1e-12:
        if n == 4:
            return BRANCH_ZERO_INF if c <= thr.c1_exact else BRANCH_GROUND_STATE
        if thr.c_star is not None and c <= thr.c_star:
            return BRANCH_ZERO_INF
        if thr.c1_upper is not None and c > thr.c1_upper:
            return BRANCH_GROUND_STATE
        return BRANCH_TRANSITION
    if p < mass_crit:
        return BRANCH_GROUND_STATE
    if thr.c0 is not None and c < thr.c0:
        return BRANCH_NO_SOLUTION
    return BRANCH_TRANSITION


def _agreement(predicted: str, report: SolveReport) -> str:
    cand = report.candidate
    inf = report.infimum_estimate
    if predicted == BRANCH_NO_SOLUTION:
        if report.status == STATUS_NONE_FOUND and inf >= -ZERO_LEVEL_TOL:
            return "corroborated"
        if report.status == STATUS_MINIMIZER:
            return "contradicted"
        return "inconclusive"
    if predicted == BRANCH_GROUND_STATE:
        if report.status == STATUS_MINIMIZER and cand.energy < 0.0 \
                and cand.lam < 0.0:
            return "corroborated"
        return "inconclusive"
    if predicted == BRANCH_ZERO_INF:
        # the computable shadow of "zero infimum, unattained" is the
        # absence of any negative-energy candidate: a truncated domain
        # pins spreading profiles at positive energy, so the infimum
        # estimate itself stays above zero
        if report.status == STATUS_NONE_FOUND and inf >= -ZERO_LEVEL_TOL:
            return "corroborated"
        if report.status == STATUS_MINIMIZER and cand.energy < -ZERO_LEVEL_TOL:
            return "contradicted"
        return "inconclusive"
    return "inconclusive"


def _sign_label(value: float) -> str:
    if not math.isfinite(value):
        return "unbounded" if value < 0 else "undetermined"
    if value < -ZERO_LEVEL_TOL:
        return "negative"
    if value > ZERO_LEVEL_TOL:
        return "positive"
    return "zero"


def classify(model: Model, c: float, params: SolveParams | None = None,
             run_mountain_pass: bool = False) -> ClassificationRecord:
    """Compare the predicted theory branch with the solver outcome at c.

    Power models need the affine coefficient (the explicit thresholds
    are stated for M(t) = a + b t).  Planar exponential models are
    reported as the mountain-pass regime; the solver only runs for them
    when run_mountain_pass is set.  Agreement is three-valued and a
    corroboration is exactly that, evidence at the stated restart count
    and tolerances.
    """
    params = params or SolveParams()
    nl = model.nonlinearity
    coef = model.coefficient
    notes: list[str] = []
    if nl.kind == "exp":
        report = mountain_pass(model, c, params) if run_mountain_pass else None
        if report is None:
            observed, inf, lam = "not_run", math.nan, None
            agreement = "inconclusive"
            notes.append("solver skipped; set run_mountain_pass to probe")
        else:
            observed, inf = report.status, report.infimum_estimate
            lam = report.candidate.lam if report.candidate else None
            agreement = "corroborated" if report.status == STATUS_MOUNTAIN_PASS \
                and (lam is None or lam < 0) else "inconclusive"
        return ClassificationRecord(
            2, None, getattr(coef, "a", math.nan), getattr(coef, "b", math.nan),
            c, BRANCH_MOUNTAIN_PASS, observed, inf, _sign_label(inf), lam,
            agreement, None, report, tuple(notes))
    if coef.kind != "affine":
        raise ValueError("explicit thresholds need the affine coefficient "
                         "M(t) = a + b t")
    n, p = nl.dimension, nl.p
    q = ground_state(n, p)
    thr = threshold_set(coef.a, coef.b, p, n, q.q_l2, gn_constant(n, p))
    predicted = _predicted_branch(thr, c)
    notes.extend(thr.notes)
    report = minimize_on_sphere(model, c, params)
    agreement = _agreement(predicted, report)
    lam = report.candidate.lam if report.candidate else None
    return ClassificationRecord(
        n, p, coef.a, coef.b, c, predicted, report.status,
        report.infimum_estimate, _sign_label(report.infimum_estimate), lam,
        agreement, thr, report, tuple(notes))
