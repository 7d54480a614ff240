"""One-dimensional wave and diffusion dynamics on a uniform grid.

Position-operator discretization with quadrature-measured L2 errors,
norm-preserving Crank-Nicolson evolution, extraction of the osmotic and
current drift fields from a complex grid function, forward Euler-Maruyama
ensembles with the matching diffusion constant, and residual evaluation of
the coupled nonlinear field equations the linear evolution is equivalent to.

Natural units: both the action constant and the mass default to 1 and are
carried on the wave function, so the diffusion scale (action/mass) stays
configurable.  The phase gauge is fixed per snapshot by zeroing the phase at
mid-grid; only its x-derivative enters the fields.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import solve_banded

from .errors import BoundaryMassLoss, NodeEncountered, PathEscape, SupportEscape
from .tolerances import TOL


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 8:
            raise ValueError("need at least 8 grid points")
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be below x_max")

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    def refined(self, factor: int = 2) -> "Grid1D":
        """Same span with the spacing divided by `factor`."""
        return Grid1D(self.x_min, self.x_max, (self.n_points - 1) * factor + 1)


@dataclass(frozen=True)
class WaveFunction:
    grid: Grid1D
    values: np.ndarray
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", v)
        if v.shape != (self.grid.n_points,):
            raise ValueError("values must match the grid")
        if abs(self.norm_squared - 1.0) > TOL.wf_norm:
            raise ValueError(f"squared norm {self.norm_squared!r} is not 1")

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.spacing)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def _normalized(grid: Grid1D, raw: np.ndarray, hbar: float, mass: float) -> WaveFunction:
    norm = np.sqrt(np.sum(np.abs(raw) ** 2) * grid.spacing)
    return WaveFunction(grid=grid, values=raw / norm, hbar=hbar, mass=mass)


def gaussian_packet(
    grid: Grid1D,
    x0: float = 0.0,
    sigma: float = 1.0,
    k0: float = 0.0,
    hbar: float = 1.0,
    mass: float = 1.0,
) -> WaveFunction:
    x = grid.x
    raw = np.exp(-((x - x0) ** 2) / (4.0 * sigma**2)) * np.exp(1j * k0 * x)
    return _normalized(grid, raw, hbar, mass)


def harmonic_ground_state(
    grid: Grid1D, omega: float = 1.0, hbar: float = 1.0, mass: float = 1.0
) -> WaveFunction:
    raw = np.exp(-mass * omega * grid.x**2 / (2.0 * hbar)).astype(complex)
    return _normalized(grid, raw, hbar, mass)


# --- position-operator discretization ---------------------------------------------------


def discretize_position(
    f: Callable[[np.ndarray], np.ndarray], grid: Grid1D, quad_refine: int = 10
) -> tuple[float, float]:
    """L2 errors of the cell-constant approximation and of the discretized
    multiplication-by-x operator applied to it.

    The continuous function is sampled at cell left edges; both errors are
    measured against a quadrature with `quad_refine` midpoints per cell, the
    operator error relative to x*f(x).  Raises SupportEscape when more than
    1e-6 of the squared mass sits outside the grid span.
    """
    x = grid.x
    delta = grid.spacing

    def mass_on(points: np.ndarray, weight: float) -> float:
        return float(np.sum(np.abs(f(points)) ** 2) * weight)

    fine = delta / quad_refine
    inside_points = (
        x[:-1, None] + (np.arange(quad_refine)[None, :] + 0.5) * fine
    ).reshape(-1)
    inside = mass_on(inside_points, fine)
    span = grid.x_max - grid.x_min
    n_out = 8 * quad_refine * grid.n_points
    left = np.linspace(grid.x_min - span, grid.x_min, n_out)
    right = np.linspace(grid.x_max, grid.x_max + span, n_out)
    outside = mass_on(left, span / n_out) + mass_on(right, span / n_out)
    if outside > 1e-6 * (inside + outside):
        raise SupportEscape(
            f"{outside / (inside + outside):.2e} of the squared mass lies outside the grid"
        )

    samples = f(x[:-1])
    fq = f(inside_points).reshape(grid.n_points - 1, quad_refine)
    step = samples[:, None]
    err_f = np.sum(np.abs(step - fq) ** 2) * fine
    target = inside_points.reshape(grid.n_points - 1, quad_refine) * fq
    op = (x[:-1] * samples)[:, None]
    err_op = np.sum(np.abs(op - target) ** 2) * fine
    return float(np.sqrt(err_f)), float(np.sqrt(err_op))


# --- Crank-Nicolson evolution ----------------------------------------------------------


def schrodinger_evolve(
    wf: WaveFunction, potential: Callable[[np.ndarray], np.ndarray], dt: float, steps: int
) -> WaveFunction:
    """Evolve under -(hbar^2/2m) d2/dx2 + V with the trapezoidal (Cayley) step.

    Dirichlet zero boundaries; each step solves one tridiagonal system, which
    keeps the discrete norm to machine precision.  Raises BoundaryMassLoss as
    soon as the boundary cells carry more than 1e-6 of the squared mass.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    grid = wf.grid
    x = grid.x
    delta = grid.spacing
    hbar, mass = wf.hbar, wf.mass
    kinetic = hbar**2 / (mass * delta**2)
    v = np.asarray(potential(x), dtype=float)
    g = 1j * dt / (2.0 * hbar)

    diag_a = 1.0 + g * (kinetic + v)
    off_a = -g * kinetic / 2.0
    diag_b = 1.0 - g * (kinetic + v)
    off_b = g * kinetic / 2.0

    n = grid.n_points
    band = np.zeros((3, n), dtype=complex)
    band[0, 1:] = off_a
    band[1, :] = diag_a
    band[2, :-1] = off_a

    f = wf.values.copy()
    for step in range(steps):
        rhs = diag_b * f
        rhs[:-1] += off_b * f[1:]
        rhs[1:] += off_b * f[:-1]
        f = solve_banded((1, 1), band, rhs)
        boundary = (abs(f[0]) ** 2 + abs(f[-1]) ** 2) * delta
        if boundary > 1e-6:
            raise BoundaryMassLoss(
                f"boundary cells hold {boundary:.2e} of the mass at step {step + 1}"
            )
    return WaveFunction(grid=grid, values=f, hbar=hbar, mass=mass)


# --- drift fields -------------------------------------------------------------------------


@dataclass(frozen=True)
class NelsonFields:
    """Osmotic (u), current (v), forward (b) and backward (b_star) drifts.

    By construction b = v + u and b_star = v - u hold pointwise; sigma2 is
    the diffusion constant hbar/mass shared by the forward and backward
    processes.
    """

    grid: Grid1D
    u: np.ndarray
    v: np.ndarray
    b: np.ndarray
    b_star: np.ndarray
    sigma2: float

    def __post_init__(self):
        for name in ("u", "v", "b", "b_star"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if arr.shape != (self.grid.n_points,):
                raise ValueError(f"{name} must match the grid")
        if np.max(np.abs(self.b - (self.v + self.u))) > 1e-10 or np.max(
            np.abs(self.b_star - (self.v - self.u))
        ) > 1e-10:
            raise ValueError("drift fields must satisfy b = v + u, b_star = v - u")


def nelson_fields(wf: WaveFunction) -> NelsonFields:
    """Extract the drift fields from a snapshot by central differences.

    u = (hbar/2m) (ln rho)_x and v = (hbar/m) S_x with the phase S unwrapped
    along the grid and gauged to zero at mid-grid.  An interior amplitude at
    or below 1e-12 (a node) makes the fields undefined there and raises
    NodeEncountered; vanishing tails are fine.
    """
    amp = np.abs(wf.values)
    tiny = amp <= 1e-12
    if tiny.any():
        idx = np.flatnonzero(tiny)
        interior = (idx > np.flatnonzero(~tiny).min()) & (idx < np.flatnonzero(~tiny).max())
        if interior.any():
            raise NodeEncountered(
                f"amplitude underflows at interior grid points {idx[interior][:5]}"
            )
    delta = wf.grid.spacing
    rho = np.maximum(amp**2, 1e-300)
    log_rho = np.log(rho)
    s = np.unwrap(np.angle(wf.values))
    s = s - s[wf.grid.n_points // 2]
    u = (wf.hbar / (2.0 * wf.mass)) * np.gradient(log_rho, delta)
    v = (wf.hbar / wf.mass) * np.gradient(s, delta)
    return NelsonFields(
        grid=wf.grid, u=u, v=v, b=v + u, b_star=v - u, sigma2=wf.hbar / wf.mass
    )


# --- diffusion ensembles ---------------------------------------------------------------------


@dataclass(frozen=True)
class Ensemble:
    positions: np.ndarray
    time: float
    seed: int
    n_escaped: int


def simulate_diffusion(
    fields: NelsonFields,
    x0_sampler: Callable[[np.random.Generator, int], np.ndarray],
    dt: float,
    steps: int,
    n_paths: int,
    seed: int,
) -> Ensemble:
    """Forward Euler-Maruyama integration of dx = b dt + sqrt(sigma2) dW.

    The drift is linearly interpolated on the grid and clamped to the edge
    values outside it.  Paths that ever leave the grid span are counted; more
    than 0.1% of them escaping aborts the run.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    rng = np.random.default_rng(seed)
    xs = np.asarray(x0_sampler(rng, n_paths), dtype=float)
    grid_x = fields.grid.x
    noise_scale = np.sqrt(fields.sigma2 * dt)
    escaped = np.zeros(n_paths, dtype=bool)
    for _ in range(steps):
        drift = np.interp(xs, grid_x, fields.b)
        xs = xs + drift * dt + noise_scale * rng.standard_normal(n_paths)
        escaped |= (xs < fields.grid.x_min) | (xs > fields.grid.x_max)
    n_escaped = int(escaped.sum())
    if n_escaped > 1e-3 * n_paths:
        raise PathEscape(f"{n_escaped} of {n_paths} paths left the grid span")
    return Ensemble(positions=xs, time=steps * dt, seed=seed, n_escaped=n_escaped)


# --- residuals of the coupled field equations ---------------------------------------------------


def _support_region(*wfs: WaveFunction, margin: int = 2) -> np.ndarray:
    mask = np.ones(wfs[0].grid.n_points, dtype=bool)
    for wf in wfs:
        rho = wf.density
        mask &= rho > 1e-6 * rho.max()
    mask[:margin] = False
    mask[-margin:] = False
    return mask


def residual_ut_vt(
    wf0: WaveFunction,
    wf1: WaveFunction,
    potential: Callable[[np.ndarray], np.ndarray],
    dt: float,
) -> tuple[float, float]:
    """Max residuals of the two coupled drift-field equations between snapshots.

    u_t + (1/2) sigma2 v_xx + (v u)_x and
    v_t - a - u u_x + v v_x - (1/2) sigma2 u_xx,    a = -V_x / m,
    with time derivatives by forward difference of the fields and spatial
    terms by central differences at the earlier snapshot, evaluated where the
    density of both snapshots exceeds 1e-6 of its peak.
    """
    if wf0.grid != wf1.grid:
        raise ValueError("snapshots must share a grid")
    grid = wf0.grid
    delta = grid.spacing
    f0 = nelson_fields(wf0)
    f1 = nelson_fields(wf1)
    sigma2 = f0.sigma2
    region = _support_region(wf0, wf1)

    u_t = (f1.u - f0.u) / dt
    v_t = (f1.v - f0.v) / dt
    v_xx = np.gradient(np.gradient(f0.v, delta), delta)
    u_xx = np.gradient(np.gradient(f0.u, delta), delta)
    vu_x = np.gradient(f0.v * f0.u, delta)
    u_ux = f0.u * np.gradient(f0.u, delta)
    v_vx = f0.v * np.gradient(f0.v, delta)
    accel = -np.gradient(np.asarray(potential(grid.x), dtype=float), delta) / wf0.mass

    res_ut = u_t - (-0.5 * sigma2 * v_xx - vu_x)
    res_vt = v_t - (accel + u_ux - v_vx + 0.5 * sigma2 * u_xx)
    return float(np.max(np.abs(res_ut[region]))), float(np.max(np.abs(res_vt[region])))


def fokker_planck_residual(
    grid: Grid1D,
    rho: np.ndarray,
    b: np.ndarray,
    sigma2: float,
    rho_t: np.ndarray | None = None,
) -> float:
    """Max of |-(b rho)_x + (1/2) sigma2 rho_xx - rho_t| on the bulk region.

    With rho_t omitted this is the stationarity residual.
    """
    rho = np.asarray(rho, dtype=float)
    delta = grid.spacing
    flux = np.gradient(b * rho, delta)
    spread = np.gradient(np.gradient(rho, delta), delta)
    residual = -flux + 0.5 * sigma2 * spread
    if rho_t is not None:
        residual = residual - np.asarray(rho_t, dtype=float)
    mask = rho > 1e-6 * rho.max()
    mask[:2] = False
    mask[-2:] = False
    return float(np.max(np.abs(residual[mask])))


# --- CSV export -------------------------------------------------------------------------------------


def wavefunction_csv(wf: WaveFunction) -> str:
    """Snapshot table: x, re f, im f, rho, u, v, b."""
    fields = nelson_fields(wf)
    out = io.StringIO()
    out.write("x,re_f,im_f,rho,u,v,b\n")
    rho = wf.density
    for i, x in enumerate(wf.grid.x):
        row = (x, wf.values[i].real, wf.values[i].imag, rho[i], fields.u[i], fields.v[i], fields.b[i])
        out.write(",".join(f"{v:.12g}" for v in row) + "\n")
    return out.getvalue()


def ensemble_csv(ensemble: Ensemble) -> str:
    out = io.StringIO()
    out.write("path_id,x_final\n")
    for i, x in enumerate(ensemble.positions):
        out.write(f"{i},{x:.12g}\n")
    return out.getvalue()


__all__ = [
    "Grid1D",
    "WaveFunction",
    "NelsonFields",
    "Ensemble",
    "gaussian_packet",
    "harmonic_ground_state",
    "discretize_position",
    "schrodinger_evolve",
    "nelson_fields",
    "simulate_diffusion",
    "residual_ut_vt",
    "fokker_planck_residual",
    "wavefunction_csv",
    "ensemble_csv",
]
