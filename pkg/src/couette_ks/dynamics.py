"""Time integration of the rescaled perturbation system in a sheared frame.

After rescaling time by the shear amplitude A, the system for the cell
density n and perturbation vorticity omega reads

    d_t n     + y d_x n     - (1/A) lap n     = -(1/A) div( v n + (n^2 + n) grad c )
    d_t omega + y d_x omega - (1/A) lap omega = -(1/A) ( d_x n + div(v omega) )

with c = (1 - lap)^{-1} n and v = grad^perp lap^{-1} omega.  Couette
transport is handled exactly by evolving coefficients in a frame whose
effective y-wavenumber is ky - s*kx (s = accumulated shear phase), and
diffusion by the exact integrating factor exp(-nu * int |k_eff|^2 dt),
which has a closed form per step.  The nonlinear fluxes use a two-stage
second-order predictor-corrector on the transformed variable.

The shear phase is folded back onto the lattice ("remap") every
``pi/Ly`` units of s; the state is re-dealiased at each remap.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace

import numpy as np

from . import elliptic
from .grid import (
    Grid,
    SpectralField,
    dealias,
    from_spectral,
    lp_norm,
    make_grid,
    spectral_l2,
    to_spectral,
    zeros_like,
)

__all__ = [
    "PhysParams",
    "SimState",
    "InitialData",
    "RunResult",
    "IntegrationError",
    "make_initial",
    "derive_fields",
    "nonlinear_rhs",
    "step",
    "run",
    "write_checkpoint",
    "read_checkpoint",
]

CHECKPOINT_MAGIC = b"CKS1"


class IntegrationError(RuntimeError):
    """Non-finite values appeared in the integration."""


@dataclass(frozen=True)
class PhysParams:
    """Physics and stepping controls for one run (rescaled time units)."""

    A: float
    grid: Grid
    t_end: float
    dt: float  # step-size cap; actual steps subdivide remap segments
    dt_min: float = 1e-8
    remap_units: int = 1  # remap period in lattice units pi/Ly
    nonlinear: bool = True
    blowup_factor: float = 10.0
    eps_pos: float = 1e-6
    leak_threshold: float = 1e-8
    max_steps: int = 2_000_000

    def __post_init__(self):
        if self.A < 1:
            raise ValueError("shear amplitude A must be >= 1")
        if self.dt <= 0 or self.t_end <= 0:
            raise ValueError("dt and t_end must be positive")
        if self.remap_units < 1:
            raise ValueError("remap_units must be a positive integer")

    @property
    def nu(self) -> float:
        return 1.0 / self.A

    @property
    def remap_period(self) -> float:
        return self.remap_units * np.pi / self.grid.Ly


@dataclass(frozen=True)
class SimState:
    """Evolving (n, omega) pair with frame phase and cached derived fields."""

    t: float
    s: float  # shear phase since last remap
    n: SpectralField
    omega: SpectralField
    c: SpectralField = None
    v1: SpectralField = None
    v2: SpectralField = None


@dataclass(frozen=True)
class InitialData:
    kind: str = "gaussian-blob"  # or "file"
    mass: float = 3.0
    center: tuple = (np.pi, 0.0)
    width: float = 0.4
    v_in: dict = field(default_factory=lambda: {"kind": "zero"})
    path: str = None


@dataclass
class RunResult:
    verdict: str  # global-looking | blow-up | boundary-leak | instability | inconclusive
    trigger: str
    t_exit: float
    state: SimState
    records: list


def derive_fields(state: SimState) -> SimState:
    """Fill the cached chemoattractant and velocity for the current (n, omega)."""
    c = elliptic.solve_chemo(state.n)
    sol = elliptic.solve_stream(state.omega)
    return replace(state, c=c, v1=sol.v1, v2=sol.v2)


def _periodized_gaussian(grid: Grid, x0: float, y0: float, sigma: float) -> np.ndarray:
    X, Y = np.meshgrid(grid.x, grid.y, indexing="ij")
    out = np.zeros_like(X)
    for mx_img in (-2, -1, 0, 1, 2):
        for my_img in (-1, 0, 1):
            dx = X - x0 + 2 * np.pi * mx_img
            dyv = Y - y0 + 2 * grid.Ly * my_img
            out += np.exp(-(dx**2 + dyv**2) / (2 * sigma**2))
    return out


def make_initial(init: InitialData, grid: Grid) -> SimState:
    """Build the t = 0 state; blob amplitude is rescaled so ||n||_L1 = mass."""
    if init.kind == "file":
        state, _ = read_checkpoint(init.path, grid=grid)
        return derive_fields(state)
    if init.kind != "gaussian-blob":
        raise ValueError(f"unknown initial-data kind {init.kind!r}")
    if init.mass < 0:
        raise ValueError("mass must be nonnegative")
    x0, y0 = init.center
    sigma = init.width
    if sigma <= 0:
        raise ValueError("blob width must be positive")
    # tail at the y-boundary must sit below the truncation-validity budget
    gap = grid.Ly - abs(y0)
    if gap <= 0 or np.exp(-(gap**2) / (2 * sigma**2)) > 1e-12:
        raise ValueError(
            f"blob (y0={y0}, sigma={sigma}) leaks past the y-boundary at Ly={grid.Ly:g}"
        )
    if init.mass == 0:
        n = zeros_like(grid)
    else:
        blob = _periodized_gaussian(grid, x0, y0, sigma)
        raw = to_spectral(grid, blob)
        quad_mass = lp_norm(raw, 1)
        n = dealias(to_spectral(grid, blob * (init.mass / quad_mass)))
    omega = _initial_vorticity(init.v_in, grid)
    return derive_fields(SimState(t=0.0, s=0.0, n=n, omega=omega))


def _initial_vorticity(v_in: dict, grid: Grid) -> SpectralField:
    kind = (v_in or {}).get("kind", "zero")
    if kind == "zero":
        return zeros_like(grid)
    if kind == "stream-blob":
        # omega = lap psi for a Gaussian stream blob: mean-free by construction
        from .grid import laplacian

        amp = float(v_in.get("amplitude", 1.0))
        x0, y0 = v_in.get("center", (np.pi, 0.0))
        sigma = float(v_in.get("width", 1.0))
        psi = to_spectral(grid, amp * _periodized_gaussian(grid, x0, y0, sigma))
        return dealias(laplacian(psi))
    raise ValueError(f"unknown v_in kind {kind!r}")


def _diffusion_factor(params: PhysParams, shear0: float, dt: float) -> np.ndarray:
    """exp(-nu * int_{s0}^{s0+dt} kx^2 + (ky - s kx)^2 ds), closed form."""
    g = params.grid
    kx = g.kx[:, None]
    p0 = g.ky[None, :] - shear0 * kx
    p1 = g.ky[None, :] - (shear0 + dt) * kx
    lam = dt * (kx**2 + (p0 * p0 + p0 * p1 + p1 * p1) / 3.0)
    return np.exp(-params.nu * lam)


def _product(a: SpectralField, b_samples: np.ndarray) -> SpectralField:
    """Dealiased pseudo-spectral product of a spectral field with samples."""
    g = a.grid
    return dealias(to_spectral(g, from_spectral(a) * b_samples, a.shear))


def nonlinear_rhs(state: SimState, params: PhysParams):
    """Tendencies of (n, omega) excluding shear transport and diffusion.

    Flux form: both tendencies are divergences (plus d_x n for omega), so
    their (0, 0) coefficients vanish identically and mass is conserved to
    roundoff.
    """
    g = params.grid
    s = state.s
    n, c, v1, v2 = state.n, state.c, state.v1, state.v2
    from .grid import ddx, ddy

    n_p = from_spectral(n)
    cx_p = from_spectral(ddx(c))
    cy_p = from_spectral(ddy(c))
    v1_p = from_spectral(v1)
    v2_p = from_spectral(v2)
    w_p = from_spectral(state.omega)

    # stage-wise dealiased products: q = n*n, then (q + n) * grad c
    q = dealias(to_spectral(g, n_p * n_p, s))
    q_p = from_spectral(q)
    fx = dealias(to_spectral(g, v1_p * n_p + (q_p + n_p) * cx_p, s))
    fy = dealias(to_spectral(g, v2_p * n_p + (q_p + n_p) * cy_p, s))
    gx = dealias(to_spectral(g, v1_p * w_p, s))
    gy = dealias(to_spectral(g, v2_p * w_p, s))

    inv_a = params.nu
    dn = -inv_a * (ddx(fx).coef + ddy(fy).coef)
    domega = -inv_a * (ddx(n).coef + ddx(gx).coef + ddy(gy).coef)
    return SpectralField(g, dn, s), SpectralField(g, domega, s)


def step(state: SimState, dt: float, params: PhysParams) -> SimState:
    """Advance one step of size dt (no remap; caller manages segmenting)."""
    g = params.grid
    s0 = state.s
    ef = _diffusion_factor(params, s0, dt)
    if params.nonlinear:
        dn1, dw1 = nonlinear_rhs(state, params)
        # predictor at the advanced frame phase
        n_star = SpectralField(g, ef * (state.n.coef + dt * dn1.coef), s0 + dt)
        w_star = SpectralField(g, ef * (state.omega.coef + dt * dw1.coef), s0 + dt)
        mid = derive_fields(SimState(state.t + dt, s0 + dt, n_star, w_star))
        dn2, dw2 = nonlinear_rhs(mid, params)
        n_new = ef * (state.n.coef + 0.5 * dt * dn1.coef) + 0.5 * dt * dn2.coef
        w_new = ef * (state.omega.coef + 0.5 * dt * dw1.coef) + 0.5 * dt * dw2.coef
    else:
        n_new = ef * state.n.coef
        w_new = ef * state.omega.coef
    if not (np.all(np.isfinite(n_new)) and np.all(np.isfinite(w_new))):
        raise IntegrationError(f"non-finite coefficients at t={state.t + dt:.6g}")
    out = SimState(
        t=state.t + dt,
        s=s0 + dt,
        n=SpectralField(g, n_new, s0 + dt),
        omega=SpectralField(g, w_new, s0 + dt),
    )
    return derive_fields(out)


def remap(state: SimState, params: PhysParams) -> SimState:
    """Fold an integer number of shear units back onto the ky lattice."""
    g = params.grid
    b = np.pi / g.Ly
    units = int(round(state.s / b))
    if abs(state.s - units * b) > 1e-9 * max(1.0, b):
        raise ValueError("remap called away from a lattice-aligned shear phase")
    if units == 0:
        return state

    def shift(f: SpectralField) -> SpectralField:
        # new index m' = m - units*kx, gathered; wrapped lanes are zeroed
        m_old = g.my[None, :] + units * g.mx[:, None]
        valid = (m_old >= -g.Ny // 2 + 1) & (m_old <= g.Ny // 2)
        gathered = f.coef[np.arange(g.Nx)[:, None], np.mod(m_old, g.Ny)]
        return dealias(SpectralField(g, np.where(valid, gathered, 0.0), 0.0))

    out = SimState(t=state.t, s=state.s - units * b, n=shift(state.n), omega=shift(state.omega))
    return derive_fields(out)


def _cfl_dt(state: SimState, params: PhysParams) -> float:
    """Admissible step size from the explicit terms; inf in linear mode."""
    if not params.nonlinear:
        return np.inf
    g = params.grid
    from .grid import ddx, ddy

    n_p = from_spectral(state.n)
    v1m = np.max(np.abs(from_spectral(state.v1)))
    v2m = np.max(np.abs(from_spectral(state.v2)))
    cxm = np.max(np.abs(from_spectral(ddx(state.c))))
    cym = np.max(np.abs(from_spectral(ddy(state.c))))
    n_sup = np.max(np.abs(n_p))
    bound = np.inf
    # spec bound on the raw perturbation velocity
    if v1m > 0:
        bound = min(bound, 0.5 * g.dx / v1m)
    if v2m > 0:
        bound = min(bound, 0.5 * g.dy / v2m)
    # rescaled transport (fluid + chemotactic drift) and reaction bounds
    sx = (v1m + (n_sup + 1.0) * cxm) * params.nu
    sy = (v2m + (n_sup + 1.0) * cym) * params.nu
    if sx > 0:
        bound = min(bound, 0.5 * g.dx / sx)
    if sy > 0:
        bound = min(bound, 0.5 * g.dy / sy)
    react = (n_sup + 1.0) ** 2 * params.nu
    bound = min(bound, 0.5 / react)
    return bound


def _segment_plan(state: SimState, params: PhysParams, seg_len: float):
    """Number of equal substeps for the remaining segment length."""
    allowed = min(params.dt, _cfl_dt(state, params))
    m = max(1, int(np.ceil(seg_len / allowed - 1e-12)))
    return m, seg_len / m


def boundary_leak_value(f: SpectralField) -> float:
    """Max |f| on the y rows with |y| >= 0.95 Ly."""
    g = f.grid
    rows = np.abs(g.y) >= 0.95 * g.Ly
    return float(np.max(np.abs(from_spectral(f)[:, rows])))


def run(params: PhysParams, init, recorder=None, n_in_sup: float = None) -> RunResult:
    """Integrate to t_end or an early exit.

    ``init`` is an InitialData or a prepared SimState.  ``recorder``, if
    given, is called as recorder(state, dt, trigger) once at the start and
    at every remap-segment boundary (plus at early exits, with the trigger
    set); non-None return values are collected into the result records.
    ``n_in_sup`` overrides the blow-up reference amplitude when resuming a
    run whose initial state is not the current one.

    Checkpoints written at segment boundaries (where the shear phase is
    zero) resume exactly: all stepping decisions are pure functions of
    (state, params).
    """
    state = make_initial(init, params.grid) if isinstance(init, InitialData) else derive_fields(init)
    per = params.remap_period
    if n_in_sup is None:
        n_in_sup = lp_norm(state.n, np.inf)
    records = []

    def record(st, dt_now, trigger=None):
        if recorder is not None:
            rec = recorder(st, dt_now, trigger)
            if rec is not None:
                records.append(rec)

    def fast_exit(n_phys):
        n_sup = float(np.max(np.abs(n_phys)))
        n_min = float(np.min(n_phys))
        if n_in_sup > 0 and n_sup >= params.blowup_factor * n_in_sup:
            return "blow-up", f"n_linf reached {n_sup / n_in_sup:.2f} x initial"
        if n_min < -params.eps_pos * max(n_sup, 1e-300):
            return "instability", f"min n = {n_min:.3e} below positivity tolerance"
        return None, None

    nsteps = 0
    dt_now = min(params.dt, per)
    record(state, dt_now)
    eps_t = 1e-9 * max(1.0, params.t_end)
    while params.t_end - state.t > eps_t:
        seg_len = min(per, params.t_end - state.t)
        m_left, dt_seg = _segment_plan(state, params, seg_len)
        if dt_seg < params.dt_min:
            why = f"dt collapsed to {dt_seg:.3e}"
            record(state, dt_seg, why)
            return RunResult("blow-up", why, state.t, state, records)
        dt_now = dt_seg
        while m_left > 0:
            if nsteps >= params.max_steps:
                why = "max step budget exhausted"
                record(state, dt_seg, why)
                return RunResult("inconclusive", why, state.t, state, records)
            try:
                state = step(state, dt_seg, params)
            except IntegrationError as err:
                return RunResult("instability", str(err), state.t, state, records)
            nsteps += 1
            m_left -= 1
            if params.nonlinear:
                v, why = fast_exit(from_spectral(state.n))
                if v is not None:
                    record(state, dt_seg, why)
                    return RunResult(v, why, state.t, state, records)
        # segment boundary: fold the phase back onto the lattice
        b = np.pi / params.grid.Ly
        if abs(state.s / b - round(state.s / b)) < 1e-9 and round(state.s / b) != 0:
            state = remap(state, params)
        leak = max(boundary_leak_value(state.n), boundary_leak_value(state.omega))
        if leak > params.leak_threshold:
            why = f"boundary amplitude {leak:.3e}"
            record(state, dt_now, why)
            return RunResult("boundary-leak", why, state.t, state, records)
        record(state, dt_now)
    return RunResult("global-looking", "reached t_end", state.t, state, records)


def write_checkpoint(path: str, state: SimState, params: PhysParams):
    """Binary snapshot: magic, Nx, Ny (i32), Lx, Ly, t, s, A (f64), n then omega."""
    g = params.grid
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<ii", g.Nx, g.Ny))
        fh.write(struct.pack("<ddddd", g.Lx, g.Ly, state.t, state.s, params.A))
        fh.write(np.ascontiguousarray(state.n.coef, dtype="<c16").tobytes())
        fh.write(np.ascontiguousarray(state.omega.coef, dtype="<c16").tobytes())


def read_checkpoint(path: str, grid: Grid = None):
    """Read a checkpoint; returns (SimState without caches, A)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != CHECKPOINT_MAGIC:
            raise ValueError(f"{path}: not a checkpoint file (bad magic {magic!r})")
        Nx, Ny = struct.unpack("<ii", fh.read(8))
        Lx, Ly, t, s, A = struct.unpack("<ddddd", fh.read(40))
        if abs(Lx - 2 * np.pi) > 1e-12:
            raise ValueError(f"{path}: unexpected x-period {Lx}")
        g = grid if grid is not None else make_grid(Nx, Ny, Ly)
        if (g.Nx, g.Ny) != (Nx, Ny) or abs(g.Ly - Ly) > 1e-12:
            raise ValueError(f"{path}: grid mismatch with requested grid")
        count = Nx * Ny
        n = np.frombuffer(fh.read(16 * count), dtype="<c16").reshape(Nx, Ny)
        w = np.frombuffer(fh.read(16 * count), dtype="<c16").reshape(Nx, Ny)
    n_field = SpectralField(g, n.copy(), s)
    w_field = SpectralField(g, w.copy(), s)
    return SimState(t=t, s=s, n=n_field, omega=w_field), A
