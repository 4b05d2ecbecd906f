"""1+1D method-of-characteristics laboratory.

A quasilinear hyperbolic system in one space dimension carries each
initial value along a straight characteristic x(t) = phi + lam(u0(phi)) t.
When the propagation speed genuinely varies with the state the
characteristics cross in finite time and the profile steepens into a
shock; when the tracked mode is exceptional the speed is constant along
a simple wave and the characteristic fan never folds.  This module
builds both kinds of object explicitly: exact characteristic pushes, a
first-order finite-volume cross-check, simple-wave integration through
state space, and a side-by-side fan comparison.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .charsys import FieldBackground, scalar_system
from .errors import (
    BadParams,
    CFLViolation,
    GridTooCoarse,
    ModeCollision,
)
from .lagrangians import LagrangianModel
from .rays import crossing_time

MULTIVALUED_TOL = 1e-12
PERIODIC_TOL = 1e-12
MAX_CFL = 0.9


# --- initial data -----------------------------------------------------------------


@dataclass(frozen=True)
class Profile1D:
    """Initial data u0 on a 1D interval, stored as samples plus the
    generating callable when one exists."""

    x: np.ndarray
    u: np.ndarray
    periodic: bool = False
    fn: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        u = np.asarray(self.u, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "u", u)
        if x.ndim != 1 or x.shape != u.shape:
            raise BadParams("profile needs matching 1D x and u arrays")
        if len(x) < 2:
            raise BadParams("profile needs at least two samples")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(u))):
            raise BadParams("profile contains non-finite values")
        if np.any(np.diff(x) <= 0.0):
            raise BadParams("profile grid must be strictly increasing")
        if self.periodic and abs(u[0] - u[-1]) >= PERIODIC_TOL:
            raise BadParams(
                "periodic profile endpoints differ by "
                f"{abs(u[0] - u[-1]):.3e}")

    @classmethod
    def from_callable(cls, fn: Callable, x_lo: float, x_hi: float,
                      n: int = 401, periodic: bool = False) -> "Profile1D":
        x = np.linspace(float(x_lo), float(x_hi), int(n))
        u = np.asarray(fn(x), dtype=float)
        if u.shape != x.shape:
            u = np.array([float(fn(xi)) for xi in x])
        return cls(x=x, u=u, periodic=periodic, fn=fn)

    @classmethod
    def from_samples(cls, x, u, periodic: bool = False) -> "Profile1D":
        return cls(x=np.asarray(x, dtype=float),
                   u=np.asarray(u, dtype=float), periodic=periodic)

    def resample(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Sample n points on the same interval, from the callable when
        available and by linear interpolation otherwise."""
        xs = np.linspace(self.x[0], self.x[-1], int(n))
        if self.fn is not None:
            return xs, np.asarray(self.fn(xs), dtype=float)
        return xs, np.interp(xs, self.x, self.u)


# --- exact characteristic push ------------------------------------------------------


@dataclass(frozen=True)
class MoCSolution:
    """Profile carried along straight characteristics to time t."""

    t: float
    phis: np.ndarray
    x: np.ndarray
    u: np.ndarray
    multivalued: bool


def _speed_samples(speed: Callable, u: np.ndarray) -> np.ndarray:
    lam = np.asarray(speed(u), dtype=float)
    if lam.ndim == 0:
        lam = np.full_like(u, float(lam))
    return lam


def moc_solve(speed: Callable, profile: Profile1D, t: float) -> MoCSolution:
    """Push every profile sample along x = phi + lam(u0(phi)) t.

    The value riding each characteristic is frozen, so the solution at
    time t is exact wherever the pushed positions are still monotone;
    a fold (non-monotone positions) marks the profile as multivalued.
    """
    if t < 0.0:
        raise BadParams("characteristic push needs t >= 0")
    lam = _speed_samples(speed, profile.u)
    x_t = profile.x + lam * t
    multivalued = bool(np.any(np.diff(x_t) < -MULTIVALUED_TOL))
    return MoCSolution(t=float(t), phis=profile.x.copy(), x=x_t,
                       u=profile.u.copy(), multivalued=multivalued)


def shock_time(speed: Callable, profile: Profile1D) -> float | None:
    """First crossing time of straight characteristics,
    t* = -1 / min_phi d[lam(u0(phi))]/dphi over negative slopes.

    Returns None when the speed never decreases along the grid.  Slopes
    are central differences, which is deliberately a different estimator
    from the adjacent-pair intersection used by rays.crossing_time.
    """
    if len(profile.x) < 3:
        raise GridTooCoarse("shock time needs at least 3 samples")
    lam = _speed_samples(speed, profile.u)
    slopes = np.gradient(lam, profile.x)
    worst = float(np.min(slopes))
    if worst >= 0.0:
        return None
    return -1.0 / worst


# --- first-order finite-volume cross-check ------------------------------------------


@dataclass(frozen=True)
class Snapshot:
    t: float
    x: np.ndarray
    u: np.ndarray


def _flux_argmin(flux: Callable[[float], float],
                 lo: float, hi: float) -> float:
    """Ternary-search the minimizer of a convex flux on [lo, hi]."""
    a, b = float(lo), float(hi)
    for _ in range(200):
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        if flux(m1) <= flux(m2):
            b = m2
        else:
            a = m1
    return 0.5 * (a + b)


def upwind_solve(flux: Callable, profile: Profile1D, t: float, nx: int,
                 cfl: float = 0.45,
                 fprime: Callable | None = None) -> Snapshot:
    """Godunov first-order finite-volume solution for a convex flux.

    Serves as an independent cross-check of moc_solve before the shock
    time; afterwards it keeps computing the entropy solution while the
    characteristic push goes multivalued.
    """
    if cfl > MAX_CFL:
        raise CFLViolation(f"cfl={cfl:g} exceeds the stability bound "
                           f"{MAX_CFL:g}")
    if cfl <= 0.0:
        raise BadParams("cfl must be positive")
    if t < 0.0:
        raise BadParams("upwind solve needs t >= 0")
    if nx < 4:
        raise BadParams("upwind solve needs nx >= 4")

    x_lo, x_hi = float(profile.x[0]), float(profile.x[-1])
    dx = (x_hi - x_lo) / nx
    centers = x_lo + dx * (np.arange(nx) + 0.5)
    if profile.fn is not None:
        u = np.asarray(profile.fn(centers), dtype=float)
    else:
        u = np.interp(centers, profile.x, profile.u)

    if fprime is None:
        h = 1e-6

        def fprime(v):
            return (flux(v + h) - flux(v - h)) / (2.0 * h)

    u_star = _flux_argmin(flux, float(np.min(u)) - 1.0,
                          float(np.max(u)) + 1.0)
    f = np.vectorize(flux, otypes=[float])

    def godunov(u_left: np.ndarray, u_right: np.ndarray) -> np.ndarray:
        lo = np.minimum(u_left, u_right)
        hi = np.maximum(u_left, u_right)
        f_min = f(np.clip(u_star, lo, hi))
        f_max = np.maximum(f(u_left), f(u_right))
        return np.where(u_left <= u_right, f_min, f_max)

    elapsed = 0.0
    while elapsed < t:
        speeds = np.abs(np.asarray([fprime(v) for v in
                                    (float(np.min(u)), float(np.max(u)),
                                     u_star)]))
        s_max = float(np.max(speeds))
        if s_max == 0.0:
            break
        dt = min(cfl * dx / s_max, t - elapsed)
        if profile.periodic:
            u_ext = np.concatenate([[u[-1]], u, [u[0]]])
        else:
            u_ext = np.concatenate([[u[0]], u, [u[-1]]])
        fluxes = godunov(u_ext[:-1], u_ext[1:])
        u = u - (dt / dx) * (fluxes[1:] - fluxes[:-1])
        elapsed += dt
    return Snapshot(t=float(t), x=centers, u=u)


def moc_upwind_l1(sol: MoCSolution, snap: Snapshot) -> float:
    """Integral of |moc - upwind| over the common interval, with the
    single-valued characteristic solution interpolated onto the
    finite-volume centers."""
    if sol.multivalued:
        raise BadParams("L1 comparison needs a single-valued push")
    u_moc = np.interp(snap.x, sol.x, sol.u)
    dx = snap.x[1] - snap.x[0]
    return float(np.sum(np.abs(u_moc - snap.u)) * dx)


# --- simple waves through state space -----------------------------------------------


@dataclass(frozen=True)
class ReducedSystem:
    """Eigen-data of a small quasilinear system at one state."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    right: np.ndarray


def _reduced_from_matrix(M: np.ndarray) -> ReducedSystem:
    M = np.asarray(M, dtype=float)
    w, V = np.linalg.eig(M)
    order = np.lexsort((w.imag, w.real))
    w = w[order]
    V = V[:, order]
    if np.max(np.abs(w.imag)) > 1e-10 * (1.0 + np.max(np.abs(w.real))):
        raise ModeCollision("complex eigenvalues: system is not "
                            "hyperbolic at this state")
    return ReducedSystem(matrix=M, eigenvalues=w.real,
                         right=V.real / np.linalg.norm(V.real, axis=0))


def burgers_factory() -> Callable[[np.ndarray], ReducedSystem]:
    """1x1 system with speed equal to the state itself."""

    def make(U) -> ReducedSystem:
        u = float(np.asarray(U).reshape(1)[0])
        return ReducedSystem(matrix=np.array([[u]]),
                             eigenvalues=np.array([u]),
                             right=np.array([[1.0]]))

    return make


def scalar_reduced_factory(
        model: LagrangianModel) -> Callable[[np.ndarray], ReducedSystem]:
    """1+1 reduction of a scalar-field model: states (A, B) with the
    remaining gradient components zero, which closes on the leading
    2x2 block of the full axis system."""

    def make(U) -> ReducedSystem:
        A, B = (float(v) for v in np.asarray(U, dtype=float).reshape(2))
        bg = FieldBackground.scalar(A, B, 0.0, 0.0)
        full = scalar_system(bg, model, (1.0, 0.0, 0.0))
        return _reduced_from_matrix(full.matrix[:2, :2])

    return make


@dataclass(frozen=True)
class SimpleWave:
    """One-parameter family of states whose tangent follows a single
    right eigenvector; the recorded speed samples tell whether the mode
    is exceptional (constant lam) or genuinely nonlinear."""

    mode: int
    component: int
    phis: np.ndarray
    states: np.ndarray
    lams: np.ndarray
    xi: np.ndarray

    def lam_variation(self) -> float:
        return float(np.max(self.lams) - np.min(self.lams))


def _track_mode(sys: ReducedSystem, r_ref: np.ndarray,
                collision_tol: float = 1e-8) -> tuple[int, np.ndarray]:
    overlaps = np.abs(r_ref @ sys.right)
    j = int(np.argmax(overlaps))
    lam = sys.eigenvalues
    if len(lam) > 1:
        gaps = np.abs(lam - lam[j])
        gaps[j] = np.inf
        scale = 1.0 + float(np.max(np.abs(lam)))
        if float(np.min(gaps)) < collision_tol * scale:
            raise ModeCollision(
                f"eigenvalue gap {float(np.min(gaps)):.3e} below "
                f"{collision_tol * scale:.3e} while tracking a mode")
        runner_up = float(np.partition(overlaps, -2)[-2])
        if runner_up > 0.99 * float(overlaps[j]):
            raise ModeCollision(
                "eigenvectors no longer distinguish the tracked mode "
                f"(overlap ratio {runner_up / overlaps[j]:.4f})")
    r = sys.right[:, j]
    if float(r @ r_ref) < 0.0:
        r = -r
    return j, r


def simple_wave_construct(factory: Callable[[np.ndarray], ReducedSystem],
                          mode: int, phi_range: tuple[float, float],
                          U0, n: int = 201,
                          component: int | None = None) -> SimpleWave:
    """Integrate dU/dphi = xi(phi) R(U) with RK4 from U0 across the
    parameter range, scaling xi so the tracked state component equals
    phi itself (which requires U0 to carry the range start in that
    component).  The component defaults to the largest entry of the
    starting eigenvector.
    """
    U0 = np.asarray(U0, dtype=float).reshape(-1)
    lo, hi = (float(v) for v in phi_range)
    if not hi > lo:
        raise BadParams("phi range must be increasing")
    if n < 3:
        raise GridTooCoarse("simple wave needs at least 3 nodes")

    sys0 = factory(U0)
    if not 0 <= mode < len(sys0.eigenvalues):
        raise BadParams(f"mode index {mode} out of range for a "
                        f"{len(sys0.eigenvalues)}-mode system")
    r0 = sys0.right[:, mode]
    if component is None:
        component = int(np.argmax(np.abs(r0)))
    elif not 0 <= component < len(U0):
        raise BadParams(f"component index {component} out of range")
    if abs(U0[component] - lo) > 1e-12:
        raise BadParams(
            "U0 must start the parameter range in the tracked "
            f"component: U0[{component}]={U0[component]:g} vs lo={lo:g}")

    phis = np.linspace(lo, hi, int(n))
    h = phis[1] - phis[0]

    def rhs(U: np.ndarray, r_ref: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        sysk = factory(U)
        _, r = _track_mode(sysk, r_ref)
        if abs(r[component]) < 1e-12:
            raise BadParams("tracked eigenvector loses its normalizing "
                            "component along the wave")
        return r / r[component], r

    states = np.zeros((len(phis), len(U0)))
    lams = np.zeros(len(phis))
    xis = np.zeros(len(phis))
    states[0] = U0
    r_ref = r0 if r0[component] > 0 else -r0

    U = U0.copy()
    for k in range(len(phis)):
        sysk = factory(U)
        j, r = _track_mode(sysk, r_ref)
        states[k] = U
        lams[k] = sysk.eigenvalues[j]
        xis[k] = 1.0 / r[component]
        r_ref = r
        if k == len(phis) - 1:
            break
        k1, _ = rhs(U, r_ref)
        k2, _ = rhs(U + 0.5 * h * k1, r_ref)
        k3, _ = rhs(U + 0.5 * h * k2, r_ref)
        k4, _ = rhs(U + h * k3, r_ref)
        U = U + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    return SimpleWave(mode=mode, component=component, phis=phis,
                      states=states, lams=lams, xi=xis)


def wave_alignment_sines(wave: SimpleWave,
                         factory: Callable[[np.ndarray], ReducedSystem]
                         ) -> np.ndarray:
    """Sine of the angle between the finite-difference tangent dU/dphi
    and the tracked eigenvector at each interior node.  A five-point
    stencil keeps the tangent estimate well below the alignment
    tolerance even for strongly curved waves."""
    if len(wave.phis) < 5:
        raise GridTooCoarse("alignment check needs at least 5 nodes")
    h = wave.phis[1] - wave.phis[0]
    sines = []
    for k in range(2, len(wave.phis) - 2):
        dU = (wave.states[k - 2] - 8.0 * wave.states[k - 1]
              + 8.0 * wave.states[k + 1] - wave.states[k + 2]) / (12.0 * h)
        norm = np.linalg.norm(dU) + 1e-300
        sysk = factory(wave.states[k])
        j = int(np.argmax(np.abs(dU @ sysk.right)))
        r = sysk.right[:, j]
        # rejection of dU off the eigenvector keeps full precision at
        # small angles, unlike sqrt(1 - cos^2)
        rej = dU - (dU @ r) * r
        sines.append(float(np.linalg.norm(rej) / norm))
    return np.asarray(sines)


# --- characteristic-fan comparison ---------------------------------------------------


@dataclass(frozen=True)
class FluxDemoReport:
    """Side-by-side characteristic fans: a genuinely nonlinear scalar
    law versus a simple wave of the model under test."""

    t_list: tuple[float, ...]
    burgers_phis: np.ndarray
    burgers_lams: np.ndarray
    burgers_x: tuple[np.ndarray, ...]
    burgers_crossing: float | None
    model_name: str
    model_phis: np.ndarray
    model_lams: np.ndarray
    model_x: tuple[np.ndarray, ...]
    model_crossing: float | None
    horizon: float

    def to_dict(self) -> dict:
        return {
            "t_list": list(self.t_list),
            "burgers_crossing": self.burgers_crossing,
            "model": self.model_name,
            "model_crossing": self.model_crossing,
            "model_lam_variation": float(np.max(self.model_lams)
                                         - np.min(self.model_lams)),
            "horizon": self.horizon,
        }


def exceptional_flux_demo(model: LagrangianModel, profile: Profile1D,
                          t_list: Sequence[float], mode: int = 0,
                          phi_range: tuple[float, float] = (0.1, 0.6),
                          A0: float = 0.3, horizon: float = 10.0,
                          n: int = 201) -> FluxDemoReport:
    """Push a Burgers fan from the profile and a simple-wave fan of the
    scalar model, and report when (whether) each fan folds."""
    lam_b = profile.u
    burgers_x = tuple(profile.x + lam_b * float(t) for t in t_list)
    burgers_crossing = crossing_time(lam_b, profile.x, t_max=horizon)

    wave = simple_wave_construct(scalar_reduced_factory(model), mode,
                                 phi_range, np.array([A0, phi_range[0]]),
                                 n=n, component=1)
    model_x = tuple(wave.phis + wave.lams * float(t) for t in t_list)
    model_crossing = crossing_time(wave.lams, wave.phis, t_max=horizon)

    return FluxDemoReport(
        t_list=tuple(float(t) for t in t_list),
        burgers_phis=profile.x.copy(), burgers_lams=lam_b.copy(),
        burgers_x=burgers_x, burgers_crossing=burgers_crossing,
        model_name=model.name, model_phis=wave.phis, model_lams=wave.lams,
        model_x=model_x, model_crossing=model_crossing,
        horizon=float(horizon))


# --- plot-ready exports --------------------------------------------------------------


def write_characteristics_csv(path, phis, lams, x_by_t,
                              t_list) -> None:
    """Columns phi, lam, then one pushed-position column per time."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["phi", "lam"]
                        + [f"x_t{repr(float(t))}" for t in t_list])
        for k in range(len(phis)):
            writer.writerow([repr(float(phis[k])), repr(float(lams[k]))]
                            + [repr(float(x[k])) for x in x_by_t])


def write_snapshot_csv(path, snap: Snapshot) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "u"])
        for xk, uk in zip(snap.x, snap.u):
            writer.writerow([repr(float(xk)), repr(float(uk))])
