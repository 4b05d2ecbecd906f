"""Characteristic rays and discontinuity-amplitude transport.

Rays are integral curves of dx/ds = dH/dp, dp/ds = -dH/dx for a
dispersion function H(x, p); on constant backgrounds H does not depend
on x and the momentum is conserved exactly.  The discontinuity
amplitude of a single mode obeys a scalar Riccati equation
dpi/ds = -m pi - c pi^2 whose quadratic coefficient vanishes exactly
for exceptional modes, which is what keeps their amplitudes bounded.

Everything integrates with fixed-step RK4 for reproducible output.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .charsys import FieldBackground, _cone_coefficients
from .errors import BadUsage, GridTooCoarse, OffShellStart, StepFailure
from .lagrangians import Kind, LagrangianModel

_TINY = 1e-300
DEFAULT_TOL = 1e-9
DEFAULT_STEP = 1e-2
BLOWUP_THRESHOLD = 1e12

_ETA_UP = np.diag([-1.0, 1.0, 1.0, 1.0])


class ConeHamiltonian:
    """Quadratic dispersion H = G^{mu nu} p_mu p_nu with a constant
    coefficient matrix; gradients are analytic."""

    degree = 2

    def __init__(self, G: np.ndarray):
        self.G = np.asarray(G, dtype=float).reshape(4, 4)

    @classmethod
    def metric(cls) -> "ConeHamiltonian":
        return cls(_ETA_UP)

    @classmethod
    def scalar_model(cls, model: LagrangianModel,
                     bg: FieldBackground) -> "ConeHamiltonian":
        jet = model.jet_at(bg.point(Kind.Scalar))
        sigma_up = np.array([-bg.sigma[0], *bg.sigma[1:]])
        return cls(_ETA_UP * jet.fa + np.outer(sigma_up, sigma_up) * jet.faa)

    def value(self, x: np.ndarray, p: np.ndarray) -> float:
        return float(p @ self.G @ p)

    def grad_p(self, x: np.ndarray, p: np.ndarray) -> np.ndarray:
        return 2.0 * (self.G @ p)

    def grad_x(self, x: np.ndarray, p: np.ndarray) -> np.ndarray:
        return np.zeros(4)

    def magnitude(self, x: np.ndarray, p: np.ndarray) -> float:
        """Sum of absolute term magnitudes of H at (x, p); stays O(|p|^2)
        even where the signed terms cancel on the cone."""
        pa = np.abs(p)
        return float(pa @ np.abs(self.G) @ pa)


class QuarticHamiltonian:
    """Full two-invariant dispersion H = K u^2 + u g P + g^2 R on a
    constant (E, B) background, with u = U.U for U^mu = F^{lam mu} p_lam
    and g = p.p.  Gradients in p are analytic:
    du/dp_mu = 2 U_nu F^{mu nu}, dg/dp_mu = 2 p^mu."""

    degree = 4

    def __init__(self, model: LagrangianModel, bg: FieldBackground):
        point = bg.point(model.kind)
        jet = model.jet_at(point)
        self.K, self.P, self.R = _cone_coefficients(jet, point)
        self.F = bg.f_upper()

    def _u_and_g(self, p: np.ndarray) -> tuple[np.ndarray, float, float]:
        U_up = self.F.T @ p
        U_dn = _ETA_UP @ U_up
        return U_dn, float(U_up @ U_dn), float(p @ _ETA_UP @ p)

    def value(self, x: np.ndarray, p: np.ndarray) -> float:
        _, u, g = self._u_and_g(p)
        return self.K * u * u + u * g * self.P + g * g * self.R

    def grad_p(self, x: np.ndarray, p: np.ndarray) -> np.ndarray:
        U_dn, u, g = self._u_and_g(p)
        du = 2.0 * (self.F @ U_dn)
        dg = 2.0 * (_ETA_UP @ p)
        return (2.0 * self.K * u + g * self.P) * du + (
            u * self.P + 2.0 * g * self.R) * dg

    def grad_x(self, x: np.ndarray, p: np.ndarray) -> np.ndarray:
        return np.zeros(4)

    def magnitude(self, x: np.ndarray, p: np.ndarray) -> float:
        """Sum of absolute term magnitudes of H at (x, p).  On-shell the
        signed terms cancel (and for a coincident pair the gradient does
        too), so defect ratios need this as the reference scale."""
        U_up = self.F.T @ p
        u_abs = float(np.abs(U_up) @ np.abs(U_up))
        g_abs = float(np.abs(p) @ np.abs(p))
        return (abs(self.K) * u_abs * u_abs + abs(self.P) * u_abs * g_abs
                + abs(self.R) * g_abs * g_abs)


class CallableHamiltonian:
    """Wrap an arbitrary H(x, p) with central-difference gradients."""

    def __init__(self, fn: Callable[[np.ndarray, np.ndarray], float],
                 step: float = 1e-6, degree: int | None = None):
        self.fn = fn
        self.step = step
        self.degree = degree

    def value(self, x: np.ndarray, p: np.ndarray) -> float:
        return float(self.fn(x, p))

    def _central(self, fn: Callable[[np.ndarray], float],
                 v: np.ndarray) -> np.ndarray:
        out = np.zeros(4)
        for mu in range(4):
            e = np.zeros(4)
            e[mu] = self.step
            out[mu] = (fn(v + e) - fn(v - e)) / (2.0 * self.step)
        return out

    def grad_p(self, x: np.ndarray, p: np.ndarray) -> np.ndarray:
        return self._central(lambda q: self.fn(x, q), p)

    def grad_x(self, x: np.ndarray, p: np.ndarray) -> np.ndarray:
        return self._central(lambda y: self.fn(y, p), x)


@dataclass(frozen=True)
class RayState:
    x: np.ndarray
    p: np.ndarray
    s: float
    H: float


@dataclass(frozen=True)
class RayPath:
    states: list[RayState]
    drift: float
    step: float

    def positions(self) -> np.ndarray:
        return np.array([st.x for st in self.states])

    def momenta(self) -> np.ndarray:
        return np.array([st.p for st in self.states])

    def parameters(self) -> np.ndarray:
        return np.array([st.s for st in self.states])


def trace(H, x0, p0, s_max: float, step: float = DEFAULT_STEP,
          tol: float = DEFAULT_TOL) -> RayPath:
    """Fixed-step RK4 ray from (x0, p0); requires the start on the
    cone and reports the worst |H - H0| drift along the path."""
    x = np.asarray(x0, dtype=float).reshape(4).copy()
    p = np.asarray(p0, dtype=float).reshape(4).copy()
    H0 = H.value(x, p)
    if not np.isfinite(H0) or abs(H0) >= tol:
        raise OffShellStart(
            f"initial dispersion value |H|={abs(H0):.3e} is not below "
            f"tol={tol:.1e}; the start point is off the cone")

    def deriv(xc: np.ndarray, pc: np.ndarray):
        dx = H.grad_p(xc, pc)
        dp = -H.grad_x(xc, pc)
        if not (np.all(np.isfinite(dx)) and np.all(np.isfinite(dp))):
            raise StepFailure("non-finite ray derivative")
        return dx, dp

    n_steps = max(1, int(round(s_max / step)))
    states = [RayState(x=x.copy(), p=p.copy(), s=0.0, H=H0)]
    drift = 0.0
    s = 0.0
    for _ in range(n_steps):
        k1x, k1p = deriv(x, p)
        k2x, k2p = deriv(x + 0.5 * step * k1x, p + 0.5 * step * k1p)
        k3x, k3p = deriv(x + 0.5 * step * k2x, p + 0.5 * step * k2p)
        k4x, k4p = deriv(x + step * k3x, p + step * k3p)
        x = x + (step / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
        p = p + (step / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p)
        s += step
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(p))):
            raise StepFailure(f"non-finite ray state at s={s:.6g}")
        Hk = H.value(x, p)
        drift = max(drift, abs(Hk - H0))
        states.append(RayState(x=x.copy(), p=p.copy(), s=s, H=Hk))
    return RayPath(states=states, drift=drift, step=step)


def euler_defect(H, x, p) -> float:
    """Normalized violation of the p-homogeneity identity
    p . dH/dp = N H; requires the evaluator to declare its degree."""
    if H.degree is None:
        raise BadUsage("Hamiltonian declares no homogeneity degree")
    x = np.zeros(4) if x is None else np.asarray(x, dtype=float).reshape(4)
    p = np.asarray(p, dtype=float).reshape(4)
    gp = H.grad_p(x, p)
    lhs = float(p @ gp)
    rhs = H.degree * H.value(x, p)
    if hasattr(H, "magnitude"):
        scale = H.degree * H.magnitude(x, p)
    else:
        scale = float(np.sum(np.abs(p * gp))) + abs(rhs)
    return abs(lhs - rhs) / (scale + _TINY)


# --- amplitude transport ---------------------------------------------------------


@dataclass(frozen=True)
class TransportState:
    """Single-mode discontinuity amplitude with its linear coefficient
    m and quadratic coefficient c (zero for exceptional modes)."""

    pi0: float
    m: float = 0.0
    c: float = 0.0


@dataclass(frozen=True)
class TransportResult:
    s: np.ndarray
    pi: np.ndarray
    blown_up: bool
    s_star: float | None
    state: TransportState


def transport_amplitude(ts: TransportState, s_max: float,
                        step: float = DEFAULT_STEP,
                        threshold: float = BLOWUP_THRESHOLD) -> TransportResult:
    """Integrate dpi/ds = -m pi - c pi^2 with RK4 and blow-up
    detection.  Blow-up is an outcome, not an error.  When m = 0 the
    detected location is refined by bisecting the closed-form solution
    denominator 1 + c pi0 s, which RK4 alone overshoots."""
    m, c = ts.m, ts.c

    def f(v: float) -> float:
        return -m * v - c * v * v

    n_steps = max(1, int(round(s_max / step)))
    ss = [0.0]
    pis = [ts.pi0]
    blown = False
    s_detect = None
    v = ts.pi0
    s = 0.0
    for _ in range(n_steps):
        k1 = f(v)
        k2 = f(v + 0.5 * step * k1)
        k3 = f(v + 0.5 * step * k2)
        k4 = f(v + step * k3)
        v = v + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        s += step
        ss.append(s)
        pis.append(v)
        if not np.isfinite(v) or abs(v) > threshold:
            blown = True
            s_detect = s
            break

    s_star = None
    if blown:
        s_star = s_detect
        if m == 0.0 and c * ts.pi0 < 0.0:
            # denominator of pi(s) = pi0 / (1 + c pi0 s)
            lo, hi = 0.0, s_detect
            d = lambda t: 1.0 + c * ts.pi0 * t
            if d(hi) < 0.0 < d(lo):
                for _ in range(200):
                    mid = 0.5 * (lo + hi)
                    if d(mid) > 0.0:
                        lo = mid
                    else:
                        hi = mid
                s_star = 0.5 * (lo + hi)
    return TransportResult(s=np.array(ss), pi=np.array(pis),
                           blown_up=blown, s_star=s_star, state=ts)


# --- characteristic crossings -------------------------------------------------------


def crossing_time(lam, phis, t_max: float = np.inf,
                  lam_fn: Callable[[float], float] | None = None
                  ) -> float | None:
    """Earliest positive intersection time of the straight
    characteristics x(t) = phi + lam(phi) t, from adjacent sample
    pairs t = -dphi/dlam; None when no pair converges within t_max.

    With `lam_fn` the slope minimum is refined by ternary search on a
    central-difference derivative around the best sampled pair.
    """
    phis = np.asarray(phis, dtype=float)
    if phis.size < 3:
        raise GridTooCoarse("need at least 3 characteristic samples")
    lam = np.asarray(lam, dtype=float)
    if lam.shape != phis.shape:
        raise GridTooCoarse("speed samples must match the parameter grid")

    dphi = np.diff(phis)
    dlam = np.diff(lam)
    with np.errstate(divide="ignore", invalid="ignore"):
        times = np.where(dlam < 0.0, -dphi / dlam, np.inf)
    best = int(np.argmin(times))
    t_star = float(times[best])
    if not np.isfinite(t_star):
        return None

    if lam_fn is not None:
        h = max(1e-7, 1e-7 * float(np.max(np.abs(phis))))

        def slope(phi: float) -> float:
            return (lam_fn(phi + h) - lam_fn(phi - h)) / (2.0 * h)

        lo = float(phis[max(0, best - 1)])
        hi = float(phis[min(len(phis) - 1, best + 2)])
        for _ in range(200):
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            if slope(m1) < slope(m2):
                hi = m2
            else:
                lo = m1
        s_min = slope(0.5 * (lo + hi))
        if s_min < 0.0:
            t_star = -1.0 / s_min

    return t_star if t_star <= t_max else None


# --- CSV export -----------------------------------------------------------------------


def write_ray_csv(path: str, ray: RayPath) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s", "x0", "x1", "x2", "x3",
                         "p0", "p1", "p2", "p3", "H"])
        for st in ray.states:
            writer.writerow([repr(st.s), *(repr(float(v)) for v in st.x),
                             *(repr(float(v)) for v in st.p), repr(st.H)])


def write_transport_csv(path: str, result: TransportResult) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s", "pi", "blown_up"])
        for s, pi in zip(result.s, result.pi):
            writer.writerow([repr(float(s)), repr(float(pi)),
                             str(result.blown_up).lower()])
