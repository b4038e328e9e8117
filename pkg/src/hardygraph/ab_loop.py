"""Sharp Hardy constant of a halfline-with-loop graph under a flux.

The graph is a unit circle (angle ``theta`` in [0, 2pi]) joined at one
vertex to the halfline ``[1, inf)``.  A vector potential ``a`` on the
circle with non-integer flux ``alpha`` produces a Hardy inequality whose
sharp constant ``lambda_star(alpha)`` is the unique root in
``(0, alpha^2)`` of the transcendental matching equation

    cos(2 pi alpha) = cos(2 pi s) - ((1 - sqrt(1 - 4 s^2)) / (4 s)) sin(2 pi s),

with ``s = sqrt(lambda)``; it extends to an even, 1-periodic function of
the flux.  The generalized ground state is explicit: a two-exponential
complex profile on the circle and the power ``r^beta`` on the halfline;
all of its derived constants (current, inverse-density integral, slack
coefficient) have closed forms that are cross-checked against
quadrature here.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

__all__ = [
    "h_function",
    "lambda_star",
    "FluxSpec",
    "LoopGroundState",
    "loop_ground_state",
    "inverse_density_integral",
    "hardy_slack_coefficient",
    "LoopGrid",
    "make_loop_grid",
    "circle_magnetic_form",
    "line_form",
    "loop_form",
    "loop_psi_norm",
    "gsr_loop_residual",
    "circle_flux_inequality_check",
    "twisted_split",
    "TwistedParts",
    "antisymmetric_bound_check",
]

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# the transcendental equation
# ---------------------------------------------------------------------------


def h_function(lam: float, alpha: float) -> float:
    """h(lam) - cos(2 pi alpha) where h is the matching function.

    Defined on (0, 1/4]; h(0+) = 1 and h(1/4) = -1, and h is strictly
    convex in between.  Below 1e-8 the raw formula loses digits in
    ``1 - sqrt(1 - 4 lam)``, so a short series is used there.
    """
    if not 0.0 <= lam <= 0.25:
        raise ValueError(f"matching function defined on (0, 1/4], got {lam}")
    s = math.sqrt(lam)
    if lam < 1e-8:
        frac = 0.5 * s * (1.0 + lam + 2.0 * lam**2 + 5.0 * lam**3)
    else:
        frac = (1.0 - math.sqrt(1.0 - 4.0 * lam)) / (4.0 * s)
    return math.cos(TWO_PI * s) - frac * math.sin(TWO_PI * s) - math.cos(TWO_PI * alpha)


def reduce_flux(alpha: float) -> float:
    """Even 1-periodic reduction of a flux to [0, 1/2]."""
    a = abs(alpha) % 1.0
    return min(a, 1.0 - a)


def lambda_star(alpha: float, tol: float = 1e-13) -> float:
    """Sharp loop-graph Hardy constant for flux alpha.

    Zero at integer flux; otherwise the unique root of the matching
    equation strictly inside ``(0, abar^2)`` with ``abar`` the reduced
    flux.  Bisection is used: the sign data at both ends of the bracket
    is guaranteed (positive at 0+, negative at abar^2), which stays
    robust as the interval collapses for small flux.  At abar = 1/2 the
    right endpoint 1/4 is itself a root of the equation, so the bracket
    is pulled just inside to isolate the interior root.
    """
    a = reduce_flux(alpha)
    if a == 0.0:
        return 0.0
    target_neg = min(a * a, 0.25)
    if h_function(target_neg, a) >= 0.0:
        # only at abar = 1/2, where h(1/4) - cos(pi) rounds to ~0
        target_neg = 0.25 * (1.0 - 1e-9)
    lo, hi = 0.0, target_neg
    # f(0+) = 1 - cos(2 pi a) > 0, f(hi) < 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if h_function(mid, a) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# vector potentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FluxSpec:
    """Vector potential on the circle, sampled on a closed uniform grid.

    ``values[k] = a(2 pi k / n)`` for ``k = 0..n`` (first and last node
    coincide on the circle).  The flux is the trapezoid integral of the
    samples divided by 2 pi, which is exactly the integral of the
    piecewise-linear interpolant; midpoint values generated from the
    interpolant telescope to the same flux, which is what makes the
    discrete gauge reduction of the assembled operators exact.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 3:
            raise ValueError("need samples on a closed grid with at least 3 nodes")
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, alpha: float, n: int = 256) -> "FluxSpec":
        return cls(np.full(n + 1, float(alpha)))

    @classmethod
    def from_function(cls, a, n: int = 4096) -> "FluxSpec":
        theta = np.linspace(0.0, TWO_PI, n + 1)
        return cls(np.asarray(a(theta), dtype=float))

    @property
    def n(self) -> int:
        return self.values.size - 1

    @property
    def alpha(self) -> float:
        """Flux: trapezoid integral of the samples over 2 pi."""
        v = self.values
        return float(np.mean(0.5 * (v[:-1] + v[1:])))

    def midpoint_values(self, m: int) -> np.ndarray:
        """Interpolated values at the m cell midpoints of a closed grid."""
        if m == self.n:
            return 0.5 * (self.values[:-1] + self.values[1:])
        theta = np.linspace(0.0, TWO_PI, self.n + 1)
        mids = (np.arange(m) + 0.5) * (TWO_PI / m)
        return np.interp(mids, theta, self.values)


# ---------------------------------------------------------------------------
# the generalized ground state
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LoopGroundState:
    """Explicit ground state of the loop graph at flux alpha in (0, 1/2].

    Circle part: ``omega1 = A e^{i theta (alpha+mu)} + (1-A) e^{i theta (alpha-mu)}``
    with ``mu = sqrt(lambda_star)``; halfline part ``omega2(r) = r^beta``.
    Normalized to 1 at the vertex.  ``j`` is the (constant) probability
    current on the circle and ``B`` the offset of the real closed form of
    ``|omega1|^2``.
    """

    alpha: float
    mu: float
    A: complex
    beta: float
    j: float
    B: float

    @property
    def lam(self) -> float:
        """The sharp constant lambda_star(alpha)."""
        return self.mu**2

    def omega1(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self.A * np.exp(1j * theta * (self.alpha + self.mu)) + (1.0 - self.A) * np.exp(
            1j * theta * (self.alpha - self.mu)
        )

    def omega1_prime(self, theta):
        theta = np.asarray(theta, dtype=float)
        return 1j * (self.alpha + self.mu) * self.A * np.exp(
            1j * theta * (self.alpha + self.mu)
        ) + 1j * (self.alpha - self.mu) * (1.0 - self.A) * np.exp(1j * theta * (self.alpha - self.mu))

    def omega1_sq(self, theta):
        """|omega1|^2 from the real closed form (independent of the A-form)."""
        theta = np.asarray(theta, dtype=float)
        a, mu = self.alpha, self.mu
        fac = 2.0 * math.sin(math.pi * (a - mu)) * math.sin(math.pi * (a + mu)) / math.sin(TWO_PI * mu) ** 2
        return fac * (self.B - np.cos(2.0 * mu * (theta - math.pi)))

    def omega2(self, r):
        return np.asarray(r, dtype=float) ** self.beta

    def omega2_prime(self, r):
        return self.beta * np.asarray(r, dtype=float) ** (self.beta - 1.0)

    def current(self, theta):
        """Pointwise Re conj(omega1) (-i d/dtheta - alpha) omega1; constant = j."""
        w = self.omega1(theta)
        dw = self.omega1_prime(theta)
        return np.real(np.conj(w) * (-1j * dw - self.alpha * w))

    def matching_residual(self) -> float:
        """|omega1'(0) - omega1'(2 pi) + omega2'(1)|; zero at the true lambda_star."""
        d0 = complex(self.omega1_prime(0.0))
        d1 = complex(self.omega1_prime(TWO_PI))
        return abs(d0 - d1 + self.beta)


def loop_ground_state(alpha: float, tol: float = 1e-12) -> LoopGroundState:
    """Construct the explicit ground state; validates the vertex matching.

    The flux must lie in (0, 1/2] after reduction.  The derivative
    matching at the vertex is the equation defining lambda_star, so its
    residual measures the solver tolerance; it must come out below
    10 * tol or the solver tolerance is declared insufficient.
    """
    a = reduce_flux(alpha)
    if not 0.0 < a <= 0.5:
        raise ValueError(f"flux reduces to {a}; the ground state needs a non-integer flux")
    lam = lambda_star(a, tol=min(tol, 1e-13) / 10.0)
    mu = math.sqrt(lam)
    A = (cmath.exp(-2j * math.pi * a) - cmath.exp(-2j * math.pi * mu)) / (2j * math.sin(TWO_PI * mu))
    beta = (1.0 - math.sqrt(1.0 - 4.0 * lam)) / 2.0
    j = -mu * math.sin(TWO_PI * a) / math.sin(TWO_PI * mu)
    sm, sp = math.sin(math.pi * (a - mu)), math.sin(math.pi * (a + mu))
    B = (sm**2 + sp**2) / (2.0 * sm * sp)
    gs = LoopGroundState(a, mu, A, beta, j, B)
    if gs.matching_residual() > 10.0 * tol:
        raise RuntimeError(
            f"vertex matching residual {gs.matching_residual():.3e} exceeds 10*tol; "
            "root solver tolerance insufficient"
        )
    return gs


def inverse_density_integral(gs: LoopGroundState, cross_check: bool = True, rtol: float = 1e-8) -> float:
    """Closed form of the circle integral of 1 / |omega1|^2.

    Diverges at flux exactly 1/2 (the ground state vanishes at theta =
    pi), which is a domain error.  When ``cross_check`` is set, adaptive
    quadrature of the explicit ``|omega1|^2`` profile must agree with the
    closed form to ``rtol``.
    """
    a, mu = gs.alpha, gs.mu
    if a >= 0.5:
        raise ValueError("integral diverges at flux 1/2: the ground state has a zero")
    closed = TWO_PI * a * math.sin(TWO_PI * mu) / (mu * math.sin(TWO_PI * a))
    if cross_check:
        val, _ = quad(
            lambda th: 1.0 / float(gs.omega1_sq(th)),
            0.0,
            TWO_PI,
            points=[math.pi],
            limit=400,
            epsabs=0.0,
            epsrel=min(rtol * 1e-2, 1e-10),
        )
        if abs(val - closed) > rtol * abs(closed):
            raise RuntimeError(
                f"quadrature {val!r} disagrees with closed form {closed!r} beyond rtol={rtol}"
            )
    return closed


def hardy_slack_coefficient(alpha: float) -> float:
    """1 - (|j|/pi) * integral of 1/|omega1|^2, computed from the parts.

    The trig factors cancel analytically and the value equals 1 - 2*alpha
    on (0, 1/2); the function computes the parts so that tests can assert
    the cancellation.
    """
    a = reduce_flux(alpha)
    if not 0.0 < a < 0.5:
        raise ValueError("slack coefficient needs reduced flux strictly inside (0, 1/2)")
    gs = loop_ground_state(a)
    return 1.0 - abs(gs.j) / math.pi * inverse_density_integral(gs, cross_check=False)


# ---------------------------------------------------------------------------
# grid functions on the loop graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LoopGrid:
    """Closed circle grid [0, 2pi] and halfline grid [1, T]."""

    theta: np.ndarray
    r: np.ndarray

    @property
    def h_circle(self) -> float:
        return float(self.theta[1] - self.theta[0])

    @property
    def h_line(self) -> float:
        return float(self.r[1] - self.r[0])


def make_loop_grid(T: float, h_circle: float, h_line: float) -> LoopGrid:
    n_c = max(8, round(TWO_PI / h_circle))
    n_l = max(4, round((T - 1.0) / h_line))
    return LoopGrid(np.linspace(0.0, TWO_PI, n_c + 1), np.linspace(1.0, T, n_l + 1))


def circle_magnetic_form(theta: np.ndarray, u1: np.ndarray, alpha: float) -> float:
    """Midpoint discretization of the circle integral of |-i u' - alpha u|^2."""
    h = theta[1] - theta[0]
    du = np.diff(u1) / h
    um = 0.5 * (u1[:-1] + u1[1:])
    return float(np.sum(np.abs(-1j * du - alpha * um) ** 2) * h)


def line_form(r: np.ndarray, u2: np.ndarray) -> float:
    h = r[1] - r[0]
    return float(np.sum(np.abs(np.diff(u2) / h) ** 2) * h)


def loop_form(grid: LoopGrid, u1: np.ndarray, u2: np.ndarray, alpha: float) -> float:
    """Quadratic form of the magnetic loop operator for a grid function."""
    return circle_magnetic_form(grid.theta, u1, alpha) + line_form(grid.r, u2)


def loop_psi_norm(grid: LoopGrid, u1: np.ndarray, u2: np.ndarray) -> float:
    """Weighted norm: unit weight on the circle, inverse-square on the line."""
    hc, hl = grid.h_circle, grid.h_line
    um = 0.5 * (u1[:-1] + u1[1:])
    rm = 0.5 * (grid.r[:-1] + grid.r[1:])
    vm = 0.5 * (u2[:-1] + u2[1:])
    return float(np.sum(np.abs(um) ** 2) * hc + np.sum(np.abs(vm) ** 2 / rm**2) * hl)


def gsr_loop_residual(gs: LoopGroundState, grid: LoopGrid, v1: np.ndarray, v2: np.ndarray) -> float:
    """Defect of the magnetic substitution identity for u = omega * v.

    For smooth v (with the loop continuity at the vertex and compact
    support of the halfline part) the shifted form of u equals the
    omega-weighted Dirichlet integral of v plus the current twist term:

        h[u] - lam int psi |u|^2 = int |omega|^2 |v'|^2 + 2 j Im int conj(v1) v1'.

    All four integrals use the same midpoint rule, so the absolute defect
    decays at second order in the grid steps.
    """
    th, r = grid.theta, grid.r
    hc, hl = grid.h_circle, grid.h_line
    u1 = gs.omega1(th) * v1
    u2 = gs.omega2(r) * v2
    lhs = loop_form(grid, u1, u2, gs.alpha) - gs.lam * loop_psi_norm(grid, u1, u2)

    thm = 0.5 * (th[:-1] + th[1:])
    rm = 0.5 * (r[:-1] + r[1:])
    dv1 = np.diff(v1) / hc
    dv2 = np.diff(v2) / hl
    weighted = float(
        np.sum(np.abs(gs.omega1(thm)) ** 2 * np.abs(dv1) ** 2) * hc
        + np.sum(gs.omega2(rm) ** 2 * np.abs(dv2) ** 2) * hl
    )
    v1m = 0.5 * (v1[:-1] + v1[1:])
    twist = 2.0 * gs.j * float(np.imag(np.sum(np.conj(v1m) * dv1) * hc))
    return abs(lhs - (weighted + twist))


def circle_flux_inequality_check(theta: np.ndarray, w_mid: np.ndarray, v: np.ndarray) -> tuple[float, float]:
    """Both sides of the weighted circulation inequality on the circle.

    Returns ``(lhs, rhs)`` with ``lhs`` the w-weighted Dirichlet integral
    of the periodic function v and ``rhs`` the circulation bound
    ``2 pi (int dtheta/w)^{-1} |Im int conj(v) v'|``; the inequality
    ``lhs >= rhs`` holds for every positive weight.
    """
    h = theta[1] - theta[0]
    if np.any(w_mid <= 0):
        raise ValueError("weight must be positive")
    dv = np.diff(v) / h
    vm = 0.5 * (v[:-1] + v[1:])
    lhs = float(np.sum(w_mid * np.abs(dv) ** 2) * h)
    inv = float(np.sum(1.0 / w_mid) * h)
    circ = abs(float(np.imag(np.sum(np.conj(vm) * dv) * h)))
    return lhs, TWO_PI / inv * circ


@dataclass(frozen=True)
class TwistedParts:
    us1: np.ndarray
    us2: np.ndarray
    ua1: np.ndarray
    ua2: np.ndarray


def twisted_split(grid: LoopGrid, u1: np.ndarray, u2: np.ndarray) -> TwistedParts:
    """Twisted symmetric/antisymmetric decomposition at half-integer flux.

    The symmetric part keeps the halfline, the antisymmetric part lives
    on the circle alone and vanishes at both circle endpoints; the two
    parts sum back to u exactly.  The reflection phase is evaluated with
    the angle reduced mod 2 pi so that the endpoint phase is exactly 1.
    """
    th = np.mod(grid.theta, TWO_PI)
    phase = np.exp(1j * th)
    refl = phase * u1[::-1]
    us1 = 0.5 * (u1 + refl)
    ua1 = 0.5 * (u1 - refl)
    return TwistedParts(us1, u2.copy(), ua1, np.zeros_like(u2))


def antisymmetric_bound_check(grid: LoopGrid, ua1: np.ndarray) -> float:
    """Rayleigh ratio of the circle magnetic form at flux 1/2 on the antisymmetric part.

    Requires Dirichlet values at both circle endpoints.  The continuum
    ratio is bounded below by 1/4 (first Dirichlet eigenvalue of the
    gauge-transformed interval), which strictly dominates the sharp loop
    constant at flux 1/2; discretization can undershoot 1/4 only at
    second order in the circle step.
    """
    if abs(ua1[0]) > 1e-12 * (1.0 + np.abs(ua1).max()) or abs(ua1[-1]) > 1e-12 * (
        1.0 + np.abs(ua1).max()
    ):
        raise ValueError("antisymmetric part must vanish at the circle endpoints")
    form = circle_magnetic_form(grid.theta, ua1, 0.5)
    um = 0.5 * (ua1[:-1] + ua1[1:])
    norm = float(np.sum(np.abs(um) ** 2) * grid.h_circle)
    if norm == 0.0:
        return math.inf
    return form / norm
