"""Spectral bottom and generalized ground state of homogeneous trees.

On a homogeneous tree with branching number ``b`` and unit edges the
bottom of the Neumann spectrum is

    lambda_b = arccos(1/R_b)^2,   R_b = (sqrt(b) + 1/sqrt(b)) / 2,

and the positive generalized ground state ``omega`` on the halfline
satisfies the free equation ``-omega'' = lambda_b omega`` inside each
edge together with continuity and the derivative scaling
``omega'(j-) = b * omega'(j+)`` at the integer vertices, starting from
``omega(0) = 1``, ``omega'(0) = 0``.

The propagation is done in the scaled variables ``b^(j/2) * (omega,
omega')`` which grow only linearly at ``lambda_b`` (the bare solution
decays like ``b^(-j/2)`` and would underflow over long horizons); the
combined quantity ``sqrt(g_0) * omega`` is therefore available with
uniform relative accuracy and is the natural object for the linear
growth envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "lambda_b",
    "PiecewiseTrig",
    "ground_state_homogeneous",
    "positivity_bisection",
    "efgrowth_envelope",
    "gsr_residual",
]


def lambda_b(b: int) -> float:
    """Bottom of the Neumann spectrum of the homogeneous tree with branching b."""
    if b < 2:
        raise ValueError(f"branching number must be >= 2, got {b}")
    R = (math.sqrt(b) + 1.0 / math.sqrt(b)) / 2.0
    return math.acos(1.0 / R) ** 2


def _propagate_scaled(b: int, lam: float, n_edges: int) -> np.ndarray:
    """Scaled coefficients (A_j, B_j) with sqrt(g0)*omega = A_j cos + B_j sin on edge j."""
    mu = math.sqrt(lam)
    c, s = math.cos(mu), math.sin(mu)
    rb = math.sqrt(b)
    coeffs = np.empty((n_edges, 2))
    A, B = 1.0, 0.0
    for j in range(n_edges):
        coeffs[j, 0] = A
        coeffs[j, 1] = B
        # edge evolution to tau = 1, then the vertex derivative scaling 1/b
        val = A * c + B * s
        der = -A * s + B * c  # omega' / mu in scaled variables
        A = rb * val
        B = der / rb
    return coeffs


@dataclass(frozen=True)
class PiecewiseTrig:
    """Per-edge trig representation of the halfline ground state.

    On edge ``j`` (unit length), with ``tau = t - j``:

        sqrt(b^j) * omega(t) = A_j cos(mu tau) + B_j sin(mu tau)

    where ``mu = sqrt(lam)``.  ``scaled`` holds the rows ``(A_j, B_j)``.
    """

    lam: float
    b: int
    scaled: np.ndarray = field(repr=False)

    @property
    def mu(self) -> float:
        return math.sqrt(self.lam)

    @property
    def horizon(self) -> int:
        """Number of edges computed."""
        return self.scaled.shape[0]

    def _edges(self, t, convention: str):
        t = np.asarray(t, dtype=float)
        if convention == "floor":
            j = np.clip(np.floor(t).astype(int), 0, self.horizon - 1)
        else:  # right-closed pieces (t_k, t_{k+1}]: t = j+1 belongs to edge j
            j = np.clip(np.ceil(t).astype(int) - 1, 0, self.horizon - 1)
        return j, t - j

    def sqrtg_omega(self, t):
        """sqrt(g_0(t)) * omega(t), stable for every horizon.

        Uses the right-closed convention of g_0, so integer points take
        the value of the incoming edge.
        """
        j, tau = self._edges(t, "ceil")
        A = self.scaled[j, 0]
        B = self.scaled[j, 1]
        return A * np.cos(self.mu * tau) + B * np.sin(self.mu * tau)

    def value(self, t):
        """omega(t); may underflow to subnormals for very large t * log(b)."""
        j, tau = self._edges(t, "floor")
        A = self.scaled[j, 0]
        B = self.scaled[j, 1]
        core = A * np.cos(self.mu * tau) + B * np.sin(self.mu * tau)
        return core * float(self.b) ** (-j / 2.0)

    def derivative(self, t):
        """omega'(t) in edge interiors (floor convention at vertices)."""
        j, tau = self._edges(t, "floor")
        A = self.scaled[j, 0]
        B = self.scaled[j, 1]
        core = -A * np.sin(self.mu * tau) + B * np.cos(self.mu * tau)
        return self.mu * core * float(self.b) ** (-j / 2.0)

    def second_derivative(self, t):
        """Analytic omega'' from the trig coefficients (equals -lam * omega)."""
        j, tau = self._edges(t, "floor")
        A = self.scaled[j, 0]
        B = self.scaled[j, 1]
        core = A * np.cos(self.mu * tau) + B * np.sin(self.mu * tau)
        return -self.lam * core * float(self.b) ** (-j / 2.0)

    def vertex_left_derivative(self, j: int) -> float:
        """omega'(j-) from edge j-1 evaluated at tau = 1."""
        if not 1 <= j <= self.horizon:
            raise ValueError("vertex index out of range")
        A, B = self.scaled[j - 1]
        core = -A * math.sin(self.mu) + B * math.cos(self.mu)
        return self.mu * core * float(self.b) ** (-(j - 1) / 2.0)

    def vertex_right_derivative(self, j: int) -> float:
        """omega'(j+) from edge j at tau = 0."""
        if not 0 <= j <= self.horizon - 1:
            raise ValueError("vertex index out of range")
        B = self.scaled[j, 1]
        return self.mu * B * float(self.b) ** (-j / 2.0)

    def vertex_left_value(self, j: int) -> float:
        A, B = self.scaled[j - 1]
        core = A * math.cos(self.mu) + B * math.sin(self.mu)
        return core * float(self.b) ** (-(j - 1) / 2.0)

    def vertex_right_value(self, j: int) -> float:
        return self.scaled[j, 0] * float(self.b) ** (-j / 2.0)


def ground_state_homogeneous(b: int, J: int) -> PiecewiseTrig:
    """Propagate the ground state across J unit edges at energy lambda_b.

    Raises if the propagated solution fails to stay positive, which would
    mean the spectral-bottom value is wrong; positivity of the true
    ground state is what pins lambda_b.
    """
    if b < 2 or J < 1:
        raise ValueError("need b >= 2 and J >= 1")
    lam = lambda_b(b)
    coeffs = _propagate_scaled(b, lam, J)
    gs = PiecewiseTrig(lam, b, coeffs)
    # endpoint positivity suffices: mu < pi, so an edge cannot contain two zeros
    ends = gs.sqrtg_omega(np.arange(1, J + 1, dtype=float))
    if coeffs[0, 0] <= 0 or np.any(ends <= 0):
        raise RuntimeError("ground state lost positivity; spectral bottom inconsistent")
    return gs


def positivity_bisection(b: int, J: int = 4000, tol: float = 1e-9) -> float:
    """Largest energy whose propagated solution stays positive over J edges.

    Independent oracle for the closed-form spectral bottom: above it the
    solution oscillates and changes sign within the horizon, below it
    stays positive.  The propagation renormalizes every edge (signs are
    all that matter), so arbitrarily long horizons are safe.
    """
    rb = math.sqrt(b)

    def positive(lam: float) -> bool:
        mu = math.sqrt(lam)
        c, s = math.cos(mu), math.sin(mu)
        A, B = 1.0, 0.0
        for _ in range(J):
            val = A * c + B * s
            if val <= 0.0:
                return False
            A, B = rb * val, (-A * s + B * c) / rb
            m = max(abs(A), abs(B))
            A, B = A / m, B / m
        return True

    lo, hi = 0.0, 2.5  # at 2.5 the very first edge already goes negative
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if positive(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def efgrowth_envelope(
    omega: PiecewiseTrig, samples_per_edge: int = 64, start_edge: int = 0
) -> tuple[float, float]:
    """Observed envelope constants of sqrt(g_0(t)) * omega(t) / (1+t).

    Returns ``(C1_obs, C2_obs)``, the inf and sup of the ratio over a
    per-edge sample grid on ``[start_edge, horizon]``.  Both are finite
    and positive for a correct ground state and stabilize as the horizon
    grows; the constants themselves are not known in closed form, so
    callers should treat them as measured.
    """
    J = omega.horizon
    taus = np.linspace(0.0, 1.0, samples_per_edge, endpoint=False)[1:]
    ts = [np.array([0.0])] if start_edge == 0 else []
    for j in range(start_edge, J):
        ts.append(j + taus)
        ts.append(np.array([float(j + 1)]))
    t = np.concatenate(ts)
    ratio = omega.sqrtg_omega(t) / (1.0 + t)
    c1, c2 = float(np.min(ratio)), float(np.max(ratio))
    if c1 <= 0:
        raise RuntimeError("growth envelope hit zero; ground state is wrong")
    return c1, c2


def gsr_residual(b: int, phi: np.ndarray, h: float, T: float) -> float:
    """Defect of the ground-state substitution identity on a grid.

    For ``f = omega * phi`` with ``phi`` compactly supported in (0, T),
    the shifted energy integral of f equals the omega-weighted Dirichlet
    integral of phi:

        int (|f'|^2 - lambda_b |f|^2) g_0 dt  =  int |omega phi'|^2 g_0 dt.

    Both sides are discretized with a composite midpoint rule whose cells
    never straddle a g_0 breakpoint (1/h must be an integer), so the
    returned absolute defect decays at second order in h.
    """
    n = round(T / h)
    if abs(n * h - T) > 1e-9 or abs(round(1.0 / h) * h - 1.0) > 1e-9:
        raise ValueError("grid must align integer breakpoints: need integer 1/h and T/h")
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (n + 1,):
        raise ValueError(f"phi must have {n + 1} nodes for T={T}, h={h}")
    gs = ground_state_homogeneous(b, int(math.ceil(T)))
    lam = gs.lam
    t = np.linspace(0.0, T, n + 1)
    tm = 0.5 * (t[:-1] + t[1:])
    g_mid = float(b) ** np.floor(tm)
    f = gs.value(t) * phi
    df = np.diff(f) / h
    f_mid = 0.5 * (f[:-1] + f[1:])
    lhs = float(np.sum(h * g_mid * (df**2 - lam * f_mid**2)))
    dphi = np.diff(phi) / h
    rhs = float(np.sum(h * g_mid * (gs.value(tm) * dphi) ** 2))
    return abs(lhs - rhs)
