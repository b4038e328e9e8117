"""Finite-element pencils for the tree, halfline and loop forms.

Piecewise-linear conforming elements on grids aligned with every weight
breakpoint: the branching weights are constant per cell, so assembly is
exact in the weight, and conformity makes every discrete eigenvalue an
upper bound for its continuum counterpart (the inequality directions of
all the certified brackets are therefore safe at any resolution).
Dirichlet conditions are imposed by eliminating the boundary degree of
freedom, never by penalties; vertex continuity on trees and at the loop
junction is by shared degrees of freedom, so the flux-balance conditions
emerge from the assembled form itself.

The magnetic circle is discretized with midpoint link phases (the
covariant difference ``|u_{i+1} - e^{i a h} u_i|^2 / h``): the assembled
operator is then exactly unitarily equivalent to the constant-flux one,
which keeps the discrete gauge-invariance checks at machine precision
at finite h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spl

from .ab_loop import TWO_PI, FluxSpec, lambda_star
from .ground_state import lambda_b
from .tree_model import BranchingFunction, RegularTreeSpec, homogeneous_tree
from .weights import (
    ConstantWeight,
    CriterionReport,
    HardyWeight,
    muckenhoupt_constant,
    weighted_muckenhoupt_constant,
)

__all__ = [
    "AssemblyError",
    "DiscretePencil",
    "assemble_halfline",
    "smallest_eigenvalue",
    "lowest_eigenvalues",
    "sturm_count",
    "sturm_smallest",
    "HardyEstimate",
    "hardy_constant_estimate",
    "HomoHardyReport",
    "homo_hardy_check",
    "TreeMesh",
    "assemble_tree",
    "DecompositionReport",
    "decomposition_check",
    "assemble_loop",
    "LoopHardyReport",
    "loop_hardy_estimate",
    "GaugeReport",
    "gauge_invariance_check",
]

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(6)


class AssemblyError(ValueError):
    """Grid/weight misalignment or an inconsistent discretization request."""


@dataclass(frozen=True)
class DiscretePencil:
    """Stiffness/mass pair with grid metadata.

    ``K`` is Hermitian (real symmetric away from the magnetic circle),
    ``M`` Hermitian positive semi-definite; both sparse.  ``tridiagonal``
    marks real tridiagonal pencils, which admit the Sturm bisection
    cross-check.
    """

    K: sp.spmatrix = field(repr=False)
    M: sp.spmatrix = field(repr=False)
    h: float
    bc_left: str = "neumann"
    bc_right: str = "dirichlet"
    label: str = ""
    tridiagonal: bool = False

    @property
    def ndof(self) -> int:
        return self.K.shape[0]


def _cell_weight_values(g, t0: float, T: float, n: int, h: float) -> np.ndarray:
    """Constant branching value per cell; raises on breakpoint misalignment."""
    gm = np.empty(n)
    if g is None:
        gm[:] = 1.0
        return gm
    if isinstance(g, (int, float)):
        gm[:] = float(g)
        return gm
    filled = 0
    for a, b, val in g.pieces(T + 0.5 * h):
        if b <= t0:
            continue
        a_eff = max(a, t0)
        for x in (a_eff, min(b, T)):
            k = (x - t0) / h
            if abs(k - round(k)) > 1e-9:
                raise AssemblyError(
                    f"weight breakpoint at t={x} does not sit on the grid (h={h})"
                )
        i0 = int(round((a_eff - t0) / h))
        i1 = n if b >= T else int(round((b - t0) / h))
        gm[filled:i1] = val
        filled = i1
        if filled >= n:
            break
    if filled < n:
        raise AssemblyError("weight pieces do not cover the requested interval")
    return gm


def _psi_on_grid_check(psi, t0: float, T: float, h: float) -> None:
    if psi is None or isinstance(psi, (int, float)):
        return
    for x in psi.breakpoints():
        if t0 < x < T:
            k = (x - t0) / h
            if abs(k - round(k)) > 1e-9:
                raise AssemblyError(
                    f"Hardy-weight breakpoint at t={x} does not sit on the grid (h={h})"
                )


def _psi_eval(psi, t: np.ndarray) -> np.ndarray:
    if psi is None:
        return np.ones_like(t)
    if isinstance(psi, (int, float)):
        return np.full_like(t, float(psi))
    return np.asarray(psi(t), dtype=float)


def assemble_halfline(
    g,
    psi,
    T: float,
    h: float,
    bc_left: str = "neumann",
    bc_right: str = "dirichlet",
    t0: float = 0.0,
) -> DiscretePencil:
    """P1 pencil for ``int |f'|^2 g`` against ``int |f|^2 psi g`` on [t0, T].

    ``g`` is a branching function (or scalar); the grid must contain every
    breakpoint of ``g`` and ``psi``.  Stiffness cells are exact; the mass
    uses per-cell 6-point Gauss, exact for polynomial weights and at
    quadrature-noise level for the power family.
    """
    if bc_right != "dirichlet":
        raise AssemblyError("the truncation end is always Dirichlet")
    if bc_left not in ("neumann", "dirichlet"):
        raise AssemblyError(f"unknown left boundary condition {bc_left!r}")
    n = round((T - t0) / h)
    if n < 2 or abs(n * h - (T - t0)) > 1e-9:
        raise AssemblyError(f"step h={h} does not tile [{t0}, {T}]")
    _psi_on_grid_check(psi, t0, T, h)
    x = t0 + h * np.arange(n + 1)
    gm = _cell_weight_values(g, t0, T, n, h)

    k = gm / h
    mainK = np.zeros(n + 1)
    mainK[:-1] += k
    mainK[1:] += k
    offK = -k

    tq = 0.5 * (x[:-1] + x[1:])[:, None] + 0.5 * h * _GAUSS_X[None, :]
    wq = 0.5 * h * _GAUSS_W[None, :] * gm[:, None]
    psiq = _psi_eval(psi, tq)
    lam_left = (x[1:, None] - tq) / h  # hat centred on the left node
    lam_right = (tq - x[:-1, None]) / h
    mLL = np.sum(wq * psiq * lam_left**2, axis=1)
    mRR = np.sum(wq * psiq * lam_right**2, axis=1)
    mLR = np.sum(wq * psiq * lam_left * lam_right, axis=1)
    mainM = np.zeros(n + 1)
    mainM[:-1] += mLL
    mainM[1:] += mRR
    offM = mLR

    keep = slice(1 if bc_left == "dirichlet" else 0, n)
    K = sp.diags([offK, mainK, offK], [-1, 0, 1], format="csc")[keep, keep]
    M = sp.diags([offM, mainM, offM], [-1, 0, 1], format="csc")[keep, keep]
    return DiscretePencil(K, M, h, bc_left, bc_right, label=f"halfline[{t0},{T}]", tridiagonal=True)


# ---------------------------------------------------------------------------
# eigenvalue solvers
# ---------------------------------------------------------------------------


class ConvergenceError(RuntimeError):
    pass


def _factor(K, M, sigma):
    """LU of K - sigma*M, perturbing the shift if the factorization degenerates."""
    for attempt in range(6):
        try:
            lu = spl.splu((K - sigma * M).tocsc())
            if np.isfinite(lu.U.diagonal()).all() and np.abs(lu.U.diagonal()).min() > 0:
                return lu, sigma
        except RuntimeError:
            pass
        sigma = sigma - (1e-10 + abs(sigma)) * 10.0 ** (attempt - 6)
    raise ConvergenceError("could not factorize the shifted pencil")


def smallest_eigenvalue(pencil: DiscretePencil, tol: float = 1e-10, max_iter: int = 400) -> float:
    """Smallest generalized eigenvalue by shifted inverse iteration.

    A direct sparse factorization drives the iteration; the shift is
    pulled toward the Rayleigh quotient once the estimate settles, which
    restores fast convergence when the low eigenvalues cluster.  Relative
    accuracy ``tol``.
    """
    K, M = pencil.K.tocsc(), pencil.M.tocsc()
    n = K.shape[0]
    if n == 1:
        return float(np.real(K[0, 0] / M[0, 0]))
    rng = np.random.default_rng(12345)
    x = rng.standard_normal(n)
    if np.iscomplexobj(K.data):
        x = x + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    sigma = 0.0
    lu, sigma = _factor(K, M, sigma)
    rho_prev = None
    stall = 0
    for it in range(max_iter):
        y = lu.solve(M @ x)
        ny = np.linalg.norm(y)
        if not np.isfinite(ny) or ny == 0.0:
            lu, sigma = _factor(K, M, sigma - 1e-8)
            continue
        x = y / ny
        num = float(np.real(np.vdot(x, K @ x)))
        den = float(np.real(np.vdot(x, M @ x)))
        if den <= 0:
            continue
        rho = num / den
        if rho_prev is not None:
            if abs(rho - rho_prev) <= tol * max(abs(rho), 1e-300):
                return rho
            # near convergence the iterate is dominated by the lowest mode,
            # so re-centring the shift there is safe and finishes cubically
            if stall == 0 and abs(rho - rho_prev) <= 1e3 * tol * max(abs(rho), 1.0):
                lu, sigma = _factor(K, M, rho - max(1e-8 * abs(rho), 1e-14))
                stall = 1
        rho_prev = rho
    raise ConvergenceError(f"inverse iteration did not reach tol={tol} in {max_iter} steps")


def lowest_eigenvalues(pencil: DiscretePencil, k: int, tol: float = 1e-9) -> np.ndarray:
    """Lowest k generalized eigenvalues (dense for small pencils, else subspace iteration)."""
    K, M = pencil.K.tocsc(), pencil.M.tocsc()
    n = K.shape[0]
    if k > n:
        raise ValueError(f"requested {k} eigenvalues of a pencil with {n} dofs")
    if n <= 2500:
        vals = sla.eigh(
            K.toarray(), M.toarray(), eigvals_only=True, subset_by_index=[0, k - 1]
        )
        return np.asarray(vals)
    m = min(n, k + 3)
    rng = np.random.default_rng(2718)
    X = rng.standard_normal((n, m))
    if np.iscomplexobj(K.data):
        X = X + 1j * rng.standard_normal((n, m))
    lu, sigma = _factor(K, M, 0.0)
    prev = None
    for it in range(500):
        Y = lu.solve(M @ X)
        G = Y.conj().T @ (M @ Y)
        G = 0.5 * (G + G.conj().T)
        L = np.linalg.cholesky(G + np.eye(m) * np.trace(G).real * 1e-16)
        Y = np.linalg.solve(L, Y.conj().T).conj().T
        A = Y.conj().T @ (K @ Y)
        A = 0.5 * (A + A.conj().T)
        vals, vecs = np.linalg.eigh(A)
        X = Y @ vecs
        if prev is not None and np.all(np.abs(vals[:k] - prev[:k]) <= tol * np.maximum(np.abs(vals[:k]), 1e-300)):
            return vals[:k].real
        prev = vals
    raise ConvergenceError("subspace iteration did not converge")


def _tridiag_parts(A: sp.spmatrix) -> tuple[np.ndarray, np.ndarray]:
    d = np.real(A.diagonal())
    e = np.real(A.diagonal(-1))
    return d, e


def sturm_count(pencil: DiscretePencil, x: float) -> int:
    """Number of pencil eigenvalues below x, by LDL inertia of K - x M."""
    if not pencil.tridiagonal:
        raise ValueError("Sturm counting needs a real tridiagonal pencil")
    dK, eK = _tridiag_parts(pencil.K)
    dM, eM = _tridiag_parts(pencil.M)
    count = 0
    d_prev = 0.0
    scale = max(np.max(np.abs(dK)), 1.0)
    for i in range(len(dK)):
        d = dK[i] - x * dM[i]
        if i > 0:
            off = eK[i - 1] - x * eM[i - 1]
            d -= off * off / d_prev
        if d == 0.0:
            d = -1e-300 * scale
        if d < 0:
            count += 1
        d_prev = d
    return count


def sturm_smallest(pencil: DiscretePencil, tol: float = 1e-12) -> float:
    """Smallest eigenvalue of a real tridiagonal pencil by Sturm bisection."""
    lo = 0.0
    if sturm_count(pencil, lo) > 0:
        lo = -1.0
        while sturm_count(pencil, lo) > 0:
            lo *= 4.0
    hi = max(1.0, abs(lo))
    while sturm_count(pencil, hi) < 1:
        hi *= 4.0
        if hi > 1e18:
            raise ConvergenceError("no eigenvalue found below 1e18")
    while hi - lo > tol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if sturm_count(pencil, mid) < 1:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Hardy-constant estimates on trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HardyEstimate:
    """Truncated sharp-constant estimate against the criterion bracket.

    ``C_T = 1/lambda_min`` of the Neumann-root pencil truncated at T.
    ``upper_ok`` asserts ``C_T <= 4M`` (guaranteed for any T by
    conformity); ``lower_ok`` records ``C_T >= M`` which only holds once
    T is large enough to resolve the maximizing scale.
    """

    C_T: float
    lam_min: float
    criterion: CriterionReport
    upper_ok: bool | None
    lower_ok: bool | None


def hardy_constant_estimate(
    tree: RegularTreeSpec, psi: HardyWeight, T: float, h: float, tol: float = 1e-9
) -> HardyEstimate:
    pencil = assemble_halfline(BranchingFunction(tree, 0), psi, T, h)
    lam = smallest_eigenvalue(pencil, tol=tol)
    C_T = 1.0 / lam
    rep = muckenhoupt_constant(tree, psi)
    if rep.divergent:
        return HardyEstimate(C_T, lam, rep, None, None)
    slack = 1e-9 * (1.0 + rep.upper)
    return HardyEstimate(C_T, lam, rep, C_T <= rep.upper + slack, C_T >= rep.lower - slack)


@dataclass(frozen=True)
class HomoHardyReport:
    """Shifted-form positivity and bracket check on a homogeneous tree.

    ``lam_min`` is the smallest eigenvalue of the shifted stiffness
    against the psi-weighted mass (``inf`` when psi vanishes identically,
    in which case only positivity of the shifted form is asserted).
    """

    lam_min: float
    positive: bool
    m_prime: CriterionReport
    lower_ok: bool | None


def homo_hardy_check(b: int, psi: HardyWeight, T: float, h: float) -> HomoHardyReport:
    from .ground_state import ground_state_homogeneous

    tree = homogeneous_tree(b)
    g0 = BranchingFunction(tree, 0)
    base = assemble_halfline(g0, None, T, h)
    mass_psi = assemble_halfline(g0, psi, T, h).M
    Kshift = (base.K - lambda_b(b) * base.M).tocsc()
    shifted = DiscretePencil(Kshift, base.M, h, "neumann", "dirichlet", "shifted", True)

    omega = ground_state_homogeneous(b, max(60, int(math.ceil(T)) + 10))
    m_prime = weighted_muckenhoupt_constant(omega, g0, psi)

    if mass_psi.nnz == 0 or abs(mass_psi).max() == 0.0:
        lam0 = smallest_eigenvalue(shifted, tol=1e-8)
        return HomoHardyReport(math.inf, lam0 >= -1e-8, m_prime, None)

    pencil = DiscretePencil(Kshift, mass_psi, h, "neumann", "dirichlet", "homo", True)
    lam = smallest_eigenvalue(pencil, tol=1e-8)
    positive = lam >= -1e-8
    lower_ok = None
    if not m_prime.divergent and m_prime.value > 0:
        lower_ok = lam >= (1.0 / (4.0 * m_prime.value)) * (1.0 - 2e-2)
    return HomoHardyReport(lam, positive, m_prime, lower_ok)


# ---------------------------------------------------------------------------
# full tree meshes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TreeEdge:
    generation: int  # 1-based
    parent_dof: int
    child_dof: int | None  # None: Dirichlet leaf
    interior: tuple[int, int]  # half-open dof range


@dataclass(frozen=True)
class TreeMesh:
    """Explicit mesh of a truncated regular tree.

    Vertex continuity is encoded by sharing the vertex dof among all
    incident edges; leaves at the truncation depth carry no dof.
    """

    edges: tuple[TreeEdge, ...]
    vertex_dofs: tuple[tuple[int, ...], ...]  # per generation 0..depth-1
    cells_per_edge: tuple[int, ...]  # per generation 1..depth
    ndof: int
    h: float
    depth: int


def assemble_tree(tree: RegularTreeSpec, depth: int, h: float) -> tuple[TreeMesh, DiscretePencil]:
    """Pencil of the free form against the plain norm on the truncated tree.

    Neumann at the root (free dof), Dirichlet at the generation-``depth``
    leaves.  Edge lengths must be multiples of h.
    """
    ts, bs = _tree_generations(tree, depth)
    lengths = [ts[k + 1] - ts[k] for k in range(depth)]
    cells = []
    for L in lengths:
        m = round(L / h)
        if m < 1 or abs(m * h - L) > 1e-9:
            raise AssemblyError(f"edge length {L} is not a multiple of h={h}")
        cells.append(m)

    counts = [1]  # vertices at generation 0..depth-1 that carry dofs
    for k in range(1, depth):
        counts.append(counts[-1] * (1 if k == 1 else bs[k - 2]))

    next_dof = 0
    vertex_dofs: list[tuple[int, ...]] = []
    for c in counts:
        vertex_dofs.append(tuple(range(next_dof, next_dof + c)))
        next_dof += c

    edges: list[TreeEdge] = []
    for k in range(1, depth + 1):
        parents = vertex_dofs[k - 1]
        fanout = 1 if k == 1 else bs[k - 2]
        children = vertex_dofs[k] if k < depth else None
        m = cells[k - 1]
        child_idx = 0
        for p in parents:
            for _ in range(fanout):
                interior = (next_dof, next_dof + m - 1)
                next_dof += m - 1
                child = None if children is None else children[child_idx]
                child_idx += 1
                edges.append(TreeEdge(k, p, child, interior))

    rows, cols, kv, mv = [], [], [], []

    def add(i, j, kval, mval):
        rows.append(i)
        cols.append(j)
        kv.append(kval)
        mv.append(mval)

    for e in edges:
        m = cells[e.generation - 1]
        chain = [e.parent_dof] + list(range(*e.interior)) + [e.child_dof]
        kc, mc = 1.0 / h, h / 6.0
        for a, b in zip(chain, chain[1:]):
            for d in (a, b):
                if d is not None:
                    add(d, d, kc, 2 * mc)
            if a is not None and b is not None:
                add(a, b, -kc, mc)
                add(b, a, -kc, mc)

    K = sp.csc_matrix((kv, (rows, cols)), shape=(next_dof, next_dof))
    M = sp.csc_matrix((mv, (rows, cols)), shape=(next_dof, next_dof))
    mesh = TreeMesh(tuple(edges), tuple(vertex_dofs), tuple(cells), next_dof, h, depth)
    return mesh, DiscretePencil(K, M, h, "neumann", "dirichlet", f"tree depth {depth}")


def _tree_generations(tree: RegularTreeSpec, depth: int) -> tuple[list[float], list[int]]:
    """Vertex distances t_0..t_depth and branchings b_1..b_depth."""
    ts, bs = [0.0], []
    gens = list(tree.generations)
    pattern = tree.tail_pattern()
    i = 0
    while len(bs) < depth:
        if i < len(gens):
            l, b = gens[i]
        elif pattern is not None:
            l, b = pattern[(i - len(gens)) % len(pattern)]
        else:
            raise AssemblyError(f"tree has no generation {i + 1} and no tail rule")
        ts.append(ts[-1] + l)
        bs.append(b)
        i += 1
    return ts, bs


@dataclass(frozen=True)
class DecompositionReport:
    tree_eigs: np.ndarray
    halfline_eigs: np.ndarray
    multiplicities: tuple[int, ...]
    max_rel_diff: float
    dof_identity: bool


def decomposition_check(b: int, depth: int, h: float, n_eigs: int) -> DecompositionReport:
    """Spectral multiset identity between the tree and its halfline parts.

    The truncated tree pencil (Dirichlet leaves) is compared with the
    union of the weighted halfline pencils: the symmetric one on
    ``(0, depth)`` with a free root, and for each generation ``k >= 1``
    the Dirichlet one on ``(k, depth)`` with weight ``g_k``, counted
    ``b^(k-1) (b-1)`` times.  Both sides are brute-force eigensolves of
    independently assembled matrices.
    """
    tree = homogeneous_tree(b)
    mesh, pencil = assemble_tree(tree, depth, h)
    tree_eigs = lowest_eigenvalues(pencil, n_eigs)

    parts: list[np.ndarray] = []
    mults: list[int] = []
    a0 = assemble_halfline(BranchingFunction(tree, 0), None, float(depth), h)
    n0 = min(n_eigs, a0.ndof)
    parts.append(lowest_eigenvalues(a0, n0))
    mults.append(1)
    dof_total = a0.ndof
    for k in range(1, depth):
        ak = assemble_halfline(
            BranchingFunction(tree, k), None, float(depth), h, bc_left="dirichlet", t0=float(k)
        )
        mult = b ** (k - 1) * (b - 1)
        nk = min(n_eigs, ak.ndof)
        ek = lowest_eigenvalues(ak, nk)
        parts.extend([ek] * mult)
        mults.append(mult)
        dof_total += mult * ak.ndof

    union = np.sort(np.concatenate(parts))[:n_eigs]
    rel = np.max(np.abs(union - tree_eigs) / np.maximum(np.abs(tree_eigs), 1e-12))
    return DecompositionReport(tree_eigs, union, tuple(mults), float(rel), dof_total == mesh.ndof)


# ---------------------------------------------------------------------------
# the magnetic loop graph
# ---------------------------------------------------------------------------


def assemble_loop(a, T: float, h_circle: float, h_line: float) -> DiscretePencil:
    """Hermitian pencil of the magnetic loop form against the Hardy mass.

    ``a`` is a flux specification (or a bare constant).  Circle links
    carry midpoint phase factors; the mass uses unit weight on the circle
    and the inverse-square weight on the halfline (per-cell Gauss, which
    is cancellation-free even at large radii).  The vertex is one shared
    dof; the far end of the halfline is Dirichlet.
    """
    if isinstance(a, (int, float)):
        a = FluxSpec.constant(float(a))
    n_c = max(8, round(TWO_PI / h_circle))
    h_c = TWO_PI / n_c
    n_l = max(4, round((T - 1.0) / h_line))
    h_l = (T - 1.0) / n_l
    N = (n_c - 1) + (n_l - 1) + 1
    V = N - 1

    def cdof(i):
        return V if i % n_c == 0 else i - 1

    def ldof(j):
        if j == 0:
            return V
        return None if j == n_l else (n_c - 1) + (j - 1)

    rows, cols, kv, mv = [], [], [], []

    def add(i, j, kval, mval):
        rows.append(i)
        cols.append(j)
        kv.append(kval)
        mv.append(mval)

    phases = np.exp(-1j * a.midpoint_values(n_c) * h_c)
    kc, mc = 1.0 / h_c, h_c / 6.0
    for i in range(n_c):
        d0, d1 = cdof(i), cdof(i + 1)
        ph = complex(phases[i])
        add(d0, d0, kc, 2 * mc)
        add(d1, d1, kc, 2 * mc)
        off_k, off_m = -kc * ph, mc * ph
        add(d0, d1, off_k, off_m)
        add(d1, d0, off_k.conjugate(), off_m.conjugate())

    r = 1.0 + h_l * np.arange(n_l + 1)
    tq = 0.5 * (r[:-1] + r[1:])[:, None] + 0.5 * h_l * _GAUSS_X[None, :]
    wq = 0.5 * h_l * _GAUSS_W[None, :] / tq**2
    lam_left = (r[1:, None] - tq) / h_l
    lam_right = (tq - r[:-1, None]) / h_l
    mLL = np.sum(wq * lam_left**2, axis=1)
    mRR = np.sum(wq * lam_right**2, axis=1)
    mLR = np.sum(wq * lam_left * lam_right, axis=1)
    kl = 1.0 / h_l
    for j in range(n_l):
        d0, d1 = ldof(j), ldof(j + 1)
        add(d0, d0, kl, mLL[j])
        if d1 is not None:
            add(d1, d1, kl, mRR[j])
            add(d0, d1, -kl, mLR[j])
            add(d1, d0, -kl, mLR[j])

    K = sp.csc_matrix((np.asarray(kv, dtype=complex), (rows, cols)), shape=(N, N))
    M = sp.csc_matrix((np.asarray(mv, dtype=complex), (rows, cols)), shape=(N, N))
    return DiscretePencil(K, M, h_line, "vertex", "dirichlet", f"loop T={T}")


@dataclass(frozen=True)
class LoopHardyReport:
    lam_min: float
    lam_star: float
    ok: bool  # lam_min >= lam_star - tolerance (the inequality direction)


def loop_hardy_estimate(alpha: float, T: float, h: float, tol: float = 1e-4) -> LoopHardyReport:
    """Smallest loop-pencil eigenvalue against the sharp constant.

    Conformity puts the discrete value above the continuum truncated one,
    which in turn is above the sharp constant; the report flags a
    violation of ``lam_min >= lambda_star - tol``, which would contradict
    the inequality itself.  Convergence from above as T grows is the
    sharpness diagnostic.
    """
    pencil = assemble_loop(alpha, T, h, h)
    lam = smallest_eigenvalue(pencil, tol=1e-10)
    ls = lambda_star(alpha)
    return LoopHardyReport(lam, ls, lam >= ls - tol)


@dataclass(frozen=True)
class GaugeReport:
    eigs_a: np.ndarray
    eigs_const: np.ndarray
    eigs_reflected: np.ndarray
    max_rel_const: float
    max_rel_reflected: float


def gauge_invariance_check(a: FluxSpec, T: float, h: float, n_eigs: int = 5) -> GaugeReport:
    """Spectra of a general potential vs its constant-flux and sign-flipped forms.

    The discrete phases telescope to the exact flux, so the three
    assembled operators are exactly unitarily (resp. anti-unitarily)
    equivalent and the spectra agree to solver precision.
    """
    e_a = lowest_eigenvalues(assemble_loop(a, T, h, h), n_eigs)
    e_c = lowest_eigenvalues(assemble_loop(FluxSpec(np.full(a.n + 1, a.alpha)), T, h, h), n_eigs)
    e_r = lowest_eigenvalues(assemble_loop(FluxSpec(-a.values), T, h, h), n_eigs)
    rel_c = float(np.max(np.abs(e_a - e_c) / np.maximum(np.abs(e_a), 1e-300)))
    rel_r = float(np.max(np.abs(e_a - e_r) / np.maximum(np.abs(e_a), 1e-300)))
    return GaugeReport(e_a, e_c, e_r, rel_c, rel_r)
