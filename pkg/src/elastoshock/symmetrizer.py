"""Dissipative symmetrizer for the second-order pressure problem.

The wave equation for the pressure perturbation is rewritten as a symmetric
system for ``W = (L1 grad p, L2 grad p, L3 grad p)`` whose coefficient
matrices are generated by one symmetric 6x6 matrix ``H``. The boundary
conditions become ``V_I = G V_II`` and choosing ``H`` from the Lyapunov
equation ``G^T H + H G = -G0`` makes the boundary form equal ``G0``-positive.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    AsymmetricInput,
    IllConditioned,
    InvalidInput,
    NumericalInconsistency,
    SingularBlock,
    SpectrumNotStable,
)
from .states import DerivedScales

POSITIVITY_THRESHOLD = 1e-10

# V = T W with W = (W1, W2, W3), V = (V1, V2, V3, V4), 3-vectors throughout
T_MAT = np.kron(
    np.array([[1.0, 0.0, -1.0], [0.0, -1.0, 0.0], [0.0, -1.0, 0.0], [1.0, 0.0, 1.0]])
    / np.sqrt(2.0),
    np.eye(3),
)
_P0 = np.eye(2)
_P1 = np.array([[0.0, -1.0], [-1.0, 0.0]])
_P2 = np.array([[-1.0, 0.0], [0.0, 1.0]])


class BoundaryMatrices(NamedTuple):
    A_mat: np.ndarray
    B_mat: np.ndarray
    C_mat: np.ndarray
    G: np.ndarray
    eigenvalues: np.ndarray


def build_G(scales: DerivedScales, alpha=2.0, cond_max=1e12) -> BoundaryMatrices:
    """Boundary blocks and the 6x6 matrix ``G`` with ``V_I = G V_II``.

    ``alpha > 1`` is the free constant of the first block row; it only moves
    the two eigenvalues that are roots of ``x^2 + 2 alpha x + 1``.
    """
    if not alpha > 1:
        raise InvalidInput(f"alpha must exceed 1, got {alpha}")
    M, a1, a2 = scales.M, scales.a1, scales.a2
    b2 = scales.beta**2
    A = np.array([[1.0, alpha, 0.0], [0.0, 0.0, 0.0], [0.0, 1.0, M * a2]])
    B = np.array(
        [
            [-alpha, -1.0, 0.0],
            [0.0, 0.0, -1.0],
            [0.0, -M * scales.d0_tilde, -scales.M_star * a2],
        ]
    )
    C = np.array([[0.0, 0.0, -1.0], [0.0, 1.0, 0.0], [0.0, 0.0, -M * a1 / b2]])
    AmC = A - C
    if np.linalg.cond(AmC) > cond_max:
        raise SingularBlock("A - C is numerically singular")
    G1 = 2.0 * np.linalg.solve(AmC, B)
    G2 = np.linalg.solve(AmC, A + C)
    G = np.block([[G1, -G2], [np.eye(3), np.zeros((3, 3))]])
    return BoundaryMatrices(A, B, C, G, np.linalg.eigvals(G))


class LyapunovSolution(NamedTuple):
    H: np.ndarray
    residual: float
    symmetry_defect: float
    min_eigenvalue: float

    @property
    def positive(self):
        return self.min_eigenvalue > POSITIVITY_THRESHOLD


def _lyapunov_operator(G):
    n = G.shape[0]
    eye = np.eye(n)
    # row-major vec: vec(G^T H) = (G^T kron I) vec(H), vec(H G) = (I kron G^T) vec(H)
    return np.kron(G.T, eye) + np.kron(eye, G.T)


def solve_lyapunov(G, G0=None, rtol=1e-10) -> LyapunovSolution:
    """Solve ``G^T H + H G = -G0`` as a dense linear system in ``n*n`` unknowns.

    One step of iterative refinement is applied. The returned ``H`` is the
    symmetric part of the computed solution; ``symmetry_defect`` measures what
    was removed, relative to ``|H|``.

    Raises
    ------
    SpectrumNotStable
        If an eigenvalue of ``G`` has non-negative real part.
    IllConditioned
        If the relative residual stays above ``rtol``.
    """
    G = np.asarray(G, dtype=float)
    n = G.shape[0]
    G0 = np.eye(n) if G0 is None else np.asarray(G0, dtype=float)
    if G.shape != (n, n) or G0.shape != (n, n):
        raise InvalidInput("G and G0 must be square and of equal size")
    if not np.allclose(G0, G0.T, rtol=0, atol=1e-12 * max(1.0, np.abs(G0).max())):
        raise AsymmetricInput("G0 must be symmetric")
    if np.linalg.eigvalsh(G0).min() <= 0:
        raise InvalidInput("G0 must be positive definite")
    ev = np.linalg.eigvals(G)
    if ev.real.max() >= 0:
        raise SpectrumNotStable(f"G has an eigenvalue with Re >= 0 (max Re = {ev.real.max():.3e})")

    L = _lyapunov_operator(G)
    rhs = -G0.reshape(-1)
    h = np.linalg.solve(L, rhs)
    h += np.linalg.solve(L, rhs - L @ h)
    H = h.reshape(n, n)
    norm_H = np.linalg.norm(H)
    defect = np.linalg.norm(H - H.T) / norm_H
    H = 0.5 * (H + H.T)
    residual = np.linalg.norm(G.T @ H + H @ G + G0) / np.linalg.norm(G0)
    if residual > rtol:
        raise IllConditioned(f"Lyapunov residual {residual:.3e} exceeds {rtol:.1e}")
    return LyapunovSolution(H, float(residual), float(defect), float(np.linalg.eigvalsh(H).min()))


class SymmetrizerBlocks(NamedTuple):
    K: np.ndarray
    L: np.ndarray
    M: np.ndarray
    N: np.ndarray
    B0: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    B0_tilde: Optional[np.ndarray]
    B2_tilde: Optional[np.ndarray]


def split_blocks(H):
    H1, H2, H3 = H[:3, :3], H[:3, 3:], H[3:, 3:]
    K = 0.5 * (H1 + H3)
    M = 0.5 * (H3 - H1)
    L = -0.5 * (H2 + H2.T)
    N = 0.5 * (H2.T - H2)
    return K, L, M, N


def block_forms(K, L, M, N):
    """B0, B1, B2 from their 3x3 block displays."""
    B0 = np.block([[K, L, M], [L, K, N], [M, -N, K]])
    B1 = np.block([[L, K, N], [K, L, M], [-N, M, -L]])
    B2 = np.block([[M, -N, K], [N, -M, L], [K, L, M]])
    return B0, B1, B2


def factored_forms(H):
    """B0, B1, B2 as ``T^T (P kron H) T``."""
    return tuple(T_MAT.T @ np.kron(P, H) @ T_MAT for P in (_P0, _P1, _P2))


def assemble_symmetrizer(H, scales: Optional[DerivedScales] = None, atol=1e-12,
                         sym_tol=1e-10) -> SymmetrizerBlocks:
    """Split ``H`` into K, L, M, N and build the symmetrizer matrices.

    The matrices are built both from the block displays and from the
    Kronecker factorization; the two must agree to ``atol * max(1, |H|)``.
    With ``scales`` given, the time and tangential coefficient matrices of the
    system in the original derivatives are returned as well.
    """
    H = np.asarray(H, dtype=float)
    if H.shape != (6, 6):
        raise InvalidInput("H must be 6x6")
    scale = max(1.0, float(np.abs(H).max()))
    if np.abs(H - H.T).max() > sym_tol * scale:
        raise AsymmetricInput("H is not symmetric")
    K, L, M, N = split_blocks(H)
    direct = block_forms(K, L, M, N)
    factored = factored_forms(H)
    gap = max(float(np.abs(d - f).max()) for d, f in zip(direct, factored))
    if gap > atol * scale:
        raise NumericalInconsistency(f"block and factored symmetrizer forms differ by {gap:.3e}")
    B0, B1, B2 = direct
    B0t = B2t = None
    if scales is not None:
        Mn, b, Ms, s, l0 = scales.M, scales.beta, scales.M_star, scales.sigma, scales.ell0
        B0t = (Mn / b**2) * (Ms * B0 + Mn * B1)
        B2t = s / (b * Ms) * B2 + Mn * l0 / (b**2 * Ms) * B0 + l0 / b**2 * B1
    return SymmetrizerBlocks(K, L, M, N, B0, B1, B2, B0t, B2t)


@dataclass(frozen=True)
class SymmetrizerBundle:
    A_mat: np.ndarray
    B_mat: np.ndarray
    C_mat: np.ndarray
    G: np.ndarray
    G0: np.ndarray
    H: np.ndarray
    K_b: np.ndarray
    L_b: np.ndarray
    M_b: np.ndarray
    N_b: np.ndarray
    B0: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    B0_tilde: np.ndarray
    T_mat: np.ndarray
    g_eigenvalues: np.ndarray
    lyapunov_residual: float
    symmetry_defect: float
    h_min_eigenvalue: float
    b0_tilde_min_eigenvalue: float
    alpha: float

    @property
    def h_positive(self):
        return self.h_min_eigenvalue > POSITIVITY_THRESHOLD

    @property
    def b0_tilde_positive(self):
        return self.b0_tilde_min_eigenvalue > POSITIVITY_THRESHOLD

    def certificate(self):
        def status(x):
            if x > POSITIVITY_THRESHOLD:
                return "positive"
            return "indeterminate" if x > -POSITIVITY_THRESHOLD else "not_positive"

        return {
            "g_max_real_part": float(self.g_eigenvalues.real.max()),
            "lyapunov_residual": self.lyapunov_residual,
            "symmetry_defect": self.symmetry_defect,
            "h_min_eigenvalue": self.h_min_eigenvalue,
            "h_positive": status(self.h_min_eigenvalue),
            "b0_tilde_min_eigenvalue": self.b0_tilde_min_eigenvalue,
            "b0_tilde_positive": status(self.b0_tilde_min_eigenvalue),
        }

    def to_dict(self):
        mats = ("A_mat", "B_mat", "C_mat", "G", "G0", "H", "K_b", "L_b", "M_b", "N_b",
                "B0", "B1", "B2", "B0_tilde", "T_mat")
        out = {name: getattr(self, name).tolist() for name in mats}
        out["g_eigenvalues"] = [[z.real, z.imag] for z in self.g_eigenvalues]
        out["alpha"] = self.alpha
        out["certificate"] = self.certificate()
        return out


def build_symmetrizer(scales: DerivedScales, alpha=2.0, G0=None) -> SymmetrizerBundle:
    """Boundary matrices, Lyapunov solve and block assembly in one call."""
    bm = build_G(scales, alpha)
    G0 = np.eye(6) if G0 is None else np.asarray(G0, dtype=float)
    sol = solve_lyapunov(bm.G, G0)
    blocks = assemble_symmetrizer(sol.H, scales)
    return SymmetrizerBundle(
        A_mat=bm.A_mat, B_mat=bm.B_mat, C_mat=bm.C_mat, G=bm.G, G0=G0, H=sol.H,
        K_b=blocks.K, L_b=blocks.L, M_b=blocks.M, N_b=blocks.N,
        B0=blocks.B0, B1=blocks.B1, B2=blocks.B2, B0_tilde=blocks.B0_tilde,
        T_mat=T_MAT.copy(), g_eigenvalues=bm.eigenvalues,
        lyapunov_residual=sol.residual, symmetry_defect=sol.symmetry_defect,
        h_min_eigenvalue=sol.min_eigenvalue,
        b0_tilde_min_eigenvalue=float(np.linalg.eigvalsh(blocks.B0_tilde).min()),
        alpha=float(alpha),
    )


class ProbeResult(NamedTuple):
    minimum: float
    identity_defect: float
    samples: int


def dissipativity_probe(bundle: SymmetrizerBundle, samples=1000, seed=0) -> ProbeResult:
    """Minimum of the boundary quadratic form over random boundary data.

    For each random ``V_II`` the boundary relation gives ``V_I = G V_II``, the
    symmetrizer unknowns are recovered as ``W = T^T V`` and ``B1 W . W`` is
    divided by ``|V_II|^2``. ``identity_defect`` is the largest relative gap
    between ``B1 W . W`` and ``G0 V_II . V_II``.
    """
    rng = np.random.default_rng(seed)
    V2 = rng.standard_normal((samples, 6))
    V1 = V2 @ bundle.G.T
    V = np.hstack([V1, V2])
    W = V @ T_MAT  # rows are (T^T V)^T
    q = np.einsum("ij,jk,ik->i", W, bundle.B1, W)
    g = np.einsum("ij,jk,ik->i", V2, bundle.G0, V2)
    norms = np.einsum("ij,ij->i", V2, V2)
    defect = np.abs(q - g) / np.maximum(np.abs(g), np.finfo(float).tiny)
    return ProbeResult(float((q / norms).min()), float(defect.max()), samples)
