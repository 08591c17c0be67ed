"""Master-equation generators as sparse superoperators.

Vectorization is column-stacking throughout: ``vec(rho)[i + D*j] = rho[i, j]``,
so ``vec(A rho B) = (B^T kron A) vec(rho)``. Every generator built here has
``vec(1)^T L = 0`` (trace preservation) up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .hilbert import Boson, CompositeSpace, DimensionError, embed, number, quadratures

HERM_REL_TOL = 1e-10


class NonHermitianError(ValueError):
    """Hamiltonian fails the hermiticity check."""


class NegativeRateError(ValueError):
    """A Lindblad rate is negative."""


@dataclass(frozen=True)
class LindbladTerm:
    """A jump operator together with its non-negative rate."""

    operator: np.ndarray
    rate: float

    def __post_init__(self) -> None:
        if self.rate < 0:
            raise NegativeRateError(f"rate must be >= 0, got {self.rate}")
        op = np.asarray(self.operator)
        if op.ndim != 2 or op.shape[0] != op.shape[1]:
            raise DimensionError(f"jump operator must be square, got shape {op.shape}")


@dataclass(frozen=True)
class SuperOperator:
    """D^2 x D^2 sparse generator acting on column-stacked density matrices."""

    space: CompositeSpace
    matrix: sp.csr_matrix

    @property
    def dim(self) -> int:
        return self.space.dim

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return devectorize(self.matrix @ vectorize(rho))

    def __add__(self, other: "SuperOperator") -> "SuperOperator":
        if other.space != self.space:
            raise DimensionError("cannot add superoperators on different spaces")
        return SuperOperator(self.space, (self.matrix + other.matrix).tocsr())


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix: v[i + D*j] = rho[i, j]."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {rho.shape}")
    return rho.reshape(-1, order="F")

def devectorize(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vectorize`."""
    v = np.asarray(v)
    d = round(np.sqrt(v.size))
    if d * d != v.size:
        raise DimensionError(f"vector length {v.size} is not a perfect square")
    return v.reshape(d, d, order="F")


def _left(a: np.ndarray) -> sp.csr_matrix:
    """Superoperator of rho -> a @ rho."""
    d = a.shape[0]
    return sp.kron(sp.identity(d, format="csr"), sp.csr_matrix(a), format="csr")


def _right(a: np.ndarray) -> sp.csr_matrix:
    """Superoperator of rho -> rho @ a."""
    d = a.shape[0]
    return sp.kron(sp.csr_matrix(a).T, sp.identity(d, format="csr"), format="csr")


def _commutator(a: np.ndarray) -> sp.csr_matrix:
    return _left(a) - _right(a)


def _anticommutator(a: np.ndarray) -> sp.csr_matrix:
    return _left(a) + _right(a)


def _check_space(op: np.ndarray, space: CompositeSpace) -> np.ndarray:
    op = np.asarray(op, dtype=complex)
    if op.shape != (space.dim, space.dim):
        raise DimensionError(f"operator shape {op.shape} does not match space dim {space.dim}")
    return op


def hamiltonian_superop(h: np.ndarray, space: CompositeSpace) -> SuperOperator:
    """Generator of rho -> -i[h, rho]; h must be hermitian within tolerance."""
    h = _check_space(h, space)
    scale = float(np.abs(h).max(initial=0.0))
    defect = float(np.abs(h - h.conj().T).max(initial=0.0))
    if defect > HERM_REL_TOL * max(scale, 1.0):
        raise NonHermitianError(f"hermiticity defect {defect:.3e} exceeds tolerance")
    return SuperOperator(space, (-1j * _commutator(h)).tocsr())


def dissipator_superop(term: LindbladTerm, space: CompositeSpace) -> SuperOperator:
    """Generator of rho -> rate * (F rho F^+ - {F^+ F, rho}/2) for jump operator F."""
    if term.rate < 0:
        raise NegativeRateError(f"rate must be >= 0, got {term.rate}")
    op = _check_space(term.operator, space)
    f = sp.csr_matrix(op)
    fdf = sp.csr_matrix(op.conj().T @ op)
    d = space.dim
    eye = sp.identity(d, format="csr")
    mat = term.rate * (
        sp.kron(f.conj(), f, format="csr")
        - 0.5 * sp.kron(eye, fdf, format="csr")
        - 0.5 * sp.kron(fdf.T, eye, format="csr")
    )
    return SuperOperator(space, mat.tocsr())


def assemble(h: np.ndarray, terms: list[LindbladTerm], space: CompositeSpace) -> SuperOperator:
    """Full generator: Hamiltonian part plus all dissipators."""
    total = hamiltonian_superop(h, space)
    for term in terms:
        total = total + dissipator_superop(term, space)
    return total


def trace_preservation_defect(gen: SuperOperator) -> float:
    """Norm of vec(1)^T L relative to ||L||_F; zero for a trace-preserving generator."""
    d = gen.dim
    left_vac = vectorize(np.eye(d, dtype=complex)).conj() @ gen.matrix
    scale = sp.linalg.norm(gen.matrix, "fro")
    return float(np.linalg.norm(left_vac)) / max(float(scale), 1e-300)


@dataclass(frozen=True)
class BilinearKernelParams:
    """Coefficients of the general bilinear single-mode Markovian generator.

    ``mu`` multiplies the {x, p}/4 drift added to the Hamiltonian, ``kappa``
    the friction commutators, and ``dx``, ``dp``, ``dz`` the three diffusion
    terms.  Inadmissible coefficient sets are representable on purpose;
    admissibility is a property checked by :func:`check_positivity_condition`.
    """

    mu: float
    kappa: float
    dx: float
    dp: float
    dz: float


def check_positivity_condition(params: BilinearKernelParams) -> tuple[bool, float]:
    """Whether the kernel preserves positivity for every initial state.

    Returns ``(admissible, margin)`` with ``margin = dp*dx - dz^2 - (kappa/4)^2``;
    admissible requires ``dx >= 0``, ``dp >= 0`` and ``margin >= 0``.
    """
    margin = params.dp * params.dx - params.dz**2 - (params.kappa / 4.0) ** 2
    ok = params.dx >= 0.0 and params.dp >= 0.0 and margin >= 0.0
    return ok, float(margin)


def bilinear_kernel_superop(
    params: BilinearKernelParams,
    cutoff: int,
    space: CompositeSpace | None = None,
    mode: int | str = 0,
    h0: np.ndarray | None = None,
) -> SuperOperator:
    """Full bilinear generator: -i[h0 + (mu/4){x,p}, .] plus the kernel terms
    i*kappa/4*([p,{x,.}] - [x,{p,.}]) - dp[x,[x,.]] - dx[p,[p,.]]
    + dz([x,[p,.]] + [p,[x,.]]).

    By default everything lives on a single mode of the given cutoff with
    ``h0 = n``; with dp = dx = kappa(1+2nbar)/4 and mu = dz = 0 the result
    reduces entrywise to the thermally damped cavity.  Passing ``space`` (and
    ``mode``) embeds x and p on one bosonic factor of a joint space, leaving
    the other subsystems untouched by the kernel; ``h0`` then typically
    carries the joint Hamiltonian.
    """
    if space is None:
        space = CompositeSpace((Boson(cutoff, "mode"),))
    idx = space.index(mode) if isinstance(mode, str) else mode
    sub = space.subsystems[idx]
    if not isinstance(sub, Boson) or sub.cutoff != cutoff:
        raise DimensionError(f"subsystem {mode!r} is not a boson with cutoff {cutoff}")
    x1, p1 = quadratures(cutoff)
    x = embed(x1, space, idx)
    p = embed(p1, space, idx)
    if h0 is None:
        h0 = embed(number(cutoff), space, idx)
    h = _check_space(h0, space) + (params.mu / 4.0) * (x @ p + p @ x)
    cx, cp = _commutator(x), _commutator(p)
    ax, ap = _anticommutator(x), _anticommutator(p)
    mat = (
        -1j * _commutator(h)
        + (1j * params.kappa / 4.0) * (cp @ ax - cx @ ap)
        - params.dp * (cx @ cx)
        - params.dx * (cp @ cp)
        + params.dz * (cx @ cp + cp @ cx)
    )
    return SuperOperator(space, mat.tocsr())
