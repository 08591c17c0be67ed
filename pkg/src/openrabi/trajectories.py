"""Monte Carlo quantum-jump unraveling of the master equation.

Between jumps the state evolves under the non-hermitian drift
``H_eff = H - (i/2) sum_k rate_k F_k^+ F_k`` without renormalization; a jump
fires when the squared norm crosses a uniform random threshold, the channel
is drawn proportionally to ``rate_k <F_k^+ F_k>``, and the state is
renormalized.  Averaging projector/number observables over trajectories
reproduces the master-equation solution.

Intended for validation at moderate times on small spaces; asymptotics are
the steady-state solver's job.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .hilbert import CompositeSpace, DimensionError
from .liouville import LindbladTerm, SuperOperator
from .steady import StepSizeUnderflowError

_BISECT_FRACTION = 1e-3   # jump-time tolerance as a fraction of the step size

Seed = int | np.random.SeedSequence


@dataclass(frozen=True)
class Unraveling:
    """Non-hermitian drift plus scaled jump operators sqrt(rate)*F."""

    space: CompositeSpace
    h_eff: np.ndarray
    jumps: tuple[np.ndarray, ...]


def unravel(h: np.ndarray, terms: list[LindbladTerm], space: CompositeSpace) -> Unraveling:
    h = np.asarray(h, dtype=complex)
    if h.shape != (space.dim, space.dim):
        raise DimensionError(f"Hamiltonian shape {h.shape} does not match dim {space.dim}")
    h_eff = h.copy()
    jumps = []
    for term in terms:
        op = np.asarray(term.operator, dtype=complex)
        if op.shape != h.shape:
            raise DimensionError("jump operator shape does not match the Hamiltonian")
        h_eff -= 0.5j * term.rate * (op.conj().T @ op)
        jumps.append(np.sqrt(term.rate) * op)
    return Unraveling(space, h_eff, tuple(jumps))


def recombine(unr: Unraveling) -> SuperOperator:
    """Generator reassembled from drift and jumps; equals the Lindblad assembly."""
    d = unr.space.dim
    eye = sp.identity(d, format="csr")
    he = sp.csr_matrix(unr.h_eff)
    mat = -1j * (sp.kron(eye, he, format="csr") - sp.kron(he.conj(), eye, format="csr"))
    for j in unr.jumps:
        js = sp.csr_matrix(j)
        mat = mat + sp.kron(js.conj(), js, format="csr")
    return SuperOperator(unr.space, mat.tocsr())


class _Propagator:
    """exp(-i H_eff t) through the eigendecomposition, with an expm fallback."""

    def __init__(self, h_eff: np.ndarray):
        self._h = h_eff
        w, v = la.eig(h_eff)
        try:
            vinv = la.inv(v)
            ok = np.abs(v @ np.diag(w) @ vinv - h_eff).max() <= 1e-10 * max(
                np.abs(h_eff).max(), 1.0
            )
        except la.LinAlgError:
            ok = False
        self._eig = (w, v, vinv) if ok else None

    def apply(self, psi: np.ndarray, t: float) -> np.ndarray:
        if self._eig is not None:
            w, v, vinv = self._eig
            return v @ (np.exp(-1j * w * t) * (vinv @ psi))
        return la.expm(-1j * self._h * t) @ psi


@dataclass
class TrajectoryRecord:
    seed: Seed
    times: np.ndarray                       # sample grid, multiples of dt
    observables: np.ndarray                 # shape (n_operators, n_times)
    jump_times: list[float] = field(default_factory=list)
    jump_channels: list[int] = field(default_factory=list)


def _expectations(psi: np.ndarray, operators: tuple[np.ndarray, ...]) -> np.ndarray:
    norm_sq = float(np.vdot(psi, psi).real)
    return np.array([float(np.vdot(psi, op @ psi).real) / norm_sq for op in operators])


def run_trajectory(
    unr: Unraveling,
    psi0: np.ndarray,
    t_max: float,
    dt: float,
    seed: Seed,
    operators: tuple[np.ndarray, ...] = (),
) -> TrajectoryRecord:
    """One stochastic pure-state trajectory, deterministic for a fixed seed."""
    psi0 = np.asarray(psi0, dtype=complex)
    norm0 = np.linalg.norm(psi0)
    if abs(norm0 - 1.0) > 1e-10:
        raise ValueError(f"psi0 must be normalized, got norm {norm0}")
    if dt <= 0 or t_max < 0:
        raise ValueError("need dt > 0 and t_max >= 0")

    seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    rng = np.random.Generator(np.random.PCG64(seq))
    prop = _Propagator(unr.h_eff)
    weights = [j.conj().T @ j for j in unr.jumps]
    n_steps = int(round(t_max / dt))
    times = np.arange(n_steps + 1) * dt
    record = TrajectoryRecord(
        seed=seed, times=times, observables=np.empty((len(operators), n_steps + 1))
    )
    record.observables[:, 0] = _expectations(psi0, operators)

    psi = psi0.copy()
    threshold = rng.random()
    tol = dt * _BISECT_FRACTION
    for k in range(1, n_steps + 1):
        remaining = dt
        elapsed = times[k - 1]
        while True:
            trial = prop.apply(psi, remaining)
            if float(np.vdot(trial, trial).real) > threshold:
                psi = trial
                break
            if not unr.jumps:
                raise StepSizeUnderflowError("norm decayed but the unraveling has no jumps")
            # bisect the crossing of ||psi(tau)||^2 = threshold in (0, remaining];
            # the squared norm is monotone non-increasing between jumps
            lo, hi = 0.0, remaining
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                mid_psi = prop.apply(psi, mid)
                if float(np.vdot(mid_psi, mid_psi).real) > threshold:
                    lo = mid
                else:
                    hi = mid
            tau = 0.5 * (lo + hi)
            at_jump = prop.apply(psi, tau)
            probs = np.array([float(np.vdot(at_jump, w @ at_jump).real) for w in weights])
            total = probs.sum()
            if total <= 0:
                raise StepSizeUnderflowError("norm decayed with no open jump channel")
            channel = int(rng.choice(len(probs), p=probs / total))
            jumped = unr.jumps[channel] @ at_jump
            psi = jumped / np.linalg.norm(jumped)
            record.jump_times.append(elapsed + tau)
            record.jump_channels.append(channel)
            threshold = rng.random()
            elapsed += tau
            remaining -= tau
            if remaining <= 0:
                break
        record.observables[:, k] = _expectations(psi, operators)
    return record


@dataclass
class EnsembleResult:
    times: np.ndarray
    mean: np.ndarray     # shape (n_operators, n_times)
    stderr: np.ndarray   # same shape; sample standard error of the mean
    n_traj: int


def trajectory_seed(base_seed: int, index: int) -> np.random.SeedSequence:
    """Seed of trajectory ``index``: SeedSequence(base_seed) with spawn key (index,).

    The counter scheme makes results independent of execution order.
    """
    return np.random.SeedSequence(entropy=base_seed, spawn_key=(index,))


def ensemble_average(
    unr: Unraveling,
    psi0: np.ndarray,
    t_grid: np.ndarray,
    n_traj: int,
    base_seed: int,
    operators: tuple[np.ndarray, ...],
) -> EnsembleResult:
    """Trajectory-averaged observables with per-time standard errors.

    ``t_grid`` must be uniform and start at zero; its spacing is the stepping
    interval of the underlying trajectories.
    """
    if n_traj < 2:
        raise ValueError("n_traj must be >= 2 for meaningful error bars")
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size < 2 or t_grid[0] != 0.0:
        raise ValueError("t_grid must start at 0 and contain at least two points")
    spacing = np.diff(t_grid)
    if not np.allclose(spacing, spacing[0], rtol=1e-9, atol=0.0):
        raise ValueError("t_grid must be uniform")
    dt = float(spacing[0])

    samples = np.empty((n_traj, len(operators), t_grid.size))
    for i in range(n_traj):
        rec = run_trajectory(unr, psi0, float(t_grid[-1]), dt, trajectory_seed(base_seed, i), operators)
        samples[i] = rec.observables

    # compensated reduction keeps the ensemble mean order-insensitive
    mean = np.empty((len(operators), t_grid.size))
    stderr = np.empty_like(mean)
    for j in range(len(operators)):
        for k in range(t_grid.size):
            column = samples[:, j, k]
            m = math.fsum(column) / n_traj
            var = math.fsum((column - m) ** 2) / (n_traj - 1)
            mean[j, k] = m
            stderr[j, k] = math.sqrt(var / n_traj)
    return EnsembleResult(times=t_grid, mean=mean, stderr=stderr, n_traj=n_traj)
