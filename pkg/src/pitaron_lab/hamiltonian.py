"""Declarative time-dependent Hamiltonians.

A Hamiltonian is a smooth sampled part plus an ordered list of delta
kicks.  Kicks stay first-class data: they are never smeared here, the
stepper applies them as exact factors and the singular-dynamics module
handles their expansions symbolically.  Time is in natural units
(hbar = 1) throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .linalg import HERMITICITY_TOL, as_matrix, frob, hermitize

SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
SIGMA2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)

__all__ = [
    "SIGMA1",
    "SIGMA2",
    "SIGMA3",
    "Kick",
    "HamiltonianSpec",
    "SplitHamiltonian",
    "hermitian_split",
    "pauli_hamiltonian",
    "nhse_hamiltonian",
    "dirac_comb_spec",
]


@dataclass(frozen=True)
class Kick:
    """Instantaneous term V * delta(t - time); ``strength`` is the matrix V."""

    time: float
    strength: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "strength", as_matrix(self.strength))
        if not np.isfinite(self.time):
            raise ValueError("kick time must be finite")


@dataclass(frozen=True)
class HamiltonianSpec:
    """Smooth sampled part plus ordered delta kicks.

    ``smooth`` is a pure evaluator t -> matrix (or None for pure-kick
    specs); the stepper chooses where to sample it.  Kick times must be
    strictly increasing and every matrix must match ``dim``.
    """

    dim: int
    smooth: Callable[[float], np.ndarray] | None = None
    kicks: tuple[Kick, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        object.__setattr__(self, "kicks", tuple(self.kicks))
        times = [k.time for k in self.kicks]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise ValueError(f"kick times must be strictly increasing: {times}")
        for k in self.kicks:
            if k.strength.shape != (self.dim, self.dim):
                raise ValueError(
                    f"kick at t={k.time} has dimension {k.strength.shape[0]}, "
                    f"spec has {self.dim}"
                )

    def sample(self, t: float) -> np.ndarray:
        """Evaluate the smooth part at time t (zero matrix if absent)."""
        if self.smooth is None:
            return np.zeros((self.dim, self.dim), dtype=np.complex128)
        h = np.asarray(self.smooth(t), dtype=np.complex128)
        if h.shape != (self.dim, self.dim):
            raise ValueError(
                f"smooth part returned shape {h.shape} at t={t}, expected "
                f"({self.dim}, {self.dim})"
            )
        # a single sum propagates any nan/inf and is much cheaper per sample
        # than an elementwise isfinite scan on the stepper's hot path
        if not np.isfinite(h.sum()):
            raise ValueError(f"smooth part returned non-finite entries at t={t}")
        return h

    def kicks_between(self, t0: float, t1: float) -> tuple[Kick, ...]:
        """Kicks with time in the half-open interval (t0, t1]."""
        return tuple(k for k in self.kicks if t0 < k.time <= t1)


@dataclass(frozen=True)
class SplitHamiltonian:
    """Canonical split H = h_part - i * j_part with both parts Hermitian.

    ``commutator_norm`` reports ||[h_part, j_part]||_F.  The split is an
    eligible decomposition of the dynamics only when the two parts
    commute; this is reported, never decided here.
    """

    h_part: np.ndarray
    j_part: np.ndarray
    commutator_norm: float


def hermitian_split(h) -> SplitHamiltonian:
    """Split H into Hermitian and anti-Hermitian parts, H = Hh - i*J.

    Hh = (H + H^dagger)/2 and J = i (H - H^dagger)/2 are both Hermitian
    and reconstruct H exactly.
    """
    h = as_matrix(h)
    h_part = hermitize(h)
    j_part = 0.5j * (h - h.conj().T)
    comm = h_part @ j_part - j_part @ h_part
    return SplitHamiltonian(h_part=h_part, j_part=j_part, commutator_norm=frob(comm))


def _as_time_function(f) -> Callable[[float], float]:
    if callable(f):
        return f
    value = float(f)
    return lambda t: value


def pauli_hamiltonian(f1, f2, f3) -> HamiltonianSpec:
    """Two-level spec H(t) = f1(t) s1 + f2(t) s2 + f3(t) s3.

    Each coefficient may be a callable of t or a constant.  The result is
    traceless and Hermitian at every time.
    """
    g1, g2, g3 = _as_time_function(f1), _as_time_function(f2), _as_time_function(f3)

    def smooth(t: float) -> np.ndarray:
        return g1(t) * SIGMA1 + g2(t) * SIGMA2 + g3(t) * SIGMA3

    return HamiltonianSpec(dim=2, smooth=smooth)


def nhse_hamiltonian(l: int, onsite: float, hop, gamma) -> np.ndarray:
    """Single-particle lattice Hamiltonian with asymmetric hopping.

    An l-site open chain with on-site energy ``onsite``; hopping to the
    right neighbour carries amplitude hop_i - gamma_i and to the left
    hop_i + gamma_i, so any nonzero gamma breaks Hermiticity and piles
    weight up against one edge (the skin effect).  Scalars broadcast to
    all l-1 bonds.
    """
    if l < 2:
        raise ValueError("lattice needs at least 2 sites")

    def bonds(values, name):
        arr = np.asarray(values, dtype=float)
        if arr.ndim == 0:
            return np.full(l - 1, float(arr))
        if arr.shape != (l - 1,):
            raise ValueError(f"expected {l - 1} {name} values, got shape {arr.shape}")
        return arr

    hops = bonds(hop, "hopping")
    gammas = bonds(gamma, "gamma")
    h = np.diag(np.full(l, onsite, dtype=np.complex128))
    for i in range(l - 1):
        h[i, i + 1] = hops[i] - gammas[i]
        h[i + 1, i] = hops[i] + gammas[i]
    return h


def dirac_comb_spec(
    kick_strengths: Sequence[float],
    kick_times: Sequence[float],
    dim: int,
    generator: np.ndarray | None = None,
) -> HamiltonianSpec:
    """Pure-kick spec V(t) = sum_i V_i delta(t - t_i).

    Each kick strength multiplies ``generator`` (identity by default, any
    Hermitian matrix for multi-level combs).  Times must be strictly
    increasing.
    """
    strengths = [float(v) for v in kick_strengths]
    times = [float(t) for t in kick_times]
    if len(strengths) != len(times):
        raise ValueError(
            f"{len(strengths)} strengths but {len(times)} kick times"
        )
    if generator is None:
        generator = np.eye(dim, dtype=np.complex128)
    else:
        generator = as_matrix(generator)
        if generator.shape != (dim, dim):
            raise ValueError("generator dimension does not match dim")
        if frob(generator - generator.conj().T) > HERMITICITY_TOL:
            raise ValueError("comb generator must be Hermitian")
    kicks = tuple(Kick(time=t, strength=v * generator) for v, t in zip(strengths, times))
    return HamiltonianSpec(dim=dim, smooth=None, kicks=kicks)
