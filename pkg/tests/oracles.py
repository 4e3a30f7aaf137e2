"""Independent reference implementations used to check the library.

These deliberately avoid the code paths they verify: the exponential is
a plain term-by-term series without scaling, the Lyapunov integral is a
Gauss-Legendre quadrature that never eigendecomposes, and the double
integral is a brute-force sum over the ordered triangle.
"""

from __future__ import annotations

import numpy as np


def series_exp(a: np.ndarray, terms: int = 80) -> np.ndarray:
    """exp(A) by summing the Taylor series directly, no scaling or squaring."""
    a = np.asarray(a, dtype=complex)
    total = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        total = total + term
    return total


def lyapunov_quadrature(n: np.ndarray, q: np.ndarray, panel_width: float = 0.25) -> np.ndarray:
    """integral_0^Y exp(-yN) Q exp(-yN) dy by composite 7-point Gauss-Legendre.

    Y is chosen so exp(-2 lambda_min Y) < 1e-14.  The exponentials come
    from the series (via repeated panel shifts), not from an
    eigendecomposition, keeping this route independent of the eigenbasis
    solver it cross-checks.
    """
    lam_min = float(np.min(np.linalg.eigvalsh((n + n.conj().T) / 2)))
    assert lam_min > 0, "quadrature oracle needs positive definite N"
    Y = 16.5 / lam_min
    panels = int(np.ceil(Y / panel_width))
    width = Y / panels
    nodes, weights = np.polynomial.legendre.leggauss(7)
    offsets = (nodes + 1.0) * (width / 2.0)
    wts = weights * (width / 2.0)
    e_off = [series_exp(-o * n) for o in offsets]
    e_width = series_exp(-width * n)
    total = np.zeros_like(np.asarray(q, dtype=complex))
    e_start = np.eye(n.shape[0], dtype=complex)
    for _ in range(panels):
        for eo, w in zip(e_off, wts):
            e = e_start @ eo
            total = total + w * (e @ q @ e)
        e_start = e_start @ e_width
    return total


def triangle_commutator_quadrature(sample, t0: float, t: float,
                                   cells: int = 600) -> np.ndarray:
    """Brute-force midpoint sum of [H(x), H(y)] over t0 < y < x < t.

    ``sample`` maps a time to a matrix.  All pair products are formed on
    a uniform mesh and the ordered triangle is summed; accurate to
    O(1/cells) even for integrands with jumps.
    """
    h = (t - t0) / cells
    mids = t0 + (np.arange(cells) + 0.5) * h
    stack = np.stack([np.asarray(sample(x), dtype=complex) for x in mids])
    prod = np.einsum("iab,jbc->ijac", stack, stack)
    comm = prod - prod.transpose(1, 0, 2, 3)
    lower = np.tril(np.ones((cells, cells)), k=-1)  # strict x > y
    return np.einsum("ij,ijab->ab", lower, comm) * h * h


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-ish unitary from the QR of a complex Gaussian matrix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_pd(rng: np.random.Generator, dim: int, lam_lo: float = 0.5,
              lam_hi: float = 3.0) -> np.ndarray:
    """Random Hermitian positive definite matrix with a bounded spectrum."""
    w = random_unitary(rng, dim)
    lam = rng.uniform(lam_lo, lam_hi, dim)
    m = (w * lam) @ w.conj().T
    return (m + m.conj().T) / 2


def random_ginibre(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Standard complex Gaussian matrix (almost surely invertible)."""
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
