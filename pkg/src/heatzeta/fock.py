"""Truncated Hermite/Fock-basis realisation of a single-mode model.

Basis ordering is mode-major: index ``m * N + k`` is the Fock state ``|m>``
tensored with level ``e_k``.  Weyl quantisation of a monomial ``x^a xi^b`` is
the symmetrised product of ``a`` copies of ``x`` and ``b`` copies of
``D = -i d/dx``, with

    x = (psi + psi*)/sqrt 2,   D = -i (psi - psi*)/sqrt 2,
    psi |m> = sqrt(m) |m-1>,   psi* |m> = sqrt(m+1) |m+1>.

Operators are assembled in a slightly larger space and cropped, so products
are exact on the retained modes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import permutations

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .models import ModelSpec
from .symbols import Poly

DEFAULT_CUTOFF = 2000


class PositivityError(ValueError):
    """The operator is not positive, so ``lambda**-s`` is undefined."""


def ladder_matrices(size: int):
    """Sparse ``(psi, psi*)`` on ``size`` Fock modes."""
    off = np.sqrt(np.arange(1, size, dtype=float))
    psi = sp.diags(off, 1, shape=(size, size), format="csr")
    return psi, psi.T.tocsr()


def weyl_operator(p: Poly, cutoff: int) -> sp.csr_matrix:
    """Fock matrix of the Weyl quantisation of a one-mode polynomial."""
    if p.nvars != 2:
        raise ValueError("Fock construction is implemented for n = 1 only")
    deg = max(p.degree(), 0)
    size = cutoff + deg + 1
    psi, psid = ladder_matrices(size)
    X = (psi + psid) / np.sqrt(2)
    D = (psi - psid) * (-1j / np.sqrt(2))
    out = sp.csr_matrix((size, size), dtype=complex)
    for (a, b), c in p.terms.items():
        word = "x" * a + "d" * b
        orders = set(permutations(word))
        acc = sp.csr_matrix((size, size), dtype=complex)
        for order in orders:
            term = sp.identity(size, dtype=complex, format="csr")
            for ch in order:
                term = term @ (X if ch == "x" else D)
            acc = acc + term
        # average over all a!b!-weighted orderings equals the mean over distinct ones
        out = out + acc * (complex(c) / len(orders))
    return out[:cutoff, :cutoff].tocsr()


def build_matrix(model: ModelSpec, cutoff: int) -> sp.csr_matrix:
    """Hermitian Fock matrix of the full operator, size ``cutoff * N``."""
    if model.n != 1:
        raise ValueError("Fock construction is implemented for n = 1 only")
    if cutoff < 1:
        raise ValueError("cutoff must be positive")
    N = model.N
    blocks = []
    cache: dict = {}
    for k in range(N):
        for l in range(N):
            p, factor = model.physical_entry(k, l)
            if p.is_zero():
                continue
            key = (tuple(sorted((m, c.re, c.im) for m, c in p.terms.items())))
            if key not in cache:
                cache[key] = weyl_operator(p, cutoff)
            E = sp.csr_matrix(([1.0], ([k], [l])), shape=(N, N))
            blocks.append(sp.kron(cache[key] * factor, E, format="csr"))
    H = sum(blocks[1:], blocks[0]).tocsr() if blocks else sp.csr_matrix((cutoff * N, cutoff * N))
    asym = abs(H - H.conj().T)
    scale = max(abs(H).max(), 1.0)
    if asym.nnz and asym.max() > 1e-12 * scale:
        raise ValueError("Fock matrix is not Hermitian")
    if H.dtype.kind == "c" and (H.nnz == 0 or abs(H.imag).max() <= 1e-14 * scale):
        H = H.real.tocsr()
    H.eliminate_zeros()
    return H


def _is_hermitian(A, tol=1e-12) -> bool:
    if sp.issparse(A):
        d = abs(A - A.conj().T)
        return d.nnz == 0 or d.max() <= tol * max(abs(A).max(), 1.0)
    A = np.asarray(A)
    return A.shape[0] == A.shape[1] and np.allclose(A, A.conj().T, atol=tol * max(np.abs(A).max(), 1.0))


def _components(A):
    S = sp.csr_matrix(A)
    ncomp, labels = connected_components(S, directed=False)
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(ncomp + 1))
    return [order[bounds[i]:bounds[i + 1]] for i in range(ncomp)]


def _bandwidth(B) -> int:
    B = sp.coo_matrix(B)
    return int(np.abs(B.row - B.col).max()) if B.nnz else 0


def _to_banded(B, bw: int) -> np.ndarray:
    B = sp.coo_matrix(B)
    n = B.shape[0]
    ab = np.zeros((bw + 1, n), dtype=B.dtype)
    mask = B.col >= B.row
    # upper form: ab[bw + i - j, j] = B[i, j]
    ab[bw + B.row[mask] - B.col[mask], B.col[mask]] = B.data[mask]
    return ab


def _solve_component(B, vectors: bool = False):
    """Eigen-decomposition of one invariant block (dense or banded)."""
    size = B.shape[0]
    if size <= 256:
        dense = B.toarray() if sp.issparse(B) else np.asarray(B)
        return np.linalg.eigh(dense) if vectors else np.linalg.eigvalsh(dense)
    bw = _bandwidth(B)
    if bw <= size // 8:
        ab = _to_banded(B, bw)
        if vectors:
            return sla.eig_banded(ab, lower=False)
        return sla.eig_banded(ab, lower=False, eigvals_only=True)
    dense = B.toarray()
    return sla.eigh(dense) if vectors else sla.eigh(dense, eigvals_only=True)


def eigenvalues(matrix, check_pairs: int = 10, seed: int = 0) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix, ascending.

    The matrix is split into its invariant blocks (connected components of the
    sparsity graph); small blocks are diagonalised in batches, large ones by the
    banded or dense symmetric LAPACK drivers.  ``check_pairs`` random eigenpairs
    are recomputed with vectors and must satisfy
    ``||A v - lambda v|| <= 1e-10 ||A||``.
    """
    A = sp.csr_matrix(matrix) if not sp.issparse(matrix) else matrix.tocsr()
    if A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    if not _is_hermitian(A):
        raise ValueError("matrix is not Hermitian")
    if A.shape[0] == 0:
        return np.zeros(0)
    comps = _components(A)
    vals = []
    by_size: dict = {}
    for c in comps:
        by_size.setdefault(len(c), []).append(c)
    for size, group in by_size.items():
        if size <= 8 and len(group) > 1:
            idx = np.array(group)
            stack = _gather_blocks(A, idx)
            vals.append(np.linalg.eigvalsh(stack).ravel())
        else:
            for c in group:
                vals.append(np.atleast_1d(_solve_component(A[c][:, c])))
    ev = np.sort(np.concatenate(vals).real)
    if check_pairs:
        _spot_check(A, comps, check_pairs, seed)
    return ev


def _gather_blocks(A, idx: np.ndarray) -> np.ndarray:
    """Dense ``(m, s, s)`` stack of the principal submatrices ``A[idx[i]][:, idx[i]]``."""
    A = A.tocsr()
    m, s = idx.shape
    out = np.zeros((m, s, s), dtype=A.dtype)
    for a in range(s):
        for b in range(s):
            out[:, a, b] = np.asarray(A[idx[:, a], idx[:, b]]).ravel()
    return out


def _spot_check(A, comps, count: int, seed: int):
    rng = np.random.default_rng(seed)
    norm = max(abs(A).max(), 1.0)
    picks = rng.choice(len(comps), size=min(count, len(comps)), replace=False)
    for ci in picks:
        c = comps[ci]
        B = A[c][:, c]
        w, V = _solve_component(B, vectors=True)
        k = rng.integers(len(w))
        v = np.zeros(A.shape[0], dtype=V.dtype)
        v[c] = V[:, k]
        res = np.linalg.norm(A @ v - w[k] * v)
        if res > 1e-10 * norm * max(1.0, np.sqrt(A.shape[0]) * 1e-3):
            raise ArithmeticError(f"eigenpair residual {res:.3e} exceeds tolerance")


@dataclass
class SpectrumResult:
    """Truncated spectrum of a model.  ``converged_count`` eigenvalues lie below
    half the largest one and are trusted."""

    cutoff: int
    eigenvalues: np.ndarray
    converged_count: int
    model: str
    params: dict = field(default_factory=dict)
    N: int = 1
    tau: float = 0.0
    finite: bool = False  # an exact finite spectrum: no truncation tail

    @classmethod
    def from_values(cls, values, model: str = "finite") -> "SpectrumResult":
        """Exact finite spectrum; every eigenvalue is trusted and tails vanish."""
        ev = np.sort(np.asarray(values, dtype=float))
        return cls(len(ev), ev, len(ev), model, finite=True)

    @property
    def positive(self) -> bool:
        return bool(len(self.eigenvalues) and self.eigenvalues[0] > 0)

    @property
    def converged(self) -> np.ndarray:
        return self.eigenvalues[:self.converged_count]

    def shifted(self, tau) -> "SpectrumResult":
        """Spectrum of ``A + tau I``."""
        tau = float(tau)
        return replace(self, eigenvalues=self.eigenvalues + tau, tau=self.tau + tau)

    def to_json(self) -> dict:
        return {"model": self.model,
                "params": {k: f"{v.numerator}/{v.denominator}" if hasattr(v, "numerator") else v
                           for k, v in sorted(self.params.items())},
                "cutoff": self.cutoff, "N": self.N, "tau": self.tau,
                "positive": self.positive, "converged_count": int(self.converged_count),
                "finite": self.finite,
                "eigenvalues": [float(x) for x in self.eigenvalues]}

    @classmethod
    def from_json(cls, data: dict) -> "SpectrumResult":
        return cls(int(data["cutoff"]), np.asarray(data["eigenvalues"], dtype=float),
                   int(data["converged_count"]), data.get("model", ""), data.get("params", {}),
                   int(data.get("N", 1)), float(data.get("tau", 0.0)),
                   bool(data.get("finite", False)))


def compute_spectrum(model: ModelSpec, cutoff: int = DEFAULT_CUTOFF) -> SpectrumResult:
    ev = eigenvalues(build_matrix(model, cutoff))
    threshold = ev[-1] / 2 if ev[-1] > 0 else ev[-1]
    conv = int(np.searchsorted(ev, threshold, side="left"))
    return SpectrumResult(cutoff, ev, max(conv, 1), model.name, dict(model.params), model.N)


# -- spectral sums --------------------------------------------------------------

def _linear_growth(spec: SpectrumResult) -> tuple[float, float, int]:
    """``(a, b, K)`` with ``lambda_k >= a k + b`` over the top converged eigenvalues."""
    lam = spec.converged
    K = len(lam)
    lo = K // 2
    if K - lo < 2:
        return (1.0, float(lam[-1]) - K, K) if K else (1.0, 0.0, 0)
    k = np.arange(lo, K, dtype=float)
    a, b = np.polyfit(k, lam[lo:], 1)
    b_low = float(np.min(lam[lo:] - a * k))
    return float(a), b_low, K


def heat_trace(spec: SpectrumResult, t: float) -> tuple[float, float]:
    """``(sum_k exp(-t lambda_k), tail_bound)`` over the converged eigenvalues."""
    if t <= 0:
        raise ValueError("t must be positive")
    lam = spec.converged
    shift = min(0.0, float(lam[0]))
    value = float(np.sum(np.exp(-t * (lam - shift))) * np.exp(-t * shift))
    if spec.finite:
        return value, 0.0
    a, b, K = _linear_growth(spec)
    tail = np.exp(-t * (a * K + b)) / -np.expm1(-t * a)
    return value, float(tail)


def _tail_bracket(a: float, b: float, K: int, s: complex) -> tuple[complex, float]:
    """Midpoint and half-width of ``[int_K^oo, int_{K-1}^oo] (a x + b)^-s dx``."""
    def integral(x0):
        return (a * x0 + b) ** (1 - s) / (a * (s - 1))
    lo, hi = integral(K), integral(K - 1)
    return (lo + hi) / 2, abs(hi - lo) / 2


def zeta_partial_sum(spec: SpectrumResult, s: complex, n: int = 1) -> tuple[complex, float]:
    """``(sum lambda**-s + tail estimate, tail uncertainty)`` for ``Re s > n``.

    A finite spectrum gives the exact sum for any ``s``.
    """
    if np.real(s) <= n and not spec.finite:
        raise ValueError(f"the series converges only for Re s > {n}")
    if not spec.positive:
        raise PositivityError(
            f"operator is not positive (lambda_min = {spec.eigenvalues[0]:.6g}); "
            f"apply a Hurwitz shift tau > {-spec.eigenvalues[0]:.6g} explicitly")
    lam = spec.converged
    partial = np.sum(np.exp(-s * np.log(lam)))
    if spec.finite:
        mid, half = 0.0, 0.0
    else:
        a, b, K = _linear_growth(spec)
        mid, half = _tail_bracket(a, b, K, s)
    value = partial + mid
    if np.isrealobj(s) or np.imag(s) == 0:
        value = float(np.real(value))
    return value, float(half)


def hurwitz_partial_sum(spec: SpectrumResult, tau: float, s: complex, n: int = 1):
    """Zeta partial sum of ``A + tau I``."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    return zeta_partial_sum(spec.shifted(tau), s, n)


def counting_function(spec: SpectrumResult, Lam: float) -> int:
    """Number of eigenvalues ``<= Lam``."""
    return int(np.searchsorted(spec.eigenvalues, Lam, side="right"))


__all__ = ["build_matrix", "eigenvalues", "SpectrumResult", "compute_spectrum", "heat_trace",
           "zeta_partial_sum", "hurwitz_partial_sum", "counting_function", "weyl_operator",
           "PositivityError"]
