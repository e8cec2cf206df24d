"""Complexified picture: two Hermitian forms and their transfer operator.

Two positive-definite Hermitian forms h1, h2 on C^n (conjugate-linear in the
*first* argument throughout this module) determine a transfer operator F by

    (x, y)_2 = (F x, y)_1     i.e.     F = inv(H1) @ H2

as matrices.  F is self-adjoint for both forms, with positive spectrum; its
extreme eigenvalues give the best constants of the norm equivalence
``a * |x|_2 <= |x|_1 <= b * |x|_2``.

Operators unitary for both forms commute with F, so the bi-unitary group
lives in the commutant of F.  The commutant dimension is the sum of the
squared eigenvalue multiplicities, while the bicommutant dimension equals
the number of distinct eigenvalues; the two agree exactly when the spectrum
is simple, which is the genericity criterion for the pair of forms.

:func:`complexify` bridges from the real picture: a compatible pair of real
triples becomes a pair of Hermitian forms on C^n using the first complex
structure for the multiplication.  On blocks where the two complex
structures are opposite, the second form is conjugated to restore
sesquilinearity; that leaves the bi-unitary group unchanged.  Eigenvalues of
the resulting transfer operator reproduce the block eigenvalues of the real
decomposition, one copy per complex dimension of the block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .compatibility import CompatiblePair
from .decomposition import BlockDecomposition, decompose
from .linalg import (
    DEFAULT_TOL,
    RankAmbiguityError,
    StructureError,
    Tolerance,
    as_complex_matrix,
    cluster_eigenvalues,
    frozen,
    op_norm,
    scale_of,
    svd_null_space,
)

__all__ = [
    "HermitianForm",
    "TransferOperator",
    "transfer_operator",
    "norm_bounds",
    "commutant_basis",
    "commutant_dim",
    "bicommutant_basis",
    "bicommutant_dim",
    "is_generic_operator",
    "biunitary_sample",
    "complexify",
]


class HermitianForm:
    """Positive-definite Hermitian Gram matrix; value ``conj(x) @ h @ y``
    (conjugate-linear in the first argument)."""

    def __init__(self, h, tol: Tolerance = DEFAULT_TOL):
        h = as_complex_matrix(h, "hermitian form")
        resid = op_norm(h - h.conj().T)
        if resid > tol.rel * scale_of(h):
            raise StructureError(
                f"form is not conjugate-symmetric (residual {resid:.3e})",
                check="hermitian_symmetric", residual=resid,
            )
        herm = 0.5 * (h + h.conj().T)
        w = np.linalg.eigvalsh(herm)
        if w[0] <= tol.rel * scale_of(herm):
            raise StructureError(
                f"form is not positive-definite (min eigenvalue {w[0]:.3e})",
                check="hermitian_positive_definite", residual=float(w[0]),
            )
        self.h = frozen(herm)

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    def __repr__(self) -> str:
        return f"HermitianForm(dim={self.dim})"


@dataclass(frozen=True)
class TransferOperator:
    """Operator carrying one Hermitian form into the other, together with
    its spectral data: eigenvalues ascending, eigenvector columns
    orthonormal for the first form."""

    matrix: np.ndarray
    h1: HermitianForm
    h2: HermitianForm
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def transfer_operator(h1: HermitianForm, h2: HermitianForm,
                      tol: Tolerance = DEFAULT_TOL) -> TransferOperator:
    """Build the transfer operator F = inv(H1) @ H2 of two Hermitian forms.

    Verifies that F is self-adjoint for both forms, has positive spectrum,
    and reproduces the second form on random probe vectors:
    ``(x, y)_2 = (F x, y)_1``.
    """
    if not isinstance(h1, HermitianForm):
        h1 = HermitianForm(h1, tol)
    if not isinstance(h2, HermitianForm):
        h2 = HermitianForm(h2, tol)
    if h1.dim != h2.dim:
        raise ValueError(f"dimension mismatch: {h1.dim} vs {h2.dim}")
    f = np.linalg.solve(h1.h, h2.h)
    for name, h in (("first", h1.h), ("second", h2.h)):
        prod = h @ f
        resid = op_norm(prod - prod.conj().T)
        if resid > tol.rel * scale_of(prod):
            raise StructureError(
                f"transfer operator not self-adjoint for the {name} form "
                f"(residual {resid:.3e})",
                check="transfer_self_adjoint", residual=resid,
            )
    evals, vecs = scipy.linalg.eigh(h2.h, h1.h)
    if evals[0] <= 0:
        raise StructureError(
            f"transfer operator spectrum is not positive (min {evals[0]:.3e})",
            check="transfer_positive", residual=float(evals[0]),
        )
    rng = np.random.default_rng(0)
    for _ in range(8):
        x = rng.standard_normal(h1.dim) + 1j * rng.standard_normal(h1.dim)
        y = rng.standard_normal(h1.dim) + 1j * rng.standard_normal(h1.dim)
        lhs = np.conj(x) @ h2.h @ y
        rhs = np.conj(f @ x) @ h1.h @ y
        if abs(lhs - rhs) > tol.rel * max(1.0, abs(lhs)) * scale_of(h2.h):
            raise StructureError(
                f"transfer identity fails on probe vectors (|diff| {abs(lhs - rhs):.3e})",
                check="transfer_identity", residual=float(abs(lhs - rhs)),
            )
    return TransferOperator(frozen(f), h1, h2, frozen(evals), frozen(vecs))


def norm_bounds(op: TransferOperator) -> tuple[float, float]:
    """Best constants (a, b) of the norm equivalence
    ``a * |x|_2 <= |x|_1 <= b * |x|_2``.

    Since ``|x|_2^2 = (F x, x)_1`` ranges over the spectrum of F times
    ``|x|_1^2``, the constants are a = 1/sqrt(max eigenvalue) and
    b = 1/sqrt(min eigenvalue); they bound the operator norm of F through
    ``1/b^2 <= |F|_1 <= 1/a^2`` (the right bound is attained).
    """
    lam_min = float(op.eigenvalues[0])
    lam_max = float(op.eigenvalues[-1])
    a = 1.0 / np.sqrt(lam_max)
    b = 1.0 / np.sqrt(lam_min)
    if not (1.0 / b**2 <= lam_max * (1 + 1e-12) and lam_max <= (1.0 / a**2) * (1 + 1e-12)):
        raise StructureError("norm-bound chain 1/b^2 <= |F| <= 1/a^2 violated",
                             check="norm_bound_chain")
    return a, b


def _commuting_null_space(mats, dim: int, rel: float) -> np.ndarray:
    eye = np.eye(dim)
    rows = np.vstack([np.kron(m, eye) - np.kron(eye, m.T) for m in mats])
    # the commutator map with m has operator norm at most 2 |m|; use that as
    # the scale so operators close to a multiple of I keep a full commutant
    floor = 2.0 * max(op_norm(m) for m in mats)
    vecs, _ = svd_null_space(rows, rel, floor=floor)
    return vecs.reshape(-1, dim, dim)


def commutant_basis(op: TransferOperator, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (stacked k x n x n) of all complex matrices
    commuting with the transfer operator."""
    return _commuting_null_space([op.matrix], op.dim, tol.rel)


def commutant_dim(op: TransferOperator, tol: Tolerance = DEFAULT_TOL) -> int:
    """Complex dimension of the commutant: the sum of the squared
    eigenvalue multiplicities."""
    return len(commutant_basis(op, tol))


def bicommutant_basis(op: TransferOperator, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the joint commutant of the whole commutant."""
    return _commuting_null_space(list(commutant_basis(op, tol)), op.dim, tol.rel)


def bicommutant_dim(op: TransferOperator, tol: Tolerance = DEFAULT_TOL) -> int:
    """Complex dimension of the bicommutant, computed by the double
    null-space solve and cross-checked against the number of distinct
    eigenvalue clusters (the minimal-polynomial degree of a diagonalizable
    operator)."""
    dim = len(bicommutant_basis(op, tol))
    clusters = len(cluster_eigenvalues(op.eigenvalues, tol.cluster_gap))
    if dim != clusters:
        raise RankAmbiguityError(
            f"bicommutant dimension {dim} disagrees with the eigenvalue "
            f"cluster count {clusters}"
        )
    return dim


def is_generic_operator(op: TransferOperator, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Genericity of the pair of forms: bicommutant equals commutant.

    Equivalent to all eigenvalue clusters of the transfer operator being
    simple; both criteria are evaluated and must agree.
    """
    generic = commutant_dim(op, tol) == bicommutant_dim(op, tol)
    simple = all(mult == 1 for _, mult in
                 cluster_eigenvalues(op.eigenvalues, tol.cluster_gap))
    if generic != simple:
        raise RankAmbiguityError(
            "commutant criterion and spectrum simplicity disagree "
            f"(commutant says {generic}, spectrum says {simple})"
        )
    return generic


def biunitary_sample(op: TransferOperator, poly_coeffs, t: float,
                     tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Sample of the bi-unitary family exp(i * f(F) * t) for a real
    polynomial f (coefficients in ascending order).

    Computed spectrally from the eigendecomposition of the transfer
    operator; the result is verified to preserve both Hermitian forms.
    """
    coeffs = np.asarray(poly_coeffs, dtype=np.float64)
    if coeffs.ndim != 1 or coeffs.size == 0:
        raise ValueError("poly_coeffs must be a non-empty 1-d real sequence")
    t = float(t)
    vals = np.polynomial.polynomial.polyval(op.eigenvalues, coeffs)
    phases = np.exp(1j * vals * t)
    v = op.eigenvectors
    v_inv = v.conj().T @ op.h1.h  # inverse, since v is h1-orthonormal
    u = (v * phases) @ v_inv
    for name, h in (("first", op.h1.h), ("second", op.h2.h)):
        resid = op_norm(u.conj().T @ h @ u - h)
        if resid > tol.rel * scale_of(h):
            raise StructureError(
                f"sample fails unitarity for the {name} form (residual {resid:.3e})",
                check="biunitary_sample", residual=resid,
            )
    return u


def _adapted_frame(d: BlockDecomposition) -> tuple[np.ndarray, tuple[int, ...]]:
    """Complex basis vectors (columns) adapted to the decomposition.

    Within each block, picks g1-orthonormal vectors c with partners
    J1 @ c so that the real block basis is (c_1, J1 c_1, c_2, J1 c_2, ...);
    the c's are the complex coordinate axes.  Returns the stacked c columns
    and the block sign carried by each.
    """
    p = d.pair
    g1, j1 = p.t1.g.m, p.t1.j.m
    cols: list[np.ndarray] = []
    signs: list[int] = []
    for block in d.blocks:
        chosen: list[np.ndarray] = []
        candidates = [block.basis[:, k] for k in range(block.dim)]
        for _ in range(block.dim // 2):
            best, best_norm = None, 0.0
            for v in candidates:
                r = v.copy()
                for u in chosen:  # two Gram-Schmidt sweeps for stability
                    r = r - float(u @ g1 @ r) * u
                for u in chosen:
                    r = r - float(u @ g1 @ r) * u
                nrm = float(np.sqrt(r @ g1 @ r))
                if nrm > best_norm:
                    best, best_norm = r, nrm
            assert best is not None and best_norm > 0.0
            c = best / best_norm
            chosen.extend((c, j1 @ c))
            cols.append(c)
            signs.append(block.sign)
    return np.column_stack(cols), tuple(signs)


def complexify(p: CompatiblePair,
               tol: Tolerance | None = None) -> tuple[HermitianForm, HermitianForm, tuple[int, ...]]:
    """Turn a compatible real pair into two Hermitian forms on C^n.

    The first complex structure defines the multiplication by i; in an
    adapted g1-orthonormal basis the first form becomes the identity.  The
    second form is assembled blockwise as g2 - i * omega2 on blocks where
    the complex structures agree and as the conjugate g2 + i * omega2 where
    they are opposite (conjugation restores sesquilinearity there without
    changing the bi-unitary group).  Returns the two forms and the sign
    applied to each complex coordinate.
    """
    tol = tol or p.tol
    d = decompose(p, tol)
    cols, signs = _adapted_frame(d)
    sign_rows = np.array(signs, dtype=float)[:, None]

    def form_matrix(g: np.ndarray, w: np.ndarray) -> np.ndarray:
        gm = cols.T @ g @ cols
        wm = cols.T @ w @ cols
        return gm - 1j * sign_rows * wm

    h1 = HermitianForm(form_matrix(p.t1.g.m, p.t1.omega.m), tol)
    h2 = HermitianForm(form_matrix(p.t2.g.m, p.t2.omega.m), tol)
    return h1, h2, signs
