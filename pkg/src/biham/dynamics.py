"""Dynamics preserving both structures of a compatible pair.

The linear fields whose flows preserve g1, g2, omega1 and omega2 form a Lie
algebra, computed here as the null space of the four linear constraints

    tau @ A + A.T @ tau = 0,    tau in {g1, g2, omega1, omega2}

over all matrices A.  Its dimension is the sum of the squared ranks of the
group signature; for a generic pair it is exactly n and the algebra is a
maximal torus.

The recursion operator T generates a distinguished commuting family inside
it: the fields with matrices J1, T @ J1, ..., T^(n-1) @ J1.  Because T is a
constant invertible (1,1)-tensor it satisfies the Nijenhuis condition, which
at matrix level is the identity [T A, T] = T [A, T]; preservation and
pairwise commutation of the family follow.  The family is linearly
independent exactly when T has n distinct eigenvalues (Vandermonde
argument on the minimal polynomial), so its certified rank equals the
number of distinct T eigenvalue clusters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .compatibility import CompatiblePair
from .decomposition import DecompositionError, decompose, group_signature
from .linalg import (
    DEFAULT_TOL,
    NumericalCheckError,
    Tolerance,
    cluster_eigenvalues,
    commutator,
    eig_self_adjoint,
    frozen,
    op_norm,
    svd_null_space,
)
from .structures import LinearField, field_preserves

__all__ = [
    "BiPreservingAlgebra",
    "RecursionBasis",
    "RecursionCertificate",
    "ConservationReport",
    "FlowOverflowError",
    "bi_preserving_algebra",
    "recursion_basis",
    "certify_recursion",
    "flow",
    "conservation_probe",
]


class FlowOverflowError(NumericalCheckError):
    """The matrix exponential overflowed for the requested time."""


@dataclass(frozen=True)
class BiPreservingAlgebra:
    """Orthonormalized basis of the Lie algebra of fields preserving all
    four tensors of the pair; dimension = sum of squared signature ranks."""

    pair: CompatiblePair
    basis: tuple[np.ndarray, ...]
    dim: int


@dataclass(frozen=True)
class RecursionBasis:
    """The commuting family generated by the recursion operator:
    fields with matrices T^k @ J1 for k = 0 .. n-1."""

    pair: CompatiblePair
    fields: tuple[LinearField, ...]

    @property
    def matrices(self) -> tuple[np.ndarray, ...]:
        return tuple(f.matrix for f in self.fields)


@dataclass(frozen=True)
class RecursionCertificate:
    """Certification report for a recursion family."""

    preserves_all: bool
    max_preservation_residual: float
    commute: bool
    max_commutator_residual: float
    rank: int
    expected_rank: int
    singular_values: tuple[float, ...]
    rank_gap: float
    distinct_t_eigenvalues: int
    vandermonde_consistent: bool
    nijenhuis_residual: float
    all_pass: bool


@dataclass(frozen=True)
class ConservationReport:
    """Worst relative drift of each tensor under the flow of one field,
    over the sampled times."""

    drifts: dict[str, float]
    times: tuple[float, ...]

    @property
    def max_drift(self) -> float:
        return max(self.drifts.values())


def _transpose_perm(m: int) -> np.ndarray:
    return np.arange(m * m).reshape(m, m).T.ravel()


def bi_preserving_algebra(p: CompatiblePair,
                          tol: Tolerance | None = None) -> BiPreservingAlgebra:
    """Solve for all linear fields preserving both triples.

    Stacks the four matrix constraints as a homogeneous linear system over
    the dim^2 matrix entries and extracts an orthonormal null-space basis by
    SVD.  The dimension is cross-checked against the group signature (sum of
    squared ranks) and every basis element is re-verified to preserve both
    triples.
    """
    tol = tol or p.tol
    m = p.dim
    eye = np.eye(m)
    perm = _transpose_perm(m)
    tensors = (p.t1.g.m, p.t2.g.m, p.t1.omega.m, p.t2.omega.m)
    system = np.vstack([np.kron(tau, eye) + np.kron(eye, tau.T)[:, perm]
                        for tau in tensors])
    floor = 2.0 * max(op_norm(tau) for tau in tensors)
    vecs, _ = svd_null_space(system, tol.rel, floor=floor)
    mats = tuple(frozen(v.reshape(m, m)) for v in vecs)

    expected = sum(r * r for r in group_signature(decompose(p, tol)).multiplicities)
    if len(mats) != expected:
        raise DecompositionError(
            f"bi-preserving algebra has dimension {len(mats)}, expected "
            f"{expected} from the group signature"
        )
    for a in mats:
        f = LinearField(a)
        for t in (p.t1, p.t2):
            report = field_preserves(f, t, tol)
            if not report:
                raise DecompositionError(
                    "null-space element fails preservation (residuals "
                    f"{report.metric_residual:.3e}, {report.symplectic_residual:.3e})"
                )
    return BiPreservingAlgebra(p, mats, len(mats))


def recursion_basis(p: CompatiblePair) -> RecursionBasis:
    """The candidate commuting family T^k @ J1, k = 0 .. n-1.

    Built unconditionally; :func:`certify_recursion` decides whether it is
    an actual basis (full rank requires genericity).
    """
    n = p.dim // 2
    mats = []
    cur = p.t1.j.m
    for _ in range(n):
        mats.append(LinearField(cur))
        cur = p.recursion_operator @ cur
    return RecursionBasis(p, tuple(mats))


def certify_recursion(rb: RecursionBasis, p: CompatiblePair,
                      tol: Tolerance | None = None) -> RecursionCertificate:
    """Certify the recursion family: preservation of all four tensors,
    pairwise commutation, numerical rank with singular-value gap, the
    Vandermonde consistency between rank and the number of distinct
    recursion-operator eigenvalues, and the matrix Nijenhuis identity
    [T A, T] = T [A, T] for A = J1."""
    tol = tol or p.tol
    mats = rb.matrices
    n = p.dim // 2

    max_pres = 0.0
    for f in rb.fields:
        for t in (p.t1, p.t2):
            rep = field_preserves(f, t, tol)
            max_pres = max(max_pres, rep.metric_residual, rep.symplectic_residual)
    preserves_all = max_pres <= tol.rel

    max_comm = 0.0
    for i in range(len(mats)):
        for k in range(i + 1, len(mats)):
            scl = max(1.0, op_norm(mats[i]) * op_norm(mats[k]))
            max_comm = max(max_comm, op_norm(commutator(mats[i], mats[k])) / scl)
    commute = max_comm <= tol.rel

    # rank of the set of directions: normalize rows first, since the raw
    # powers of T scale like lambda^k and would swamp the threshold
    stacked = np.stack([m.ravel() / np.linalg.norm(m.ravel()) for m in mats])
    s = np.linalg.svd(stacked, compute_uv=False)
    thr = tol.rel * float(s[0])
    rank = int((s > thr).sum())
    if 0 < rank < s.size and s[rank] > 0.0:
        rank_gap = float(s[rank - 1] / s[rank])
    else:
        rank_gap = float("inf")

    t_evals, _ = eig_self_adjoint(p.recursion_operator, p.t1.g.m, tol)
    distinct = len(cluster_eigenvalues(t_evals, tol.cluster_gap))
    vandermonde_consistent = rank == min(distinct, n)

    big_t = p.recursion_operator
    a = p.t1.j.m
    nij = op_norm(commutator(big_t @ a, big_t) - big_t @ commutator(a, big_t))
    nij_ok = nij <= 1e-12 * max(1.0, op_norm(big_t) ** 2 * op_norm(a))

    return RecursionCertificate(
        preserves_all=preserves_all,
        max_preservation_residual=max_pres,
        commute=commute,
        max_commutator_residual=max_comm,
        rank=rank,
        expected_rank=n,
        singular_values=tuple(float(x) for x in s),
        rank_gap=rank_gap,
        distinct_t_eigenvalues=distinct,
        vandermonde_consistent=vandermonde_consistent,
        nijenhuis_residual=float(nij),
        all_pass=(preserves_all and commute and rank == n
                  and vandermonde_consistent and nij_ok),
    )


def flow(field: LinearField, t: float, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Time-t flow exp(t * A) of a linear field.

    When A @ A = -c^2 I (phase-generator-like fields) the closed form
    cos(c t) I + sin(c t) / c * A is used; otherwise the general scaling-and-
    squaring matrix exponential.  Overflow raises
    :class:`FlowOverflowError`.
    """
    t = float(t)
    if not np.isfinite(t):
        raise ValueError("time must be finite")
    a = field.matrix
    m = a.shape[0]
    if t == 0.0:
        return np.eye(m)
    a2 = a @ a
    c2 = -float(np.trace(a2)) / m
    if c2 > 0.0 and op_norm(a2 + c2 * np.eye(m)) <= tol.rel * max(1.0, op_norm(a2)):
        c = np.sqrt(c2)
        out = np.cos(c * t) * np.eye(m) + (np.sin(c * t) / c) * a
    else:
        with np.errstate(over="ignore", invalid="ignore"):
            out = scipy.linalg.expm(t * a)
    if not np.isfinite(out).all():
        raise FlowOverflowError(
            f"matrix exponential overflowed for t={t} (field norm {op_norm(a):.3e})"
        )
    return out


def conservation_probe(field: LinearField, p: CompatiblePair,
                       times) -> ConservationReport:
    """Finite-time invariance check: worst relative drift of each of the
    four tensors under the flow of the field, over the sampled times.

    Fields inside the bi-preserving algebra drift only at rounding level;
    for any other field the report documents how the tensors move.
    """
    times = tuple(float(t) for t in times)
    tensors = {
        "g1": p.t1.g.m,
        "g2": p.t2.g.m,
        "omega1": p.t1.omega.m,
        "omega2": p.t2.omega.m,
    }
    drifts = {name: 0.0 for name in tensors}
    for t in times:
        o = flow(field, t, p.tol)
        for name, tau in tensors.items():
            drift = op_norm(o.T @ tau @ o - tau) / op_norm(tau)
            drifts[name] = max(drifts[name], drift)
    return ConservationReport(drifts, times)
