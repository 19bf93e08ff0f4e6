"""Spectral structure of a unitary and the ergodic averages it generates.

A unitary u acts on matrices by conjugation x -> u x u*.  The fixed points
of that action form the commutant of u; averaging the conjugation orbit
(plain or weighted Cesaro means) converges to the projection onto that
commutant.  The complementary part of any operator is a coboundary
y - u y u*, and solve_coboundary inverts that relation explicitly in the
eigenbasis of u.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import matrixcore
from ._kernels import conj_weighted_sum
from .errors import ClusteringAmbiguityError, NotACoboundaryError
from .schedules import Schedule

DEFAULT_CLUSTER_TOL = 1e-8
COBOUNDARY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class UnitarySpectrum:
    """Clustered eigenstructure of a unitary.

    clusters pairs each representative eigenphase (in [0, 2pi)) with the
    orthogonal projector onto its eigenspace; basis holds orthonormal
    eigenvector columns with per-column phases and cluster labels for
    eigenbasis computations.
    """

    clusters: tuple[tuple[float, np.ndarray], ...]
    cluster_tol: float
    basis: np.ndarray
    col_phases: np.ndarray
    col_labels: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[0]


def spectrum(u, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> UnitarySpectrum:
    """Eigenphase clusters and spectral projectors of a unitary.

    Phases closer than cluster_tol along the circle are merged into one
    cluster.  A chain of pairwise-close phases that spans more than
    cluster_tol admits no consistent grouping and raises
    ClusteringAmbiguityError.
    """
    arr = matrixcore.as_operator(u, "u")
    if not np.isfinite(cluster_tol) or cluster_tol <= 0:
        raise ValueError("cluster_tol must be positive and finite")
    if not matrixcore.is_unitary(arr):
        raise ValueError(
            "u is not unitary within %.1e in operator norm" % matrixcore.UNITARITY_TOL
        )
    tri, vecs = scipy.linalg.schur(arr, output="complex")
    phases = np.angle(np.diag(tri)) % (2 * np.pi)
    d = arr.shape[0]
    order = np.argsort(phases, kind="stable")
    sorted_phases = phases[order]
    gaps = np.diff(sorted_phases)
    wrap_gap = 2 * np.pi - sorted_phases[-1] + sorted_phases[0]
    circular_gaps = np.append(gaps, wrap_gap)

    if d == 1:
        chains = [[0]]
    elif (circular_gaps <= cluster_tol).all():
        raise ClusteringAmbiguityError(sorted_phases, cluster_tol)
    else:
        start = int(np.argmax(circular_gaps > cluster_tol)) + 1
        chains = [[start % d]]
        for step in range(1, d):
            pos = (start + step) % d
            prev = (start + step - 1) % d
            if circular_gaps[prev] <= cluster_tol:
                chains[-1].append(pos)
            else:
                chains.append([pos])

    labels = np.empty(d, dtype=np.int64)
    reps = []
    projectors = []
    for chain in chains:
        base = sorted_phases[chain[0]]
        offsets = np.array(
            [(sorted_phases[i] - base) % (2 * np.pi) for i in chain]
        )
        if offsets.max() > cluster_tol:
            raise ClusteringAmbiguityError(sorted_phases[chain], cluster_tol)
        reps.append((base + offsets.mean()) % (2 * np.pi))
        cols = order[chain]
        block = vecs[:, cols]
        projectors.append(block @ block.conj().T)
        labels[cols] = len(reps) - 1

    rank = np.argsort(np.asarray(reps), kind="stable")
    relabel = np.empty(len(reps), dtype=np.int64)
    relabel[rank] = np.arange(len(reps))
    clusters = tuple(
        (float(reps[i]), np.ascontiguousarray(projectors[i])) for i in rank
    )
    return UnitarySpectrum(
        clusters=clusters,
        cluster_tol=float(cluster_tol),
        basis=np.ascontiguousarray(vecs),
        col_phases=phases,
        col_labels=relabel[labels],
    )


def commutant_project(spec: UnitarySpectrum, x) -> np.ndarray:
    """Projection of x onto the commutant of u: sum of P x P over the
    spectral projectors P of u."""
    arr = matrixcore.as_operator(x, "x")
    if arr.shape[0] != spec.dim:
        raise ValueError(
            f"dimension mismatch: x is {arr.shape[0]}, spectrum is {spec.dim}"
        )
    out = np.zeros_like(arr)
    for _phase, proj in spec.clusters:
        out += proj @ arr @ proj
    return out


def cesaro_mean(u, x, n: int) -> np.ndarray:
    """Average of u^k x (u^k)* for k = 1..n."""
    uu = matrixcore.as_operator(u, "u")
    xx = matrixcore.as_operator(x, "x")
    if uu.shape != xx.shape:
        raise ValueError("u and x must share a dimension")
    if not matrixcore.is_unitary(uu):
        raise ValueError("u is not unitary")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError("n must be a positive integer")
    return conj_weighted_sum(uu, xx, np.full(int(n), 1.0 / n))


def weighted_cesaro_mean(u, x, s: Schedule) -> np.ndarray:
    """Schedule-weighted average: sum of s.weights[k-1] * u^k x (u^k)*."""
    uu = matrixcore.as_operator(u, "u")
    xx = matrixcore.as_operator(x, "x")
    if uu.shape != xx.shape:
        raise ValueError("u and x must share a dimension")
    if not matrixcore.is_unitary(uu):
        raise ValueError("u is not unitary")
    if not isinstance(s, Schedule):
        raise ValueError("s must be a Schedule")
    return conj_weighted_sum(uu, xx, s.weights)


@dataclass(frozen=True, eq=False)
class YosidaSplit:
    """Decomposition x = fixed_part + (potential - u potential u*).

    fixed_part lies in the commutant of u; the remainder is the coboundary
    of the potential, which carries no commutant component (the gauge that
    minimizes its Hilbert-Schmidt norm).
    """

    fixed_part: np.ndarray
    coboundary_part: np.ndarray
    potential: np.ndarray


def solve_coboundary(spec: UnitarySpectrum, w) -> np.ndarray:
    """Solve y - u y u* = w for the potential y.

    Requires w to have (numerically) no commutant component; otherwise no
    solution exists and NotACoboundaryError reports the offending norm.
    The returned y has zero commutant component itself, which pins down
    the otherwise free gauge.
    """
    arr = matrixcore.as_operator(w, "w")
    if arr.shape[0] != spec.dim:
        raise ValueError(
            f"dimension mismatch: w is {arr.shape[0]}, spectrum is {spec.dim}"
        )
    resid = matrixcore.op_norm(commutant_project(spec, arr))
    if resid >= COBOUNDARY_TOL:
        raise NotACoboundaryError(resid)
    basis = spec.basis
    in_eigenbasis = basis.conj().T @ arr @ basis
    lam = np.exp(1j * spec.col_phases)
    divisors = 1.0 - np.outer(lam, lam.conj())
    cross = spec.col_labels[:, None] != spec.col_labels[None, :]
    solved = np.zeros_like(in_eigenbasis)
    solved[cross] = in_eigenbasis[cross] / divisors[cross]
    return basis @ solved @ basis.conj().T


def yosida_split(spec: UnitarySpectrum, x) -> YosidaSplit:
    """Split x into its commutant projection and a coboundary with an
    explicit potential."""
    arr = matrixcore.as_operator(x, "x")
    fixed = commutant_project(spec, arr)
    coboundary = arr - fixed
    potential = solve_coboundary(spec, coboundary)
    return YosidaSplit(
        fixed_part=fixed, coboundary_part=coboundary, potential=potential
    )
