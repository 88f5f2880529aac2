"""Sampling and reconstruction in finite-dimensional operator-orbit subspaces.

A generator family ``a_1..a_L`` with orbit periods ``N_1..N_L`` spans the
subspace, samplers ``b_1..b_s`` are read every ``r`` steps, and the
cross-correlation matrix ``R`` they induce decides recoverability by its
rank.  A left inverse of ``R`` whose columns are blockwise cyclic shifts of
each sampler's first column yields reconstruction vectors ``c_j`` such that
``x = sum_{j,n} sample(j, n) T^{r n} c_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hilbert import (
    RANK_TOL,
    DimensionMismatch,
    LinearOperator,
    as_cvector,
    cross_correlation,
    inner,
)

__all__ = [
    "CyclicSubspaceSpec",
    "SamplingScheme",
    "SampleMatrix",
    "RankReport",
    "StructuredLeftInverse",
    "ReconstructionBasis",
    "RankDeficiencyError",
    "LeftInverseError",
    "build_sample_matrix",
    "take_samples",
    "check_rank",
    "structurize_left_inverse",
    "reconstruction_vectors",
    "reconstruct",
    "filter_bank_coefficients",
    "is_r_circulant",
    "project_onto_subspace",
]


class RankDeficiencyError(ValueError):
    pass


class LeftInverseError(ValueError):
    pass


@dataclass
class CyclicSubspaceSpec:
    """Operator plus generators of declared orbit periods.

    Construction verifies that ``T^{N_l} a_l == a_l`` within ``period_tol``
    relative and that the combined orbit family is linearly independent.
    """

    operator: LinearOperator
    generators: list
    orders: list
    period_tol: float = 1e-8
    rank_tol: float = RANK_TOL
    _orbit: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.generators) == 0 or len(self.generators) != len(self.orders):
            raise ValueError("need one positive order per generator")
        self.generators = [as_cvector(a, self.operator.dim) for a in self.generators]
        self.orders = [int(n) for n in self.orders]
        if any(n < 1 for n in self.orders):
            raise ValueError("orders must be positive")
        for a, n in zip(self.generators, self.orders):
            drift = np.linalg.norm(self.operator.apply_power(n, a) - a)
            if drift > self.period_tol * np.linalg.norm(a):
                raise ValueError(
                    f"generator is not fixed by T^{n} (relative drift {drift:.3e})"
                )
        cols = []
        for a, n in zip(self.generators, self.orders):
            v = a
            for _ in range(n):
                cols.append(v)
                v = self.operator.matrix @ v
        orbit = np.column_stack(cols)
        sv = np.linalg.svd(orbit, compute_uv=False)
        if sv[-1] <= self.rank_tol * sv[0]:
            raise RankDeficiencyError(
                f"orbit vectors are linearly dependent (sigma ratio {sv[-1] / sv[0]:.3e})"
            )
        self._orbit = orbit

    @property
    def lcm_order(self):
        return math.lcm(*self.orders)

    @property
    def total_order(self):
        return sum(self.orders)

    @property
    def num_generators(self):
        return len(self.generators)

    def column_offsets(self):
        return np.concatenate(([0], np.cumsum(self.orders)))

    def orbit_matrix(self):
        """Columns ``T^k a_l`` for ``0 <= k < N_l``, generator blocks in order."""
        return self._orbit

    def synthesize(self, coeffs):
        """Map stacked orbit coefficients to the ambient vector they define."""
        coeffs = as_cvector(coeffs, self.total_order)
        return self._orbit @ coeffs

    def coefficients_of(self, x):
        """Stacked orbit coefficients of an element of the subspace."""
        x = as_cvector(x, self.operator.dim)
        sol, *_ = np.linalg.lstsq(self._orbit, x, rcond=None)
        return sol


@dataclass
class SamplingScheme:
    """Samplers read every ``r`` operator steps, ``ell`` reads per sampler."""

    samplers: list
    r: int
    ell: int

    @classmethod
    def for_spec(cls, spec, samplers, r):
        r = int(r)
        N = spec.lcm_order
        if r < 1 or N % r != 0:
            raise ValueError(f"sampling period {r} must divide the orbit period {N}")
        samplers = [as_cvector(b, spec.operator.dim) for b in samplers]
        if not samplers:
            raise ValueError("need at least one sampler")
        return cls(samplers=samplers, r=r, ell=N // r)

    @property
    def s(self):
        return len(self.samplers)


@dataclass
class SampleMatrix:
    """The ``s*ell x sum(N_l)`` sampling matrix, blockwise r-circulant."""

    matrix: np.ndarray
    r: int
    ell: int
    orders: tuple
    lcm_order: int

    @property
    def s(self):
        return self.matrix.shape[0] // self.ell

    @property
    def rows(self):
        return self.matrix.shape[0]

    @property
    def cols(self):
        return self.matrix.shape[1]

    def column_offsets(self):
        return np.concatenate(([0], np.cumsum(self.orders)))

    def block(self, j, l):
        offs = self.column_offsets()
        return self.matrix[j * self.ell : (j + 1) * self.ell, offs[l] : offs[l + 1]]


def build_sample_matrix(spec, scheme):
    """Assemble ``R`` from the cross-correlations of generators and samplers.

    Block ``(j, l)`` holds ``r_{a_l,b_j}(N - r*n + k)`` at row ``n``, column
    ``k``, indices reduced modulo ``N_l``.  Rows group all ``ell`` reads of
    the first sampler, then the second, and so on.
    """
    op = spec.operator
    N = spec.lcm_order
    r, ell = scheme.r, scheme.ell
    blocks = []
    for b in scheme.samplers:
        row_blocks = []
        for a, Nl in zip(spec.generators, spec.orders):
            cc = cross_correlation(op, a, b, range(Nl), period=Nl)
            block = np.empty((ell, Nl), dtype=complex)
            for n in range(ell):
                for k in range(Nl):
                    block[n, k] = cc.values[(N - r * n + k) % Nl]
            row_blocks.append(block)
        blocks.append(np.hstack(row_blocks))
    matrix = np.vstack(blocks)
    return SampleMatrix(
        matrix=matrix, r=r, ell=ell, orders=tuple(spec.orders), lcm_order=N
    )


def take_samples(spec, scheme, x):
    """Generalized samples ``<x, (T*)^{-r n} b_j>``, ordered to match ``R``.

    Well defined for any ambient ``x``; when ``x`` lies outside the subspace
    the downstream reconstruction returns the frame expansion of its
    projection.
    """
    op = spec.operator
    x = as_cvector(x, op.dim)
    r, ell, s = scheme.r, scheme.ell, scheme.s
    step = op.power(-r)
    out = np.empty(s * ell, dtype=complex)
    z = x
    for n in range(ell):
        for j, b in enumerate(scheme.samplers):
            out[j * ell + n] = inner(z, b)
        z = step @ z
    return out


@dataclass(frozen=True)
class RankReport:
    full_rank: bool
    rank: int
    cols: int
    singular_values: np.ndarray


def check_rank(R, rank_tol=RANK_TOL):
    """Numerical rank of the sampling matrix via SVD, values descending."""
    sv = np.linalg.svd(R.matrix, compute_uv=False)
    rank = int(np.sum(sv > rank_tol * sv[0])) if sv.size and sv[0] > 0 else 0
    return RankReport(
        full_rank=rank == R.cols, rank=rank, cols=R.cols, singular_values=sv
    )


@dataclass
class StructuredLeftInverse:
    """Left inverse of ``R`` whose columns are blockwise cyclic shifts.

    Column ``(j, n)`` equals column ``(j, 0)`` shifted down ``r*n`` positions
    within each generator block (wraparound modulo ``N_l``), exactly: the
    construction permutes stored entries rather than recomputing them.
    """

    entries: np.ndarray
    r: int
    ell: int
    orders: tuple

    @property
    def s(self):
        return self.entries.shape[1] // self.ell

    def column_offsets(self):
        return np.concatenate(([0], np.cumsum(self.orders)))

    def first_column(self, j):
        return self.entries[:, j * self.ell]

    def block(self, j, l):
        offs = self.column_offsets()
        return self.entries[offs[l] : offs[l + 1], j * self.ell : (j + 1) * self.ell]

    def residual(self, R):
        return float(np.max(np.abs(self.entries @ R.matrix - np.eye(R.cols))))


def _structured_first_column(H, R, j):
    offs = R.column_offsets()
    r, ell = R.r, R.ell
    base = np.empty(R.cols, dtype=complex)
    for l, Nl in enumerate(R.orders):
        block = H[offs[l] : offs[l + 1], j * ell : (j + 1) * ell]
        if Nl <= r:
            base[offs[l] : offs[l + 1]] = block[:, 0]
        else:
            top = block[:r, :]
            col = np.empty(Nl, dtype=complex)
            for p in range(Nl):
                i, q = divmod(p, r)
                col[p] = top[q, (-i) % ell]
            base[offs[l] : offs[l + 1]] = col
    return base


def structurize_left_inverse(R, H=None, *, U=None, tol=1e-10):
    """Build a structured left inverse of ``R`` from a left-inverse seed.

    The seed defaults to the Moore-Penrose pseudo-inverse (SVD); passing
    ``U`` selects the member ``pinv + U @ (I - R @ pinv)`` of the left-inverse
    family instead, and an explicit ``H`` overrides both.  Per sampler, the
    first ``min(N_l, r)`` rows of each generator block of the seed are
    concatenated in cyclic column order into column ``(j, 0)``; every other
    column is its exact blockwise down-shift.

    Raises ``LeftInverseError`` when the seed is not a left inverse of ``R``
    within ``tol``, or when the shifted columns fail to form one (possible
    for multi-generator problems with seeds whose blocks lack the cyclic
    structure; the default seed always works).
    """
    Rm = R.matrix
    eye = np.eye(R.cols)
    report = check_rank(R, rank_tol=min(tol, RANK_TOL))
    if not report.full_rank:
        raise RankDeficiencyError(
            f"R has rank {report.rank} < {report.cols}; no left inverse exists"
        )
    if H is None:
        pinv = np.linalg.pinv(Rm)
        if U is None:
            H = pinv
        else:
            U = np.asarray(U, dtype=complex)
            if U.shape != (R.cols, R.rows):
                raise DimensionMismatch(
                    f"U must have shape {(R.cols, R.rows)}, got {U.shape}"
                )
            H = pinv + U @ (np.eye(R.rows) - Rm @ pinv)
    else:
        H = np.asarray(H, dtype=complex)
        if H.shape != (R.cols, R.rows):
            raise DimensionMismatch(f"H must have shape {(R.cols, R.rows)}, got {H.shape}")
    seed_resid = np.max(np.abs(H @ Rm - eye))
    if seed_resid > tol:
        raise LeftInverseError(
            f"seed is not a left inverse of R (residual {seed_resid:.3e})"
        )

    offs = R.column_offsets()
    out = np.empty((R.cols, R.rows), dtype=complex)
    for j in range(R.s):
        base = _structured_first_column(H, R, j)
        for n in range(R.ell):
            col = np.empty(R.cols, dtype=complex)
            for l, Nl in enumerate(R.orders):
                seg = base[offs[l] : offs[l + 1]]
                col[offs[l] : offs[l + 1]] = np.roll(seg, (R.r * n) % Nl)
            out[:, j * R.ell + n] = col
    result = StructuredLeftInverse(entries=out, r=R.r, ell=R.ell, orders=R.orders)
    resid = result.residual(R)
    if resid > tol:
        raise LeftInverseError(
            f"structured columns are not a left inverse (residual {resid:.3e}); "
            "the seed's blocks lack the cyclic structure"
        )
    return result


@dataclass
class ReconstructionBasis:
    """Ambient vectors ``c_j`` whose shifted orbit reproduces the subspace."""

    vectors: list


def reconstruction_vectors(spec, hs):
    """Synthesize ``c_j`` from column ``(j, 0)`` of the structured inverse."""
    orbit = spec.orbit_matrix()
    vectors = [orbit @ hs.first_column(j) for j in range(hs.s)]
    return ReconstructionBasis(vectors=vectors)


def reconstruct(spec, scheme, basis, samples):
    """Evaluate ``sum_{j,n} samples(j, n) T^{r n} c_j`` by a Horner walk."""
    samples = as_cvector(samples, scheme.s * scheme.ell)
    op = spec.operator
    Tr = op.power(scheme.r)
    x = np.zeros(op.dim, dtype=complex)
    for n in reversed(range(scheme.ell)):
        w = np.zeros(op.dim, dtype=complex)
        for j, c in enumerate(basis.vectors):
            w += samples[j * scheme.ell + n] * c
        x = Tr @ x + w
    return x


def filter_bank_coefficients(hs, samples, spec):
    """Per-generator coefficients via periodic convolution with ``h_{j,0}``.

    ``alpha_l(m) = sum_{j,n} samples(j, n) beta_j^l(m - r*n)`` with each
    ``beta_j^l`` extended ``N_l``-periodically; identical (up to summation
    order) to the matrix product of the structured inverse with the samples.
    """
    samples = as_cvector(samples, hs.s * hs.ell)
    offs = hs.column_offsets()
    out = []
    for l, Nl in enumerate(hs.orders):
        alpha = np.zeros(Nl, dtype=complex)
        for j in range(hs.s):
            beta = hs.entries[offs[l] : offs[l + 1], j * hs.ell]
            for n in range(hs.ell):
                alpha += samples[j * hs.ell + n] * np.roll(beta, (hs.r * n) % Nl)
        out.append(alpha)
    return out


def is_r_circulant(C, block_rows, r, *, col_periods=None, tol=1e-12):
    """Whether every ``block_rows``-row block advances by ``r`` per row.

    Checks ``C[m, k] == C[m-1, k-r]`` with the row index wrapping inside its
    block and the column index wrapping inside each period block (a single
    full-width block by default).
    """
    C = np.asarray(C, dtype=complex)
    rows, cols = C.shape
    if block_rows < 1 or rows % block_rows != 0:
        raise ValueError("row count must be a multiple of block_rows")
    if col_periods is None:
        col_periods = [cols]
    if sum(col_periods) != cols:
        raise ValueError("column periods must tile the column count")
    target = np.empty_like(C)
    for i in range(rows // block_rows):
        blk = C[i * block_rows : (i + 1) * block_rows]
        target[i * block_rows : (i + 1) * block_rows] = np.roll(blk, 1, axis=0)
    off = 0
    for Nl in col_periods:
        target[:, off : off + Nl] = np.roll(target[:, off : off + Nl], r % Nl, axis=1)
        off += Nl
    return bool(np.max(np.abs(C - target)) <= tol)


def project_onto_subspace(spec, v):
    """Orthogonal projection onto the orbit span via the normal equations."""
    v = as_cvector(v, spec.operator.dim)
    B = spec.orbit_matrix()
    G = B.conj().T @ B
    try:
        gamma = np.linalg.solve(G, B.conj().T @ v)
    except np.linalg.LinAlgError as exc:
        raise RankDeficiencyError("orbit Gram matrix is singular") from exc
    return B @ gamma
