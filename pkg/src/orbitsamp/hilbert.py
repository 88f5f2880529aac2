"""Finite-dimensional model of the ambient space.

Complex vectors, invertible operators with cached inverses and cached
integer powers, inner products, Gram matrices, and the cross-correlation
sequences ``r(k) = <T^k a, b>`` that drive the sampling constructions.

Everything here is immutable after construction and side-effect free, so
callers may evaluate powers and correlations in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "RANK_TOL",
    "MAX_POWER",
    "DimensionMismatch",
    "PowerBoundExceeded",
    "inner",
    "LinearOperator",
    "CrossCorrelation",
    "apply_power",
    "cross_correlation",
    "gram_matrix",
]

RANK_TOL = 1e-10
MAX_POWER = 4096


class DimensionMismatch(ValueError):
    pass


class PowerBoundExceeded(ValueError):
    pass


def as_cvector(v, dim=None):
    """Coerce to a 1-d complex array, optionally checking its dimension."""
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def inner(x, y):
    """Standard complex inner product, conjugate-linear in the second slot."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != y.shape:
        raise DimensionMismatch(f"shapes {x.shape} and {y.shape} differ")
    return complex(np.vdot(y, x))


class LinearOperator:
    """Invertible operator on C^dim with a cached inverse and power table.

    The inverse is computed once at construction; negative powers reuse it
    rather than solving per call, because matrix assembly walks many powers.
    ``max_power`` bounds ``|k|`` as a guard against runaway loops.
    """

    def __init__(self, matrix, *, rank_tol=RANK_TOL, max_power=MAX_POWER):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator matrix must be square, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator entries must be finite")
        sv = np.linalg.svd(m, compute_uv=False)
        if sv[-1] <= rank_tol * sv[0]:
            ratio = sv[-1] / sv[0] if sv[0] > 0 else 0.0
            raise ValueError(
                f"matrix is numerically singular (sigma_min/sigma_max = {ratio:.3e})"
            )
        inv = np.linalg.inv(m)
        dim = m.shape[0]
        resid = np.max(np.abs(inv @ m - np.eye(dim)))
        if resid > 1e-10:
            raise ValueError(f"inverse verification failed (residual {resid:.3e})")
        self.matrix = m
        self.inv_matrix = inv
        self.dim = dim
        self.rank_tol = float(rank_tol)
        self.max_power = int(max_power)
        self._powers = {0: np.eye(dim, dtype=complex), 1: m, -1: inv}

    @property
    def adjoint(self):
        return self.matrix.conj().T

    def power(self, k):
        """Matrix of T^k, built by repeated multiplication and cached."""
        k = int(k)
        if abs(k) > self.max_power:
            raise PowerBoundExceeded(f"|{k}| exceeds the configured bound {self.max_power}")
        if k not in self._powers:
            step = self.matrix if k > 0 else self.inv_matrix
            sign = 1 if k > 0 else -1
            j = sign * max((abs(i) for i in self._powers if i * sign > 0), default=0)
            acc = self._powers[j]
            while j != k:
                acc = acc @ step
                j += sign
                self._powers[j] = acc
        return self._powers[k]

    def apply_power(self, k, v):
        v = as_cvector(v, self.dim)
        if k == 0:
            return v
        return self.power(k) @ v

    def __repr__(self):
        return f"LinearOperator(dim={self.dim})"


def apply_power(op, k, v):
    """Apply T^k to a vector (k may be negative; k = 0 returns the input)."""
    return op.apply_power(k, v)


@dataclass(frozen=True, eq=False)
class CrossCorrelation:
    """Values of ``<T^k a, b>`` on a contiguous window of integers ``k``.

    When ``period`` is set, lookups reduce the index modulo the period into
    the stored window, which must then cover at least one full period.
    """

    k_start: int
    values: np.ndarray
    period: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        if self.values.ndim != 1 or self.values.size == 0:
            raise ValueError("window must be a nonempty vector")
        if self.period is not None:
            if self.period < 1:
                raise ValueError("period must be positive")
            if self.values.size < self.period:
                raise ValueError("window must cover at least one full period")
            scale = max(np.max(np.abs(self.values)), 1.0)
            for i in range(self.values.size - self.period):
                if abs(self.values[i] - self.values[i + self.period]) > 1e-8 * scale:
                    raise ValueError("stored window is not consistent with the declared period")

    def window(self):
        return range(self.k_start, self.k_start + self.values.size)

    def at(self, k):
        i = k - self.k_start
        if self.period is not None:
            i %= self.period
        if not 0 <= i < self.values.size:
            raise IndexError(f"index {k} outside the stored window")
        return complex(self.values[i])


def cross_correlation(op, a, b, k_range, *, period=None):
    """Sequence ``r(k) = <T^k a, b>`` over a contiguous range of powers."""
    ks = list(k_range)
    if not ks:
        raise ValueError("k_range must be nonempty")
    if any(ks[i + 1] - ks[i] != 1 for i in range(len(ks) - 1)):
        raise ValueError("k_range must be contiguous ascending integers")
    a = as_cvector(a, op.dim)
    b = as_cvector(b, op.dim)
    vals = np.array([inner(op.apply_power(k, a), b) for k in ks])
    return CrossCorrelation(k_start=ks[0], values=vals, period=period)


def gram_matrix(vectors):
    """Gram matrix with entry ``(k, l) = <v_l, v_k>``; Hermitian PSD."""
    if len(vectors) == 0:
        raise ValueError("need at least one vector")
    dim = np.asarray(vectors[0]).shape[0]
    cols = [as_cvector(v, dim) for v in vectors]
    V = np.column_stack(cols)
    return V.conj().T @ V
