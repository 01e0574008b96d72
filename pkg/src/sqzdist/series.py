"""Truncated multivariate power series with per-variable and total-degree caps.

Coefficients are stored densely in an ndarray indexed by the multi-index
``m = (m_1, ..., m_M)``; entry ``m`` is the coefficient of ``prod_l lam_l**m_l``.
Terms with ``m_l > cap_l`` or ``|m| > total`` are dropped, never wrapped.
Products only visit nonzero source coefficients, so structural zeros (for
example odd total degrees of an even function) stay exactly zero.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import product

import numpy as np

from .errors import CapMismatch, NonzeroConstantTerm, SingularAtOrigin

SINGULAR_COND = 1e12


@lru_cache(maxsize=64)
def _degree_grid(caps: tuple) -> np.ndarray:
    if not caps:
        return np.zeros((), dtype=int)
    grids = np.meshgrid(*[np.arange(c + 1) for c in caps], indexing="ij")
    deg = sum(grids)
    deg.setflags(write=False)
    return deg


def _normalize_caps(caps) -> tuple:
    caps = tuple(int(c) for c in caps)
    if any(c < 0 for c in caps):
        raise ValueError("degree caps must be non-negative")
    return caps


def _truncated_product(A: np.ndarray, B: np.ndarray, caps: tuple, total: int) -> np.ndarray:
    """Cauchy product of matrix-valued series ``A (p,q,*box)`` and ``B (q,s,*box)``."""
    deg = _degree_grid(caps)
    p, s = A.shape[0], B.shape[1]
    out = np.zeros((p, s) + A.shape[2:], dtype=complex)
    a_nz = np.any(A != 0, axis=(0, 1)) & (deg <= total)
    b_nz = np.any(B != 0, axis=(0, 1))
    if not a_nz.any() or not b_nz.any():
        return out
    b_min = int(deg[b_nz].min())
    lead = (slice(None), slice(None))
    for idx in zip(*np.nonzero(a_nz & (deg <= total - b_min))):
        a = A[lead + idx]
        src = B[lead + tuple(slice(0, c + 1 - i) for i, c in zip(idx, caps))]
        dst = lead + tuple(slice(i, c + 1) for i, c in zip(idx, caps))
        out[dst] += np.tensordot(a, src, axes=(1, 0))
    out[..., deg > total] = 0
    return out


class TruncatedSeries:
    """Scalar truncated power series in ``len(caps)`` variables."""

    __slots__ = ("coeffs", "total")
    __array_ufunc__ = None

    def __init__(self, coeffs, total: int | None = None):
        coeffs = np.array(coeffs, dtype=complex)
        caps = tuple(d - 1 for d in coeffs.shape)
        self.total = sum(caps) if total is None else int(total)
        coeffs[_degree_grid(caps) > self.total] = 0
        self.coeffs = coeffs

    @classmethod
    def zeros(cls, caps, total=None) -> "TruncatedSeries":
        caps = _normalize_caps(caps)
        return cls(np.zeros(tuple(c + 1 for c in caps), dtype=complex), total)

    @classmethod
    def constant(cls, value, caps, total=None) -> "TruncatedSeries":
        out = cls.zeros(caps, total)
        out.coeffs[(0,) * len(out.caps)] = value
        return out

    @classmethod
    def variable(cls, l: int, caps, total=None) -> "TruncatedSeries":
        """The series ``lam_l`` (zero when ``cap_l == 0``: that variable is frozen at 0)."""
        out = cls.zeros(caps, total)
        if out.caps[l] >= 1 and out.total >= 1:
            idx = [0] * len(out.caps)
            idx[l] = 1
            out.coeffs[tuple(idx)] = 1.0
        return out

    @property
    def caps(self) -> tuple:
        return tuple(d - 1 for d in self.coeffs.shape)

    @property
    def nvars(self) -> int:
        return self.coeffs.ndim

    def _check(self, other: "TruncatedSeries"):
        if self.caps != other.caps or self.total != other.total:
            raise CapMismatch(f"caps {self.caps}/{self.total} vs {other.caps}/{other.total}")

    def __getitem__(self, index) -> complex:
        index = tuple(int(i) for i in index)
        if len(index) != self.nvars:
            raise IndexError(f"expected a multi-index of length {self.nvars}")
        if any(i < 0 or i > c for i, c in zip(index, self.caps)) or sum(index) > self.total:
            return 0j
        return complex(self.coeffs[index])

    def items(self):
        """Nonzero ``(multi_index, coefficient)`` pairs in lexicographic order."""
        for idx in zip(*np.nonzero(self.coeffs)):
            yield tuple(int(i) for i in idx), complex(self.coeffs[idx])

    @property
    def constant_term(self) -> complex:
        return complex(self.coeffs[(0,) * self.nvars])

    def min_degree(self) -> int | None:
        nz = self.coeffs != 0
        if not nz.any():
            return None
        return int(_degree_grid(self.caps)[nz].min())

    def copy(self) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs.copy(), self.total)

    def conj(self) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs.conj(), self.total)

    def __neg__(self):
        return TruncatedSeries(-self.coeffs, self.total)

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return TruncatedSeries(self.coeffs + other.coeffs, self.total)
        out = self.copy()
        out.coeffs[(0,) * self.nvars] += other
        return out

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            self._check(other)
            prod = _truncated_product(self.coeffs[None, None], other.coeffs[None, None], self.caps, self.total)
            return TruncatedSeries(prod[0, 0], self.total)
        return TruncatedSeries(self.coeffs * other, self.total)

    def __rmul__(self, other):
        return TruncatedSeries(self.coeffs * other, self.total)

    def __truediv__(self, other):
        return TruncatedSeries(self.coeffs / other, self.total)

    def evaluate(self, point) -> complex:
        """Sum the stored terms at a numeric point."""
        point = np.asarray(point, dtype=complex)
        acc = self.coeffs
        for x in point:
            acc = np.polynomial.polynomial.polyval(x, acc)
        return complex(acc)

    def allclose(self, other: "TruncatedSeries", atol=1e-12) -> bool:
        self._check(other)
        return bool(np.allclose(self.coeffs, other.coeffs, rtol=0, atol=atol))

    def __repr__(self):
        terms = ", ".join(f"{m}: {c:.6g}" for m, c in list(self.items())[:8])
        more = "" if np.count_nonzero(self.coeffs) <= 8 else ", ..."
        return f"TruncatedSeries(caps={self.caps}, total={self.total}, {{{terms}{more}}})"


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    a._check(b)
    return a + b


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    a._check(b)
    return a * b


class SeriesMatrix:
    """Square matrix whose entries are truncated series sharing one cap set."""

    __slots__ = ("coeffs", "total")
    __array_ufunc__ = None

    def __init__(self, coeffs, total: int | None = None):
        coeffs = np.array(coeffs, dtype=complex)
        if coeffs.ndim < 2 or coeffs.shape[0] != coeffs.shape[1]:
            raise ValueError("series matrix coefficients must have shape (n, n, *box)")
        caps = tuple(d - 1 for d in coeffs.shape[2:])
        self.total = sum(caps) if total is None else int(total)
        coeffs[..., _degree_grid(caps) > self.total] = 0
        self.coeffs = coeffs

    @classmethod
    def zeros(cls, n: int, caps, total=None) -> "SeriesMatrix":
        caps = _normalize_caps(caps)
        return cls(np.zeros((n, n) + tuple(c + 1 for c in caps), dtype=complex), total)

    @classmethod
    def from_terms(cls, constant, linear, caps, total=None) -> "SeriesMatrix":
        """``constant + sum_l linear[l] * lam_l`` for numeric ``n x n`` matrices."""
        caps = _normalize_caps(caps)
        constant = np.asarray(constant, dtype=complex)
        out = cls.zeros(constant.shape[0], caps, total)
        out.coeffs[(slice(None), slice(None)) + (0,) * len(caps)] = constant
        if out.total >= 1:
            for l, mat in enumerate(linear):
                if caps[l] >= 1:
                    idx = [0] * len(caps)
                    idx[l] = 1
                    out.coeffs[(slice(None), slice(None)) + tuple(idx)] += mat
        return out

    @classmethod
    def block(cls, rows) -> "SeriesMatrix":
        first = rows[0][0]
        coeffs = np.concatenate([np.concatenate([m.coeffs for m in row], axis=1) for row in rows], axis=0)
        return cls(coeffs, first.total)

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    @property
    def caps(self) -> tuple:
        return tuple(d - 1 for d in self.coeffs.shape[2:])

    def _check(self, other: "SeriesMatrix"):
        if self.caps != other.caps or self.total != other.total or self.n != other.n:
            raise CapMismatch("series matrices differ in size or caps")

    def identity(self) -> "SeriesMatrix":
        return SeriesMatrix.from_terms(np.eye(self.n), [], self.caps, self.total)

    @property
    def constant_term(self) -> np.ndarray:
        return self.coeffs[(slice(None), slice(None)) + (0,) * len(self.caps)].copy()

    def entry(self, i: int, j: int) -> TruncatedSeries:
        return TruncatedSeries(self.coeffs[i, j], self.total)

    def trace(self) -> TruncatedSeries:
        return TruncatedSeries(np.trace(self.coeffs, axis1=0, axis2=1), self.total)

    def min_degree(self) -> int | None:
        nz = np.any(self.coeffs != 0, axis=(0, 1))
        if not nz.any():
            return None
        return int(_degree_grid(self.caps)[nz].min())

    def conj(self) -> "SeriesMatrix":
        return SeriesMatrix(self.coeffs.conj(), self.total)

    def __neg__(self):
        return SeriesMatrix(-self.coeffs, self.total)

    def __add__(self, other):
        self._check(other)
        return SeriesMatrix(self.coeffs + other.coeffs, self.total)

    def __sub__(self, other):
        self._check(other)
        return SeriesMatrix(self.coeffs - other.coeffs, self.total)

    def __mul__(self, scalar):
        return SeriesMatrix(self.coeffs * scalar, self.total)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, SeriesMatrix):
            self._check(other)
            return SeriesMatrix(_truncated_product(self.coeffs, other.coeffs, self.caps, self.total), self.total)
        other = np.asarray(other, dtype=complex)
        return SeriesMatrix(np.tensordot(self.coeffs, other, axes=(1, 0)).transpose(self._right_perm()), self.total)

    def __rmatmul__(self, other):
        other = np.asarray(other, dtype=complex)
        return SeriesMatrix(np.tensordot(other, self.coeffs, axes=(1, 0)), self.total)

    def _right_perm(self):
        nd = self.coeffs.ndim
        return (0, nd - 1) + tuple(range(1, nd - 1))

    def evaluate(self, point) -> np.ndarray:
        return np.array([[self.entry(i, j).evaluate(point) for j in range(self.n)] for i in range(self.n)])


def _shift_constant(Ms: SeriesMatrix):
    X0 = Ms.constant_term
    Q = np.eye(Ms.n) - X0
    if not np.all(np.isfinite(Q)) or np.linalg.cond(Q) > SINGULAR_COND:
        raise SingularAtOrigin("I - Ms(0) is singular")
    Qinv = np.linalg.inv(Q)
    rest = SeriesMatrix(Ms.coeffs.copy(), Ms.total)
    rest.coeffs[(slice(None), slice(None)) + (0,) * len(Ms.caps)] = 0
    return Q, Qinv, rest


def logdet_series(Ms: SeriesMatrix) -> TruncatedSeries:
    """Series of ``log det(I - Ms)``.

    With ``Q = I - Ms(0)`` and ``Y = Q^-1 (Ms - Ms(0))`` this is
    ``log det Q - sum_{k>=1} tr(Y^k) / k``; the sum stops once ``k`` times
    the lowest degree present in ``Y`` exceeds the total-degree cap.
    """
    Q, Qinv, rest = _shift_constant(Ms)
    out = TruncatedSeries.zeros(Ms.caps, Ms.total)
    sign, logabs = np.linalg.slogdet(Q)
    out.coeffs[(0,) * len(Ms.caps)] = logabs + np.log(sign)
    Y = Qinv @ rest
    d = Y.min_degree()
    if d is None:
        return out
    power = Y
    kmax = Ms.total // d
    for k in range(1, kmax + 1):
        out = out - power.trace() / k
        if k < kmax:
            power = power @ Y
    return out


def neumann_inverse(Ms: SeriesMatrix) -> SeriesMatrix:
    """Series of ``(I - Ms)^-1`` via ``sum_k (Q^-1 Y)^k Q^-1``."""
    Q, Qinv, rest = _shift_constant(Ms)
    Y = Qinv @ rest
    acc = Ms.identity()
    d = Y.min_degree()
    if d is not None:
        power = Ms.identity()
        for _ in range(Ms.total // d):
            power = power @ Y
            acc = acc + power
    return acc @ Qinv


def series_exp(a: TruncatedSeries) -> TruncatedSeries:
    """Truncated ``exp(a)`` for a series with zero constant term."""
    if abs(a.constant_term) != 0:
        raise NonzeroConstantTerm("series_exp needs a zero constant term; factor exp(a0) out first")
    out = TruncatedSeries.constant(1.0, a.caps, a.total)
    d = a.min_degree()
    if d is None:
        return out
    term = out
    for j in range(1, a.total // d + 1):
        term = term * a / j
        out = out + term
    return out


def exp_series(a: TruncatedSeries) -> TruncatedSeries:
    """``exp(a)`` allowing a nonzero constant term."""
    a0 = a.constant_term
    return series_exp(a - a0) * np.exp(a0)


def box_indices(caps, total=None):
    """All multi-indices inside the caps (and total cap), lexicographic order."""
    caps = _normalize_caps(caps)
    total = sum(caps) if total is None else total
    for idx in product(*[range(c + 1) for c in caps]):
        if sum(idx) <= total:
            yield idx


def multinomial(idx) -> int:
    return math.factorial(sum(idx)) // math.prod(math.factorial(i) for i in idx)
