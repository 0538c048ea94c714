"""Symmetric tensor algebra over Minkowski spacetime R^{1+n}.

Tensors are stored in canonical form: one scalar per non-decreasing
multi-index, so a rank-m tensor over ``dim`` index values keeps
binomial(dim-1+m, m) components instead of dim**m.  Contractions apply
multinomial multiplicity weights so results agree with dense tensor
arithmetic.

Index 0 is the time slot whenever a tensor lives on spacetime
(``dim = n + 1`` with n the spatial dimension).  Purely spatial tensors
(as used by the Kronecker-delta operators) simply use ``dim = n``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "MinkowskiMetric",
    "SymTensor",
    "canonical_indices",
    "commutator_constants",
    "decompose",
    "dim_sym",
    "i_delta",
    "i_v",
    "i_v_matrix",
    "j_delta",
    "j_v",
    "J_op",
    "multiplicities",
    "reciprocal_metric_matrix",
    "symmetrize",
]


def dim_sym(n: int, m: int) -> int:
    """Number of canonical multi-indices of length m with entries 0..n."""
    if n < 1 or m < 0:
        raise ValueError(f"need n >= 1 and m >= 0, got n={n}, m={m}")
    return math.comb(n + m, m)


@lru_cache(maxsize=None)
def canonical_indices(dim: int, m: int) -> tuple[tuple[int, ...], ...]:
    """All non-decreasing multi-indices of length m over {0, .., dim-1}."""
    return tuple(itertools.combinations_with_replacement(range(dim), m))


@lru_cache(maxsize=None)
def _position_of(dim: int, m: int) -> dict[tuple[int, ...], int]:
    return {alpha: i for i, alpha in enumerate(canonical_indices(dim, m))}


@lru_cache(maxsize=None)
def multiplicities(dim: int, m: int) -> np.ndarray:
    """Number of distinct orderings of each canonical multi-index."""
    out = np.empty(len(canonical_indices(dim, m)))
    for i, alpha in enumerate(canonical_indices(dim, m)):
        denom = 1
        for v in set(alpha):
            denom *= math.factorial(alpha.count(v))
        out[i] = math.factorial(m) // denom
    return out


@lru_cache(maxsize=None)
def _index_array(dim: int, m: int) -> np.ndarray:
    """Canonical multi-indices as an integer array of shape (count, m)."""
    idx = canonical_indices(dim, m)
    if m == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(idx, dtype=np.int64)


@dataclass(frozen=True)
class SymTensor:
    """Dense symmetric tensor in canonical storage.

    ``data`` holds one scalar per canonical (sorted) multi-index, in the
    order produced by :func:`canonical_indices`.  Lookup through
    :meth:`component` accepts any permutation of a multi-index.
    """

    dim: int
    rank: int
    data: np.ndarray

    def __post_init__(self):
        want = dim_sym(self.dim - 1, self.rank) if self.dim > 1 else 1
        arr = np.asarray(self.data)
        if arr.shape != (want,):
            raise ValueError(
                f"rank-{self.rank} tensor over {self.dim} index values needs "
                f"{want} components, got shape {arr.shape}"
            )
        object.__setattr__(self, "data", arr)

    # -- basic structure -------------------------------------------------

    @property
    def n(self) -> int:
        """Spatial dimension when the tensor lives on spacetime."""
        return self.dim - 1

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.data)

    @classmethod
    def zeros(cls, dim: int, rank: int, complex_: bool = False) -> "SymTensor":
        cnt = dim_sym(dim - 1, rank)
        return cls(dim, rank, np.zeros(cnt, dtype=complex if complex_ else float))

    @classmethod
    def scalar(cls, dim: int, value) -> "SymTensor":
        return cls(dim, 0, np.array([value]))

    @classmethod
    def random(cls, dim: int, rank: int, rng: np.random.Generator) -> "SymTensor":
        return cls(dim, rank, rng.standard_normal(dim_sym(dim - 1, rank)))

    def component(self, *alpha: int):
        """Component at a multi-index given in any order."""
        if len(alpha) != self.rank:
            raise ValueError(f"expected {self.rank} indices, got {len(alpha)}")
        return self.data[_position_of(self.dim, self.rank)[tuple(sorted(alpha))]]

    def to_dense(self) -> np.ndarray:
        """Expand to the full dim**rank array."""
        out = np.zeros((self.dim,) * self.rank, dtype=self.data.dtype)
        for alpha, v in zip(canonical_indices(self.dim, self.rank), self.data):
            for perm in set(itertools.permutations(alpha)):
                out[perm] = v
        if self.rank == 0:
            out = self.data[0] * np.ones((), dtype=self.data.dtype)
        return out

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.data))) if self.data.size else 0.0

    # -- arithmetic -------------------------------------------------------

    def _like(self, data: np.ndarray) -> "SymTensor":
        return SymTensor(self.dim, self.rank, data)

    def __add__(self, other: "SymTensor") -> "SymTensor":
        self._check_same(other)
        return self._like(self.data + other.data)

    def __sub__(self, other: "SymTensor") -> "SymTensor":
        self._check_same(other)
        return self._like(self.data - other.data)

    def __mul__(self, scalar) -> "SymTensor":
        return self._like(self.data * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "SymTensor":
        return self._like(-self.data)

    def _check_same(self, other: "SymTensor") -> None:
        if self.dim != other.dim or self.rank != other.rank:
            raise ValueError(
                f"shape mismatch: ({self.dim},{self.rank}) vs ({other.dim},{other.rank})"
            )


@dataclass(frozen=True)
class MinkowskiMetric:
    """The reciprocal-speed Minkowski metric diag(-1/c^2, 1, .., 1)."""

    c: float
    n: int

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("ray speed c must be positive")
        if self.n < 2:
            raise ValueError("spatial dimension must be >= 2")

    def tensor(self) -> SymTensor:
        """diag(-1/c^2, 1, .., 1) as a rank-2 spacetime tensor."""
        dim = self.n + 1
        t = SymTensor.zeros(dim, 2)
        pos = _position_of(dim, 2)
        data = t.data.copy()
        data[pos[(0, 0)]] = -1.0 / self.c**2
        for p in range(1, dim):
            data[pos[(p, p)]] = 1.0
        return SymTensor(dim, 2, data)

    def matrix(self) -> np.ndarray:
        return reciprocal_metric_matrix(self.c, self.n + 1)

    def null_pairing(self, omega: np.ndarray) -> float:
        """<w, g w> for the ray direction w = (c, omega); zero iff |omega| = 1."""
        omega = np.asarray(omega, dtype=float)
        w = np.concatenate(([self.c], omega))
        return float(w @ self.matrix() @ w)


def reciprocal_metric_matrix(c: float, dim: int) -> np.ndarray:
    g = np.eye(dim)
    g[0, 0] = -1.0 / c**2
    return g


# -- symmetrization -------------------------------------------------------


def symmetrize(raw: np.ndarray) -> SymTensor:
    """Average a dense m-index array over all index permutations."""
    raw = np.asarray(raw, dtype=float if not np.iscomplexobj(raw) else complex)
    m = raw.ndim
    if m == 0:
        return SymTensor(2, 0, np.array([raw[()]]))
    dims = set(raw.shape)
    if len(dims) != 1:
        raise ValueError(f"all axes must have equal length, got shape {raw.shape}")
    dim = raw.shape[0]
    sym = np.zeros_like(raw)
    for perm in itertools.permutations(range(m)):
        sym += raw.transpose(perm)
    sym /= math.factorial(m)
    idx = _index_array(dim, m)
    data = sym[tuple(idx[:, j] for j in range(m))] if m else sym.reshape(1)
    return SymTensor(dim, m, np.ascontiguousarray(data))


# -- cached contraction tables --------------------------------------------


@lru_cache(maxsize=None)
def _product_tables(dim: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Tables for the symmetric product of a rank-2 with a rank-(m-2) tensor.

    For each canonical multi-index alpha of rank m and each of the
    binomial(m, 2) ways to carve two slots out of alpha, the tables give
    the flat rank-2 position of the carved pair and the canonical
    position of the remainder.
    """
    pos_low = _position_of(dim, m - 2)
    alphas = canonical_indices(dim, m)
    pairs = list(itertools.combinations(range(m), 2))
    v_idx = np.empty((len(alphas), len(pairs)), dtype=np.int64)
    u_idx = np.empty((len(alphas), len(pairs)), dtype=np.int64)
    for a, alpha in enumerate(alphas):
        for p, (i, j) in enumerate(pairs):
            v_idx[a, p] = alpha[i] * dim + alpha[j]
            rest = tuple(alpha[k] for k in range(m) if k != i and k != j)
            u_idx[a, p] = pos_low[rest]
    return v_idx, u_idx


@lru_cache(maxsize=None)
def _contract_tables(dim: int, m: int) -> np.ndarray:
    """For each canonical beta of rank m-2, positions of beta + (p, q)."""
    pos_high = _position_of(dim, m)
    betas = canonical_indices(dim, m - 2)
    out = np.empty((len(betas), dim * dim), dtype=np.int64)
    for b, beta in enumerate(betas):
        for p in range(dim):
            for q in range(dim):
                out[b, p * dim + q] = pos_high[tuple(sorted(beta + (p, q)))]
    return out


def i_v(v: SymTensor, u: SymTensor) -> SymTensor:
    """Symmetric product of a rank-2 tensor v with a rank-(m-2) tensor u.

    Output component at alpha is the average of v[pair] * u[rest] over
    the binomial(m, 2) unordered two-slot carvings of alpha.
    """
    if v.rank != 2:
        raise ValueError("v must have rank 2")
    if v.dim != u.dim:
        raise ValueError("dimension mismatch")
    m = u.rank + 2
    v_idx, u_idx = _product_tables(v.dim, m)
    v_flat = v.to_dense().reshape(-1)
    data = (v_flat[v_idx] * u.data[u_idx]).mean(axis=1)
    return SymTensor(u.dim, m, data)


def j_v(v: SymTensor, u: SymTensor) -> SymTensor:
    """Contract the last two slots of u against a rank-2 tensor v."""
    if v.rank != 2:
        raise ValueError("v must have rank 2")
    if u.rank < 2:
        raise ValueError("u must have rank >= 2")
    if v.dim != u.dim:
        raise ValueError("dimension mismatch")
    table = _contract_tables(u.dim, u.rank)
    v_flat = v.to_dense().reshape(-1)
    data = u.data[table] @ v_flat
    return SymTensor(u.dim, u.rank - 2, data)


@lru_cache(maxsize=None)
def _trace_tables(dim: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Positions of beta + (0,0) and beta + (p,p) for p >= 1."""
    pos_high = _position_of(dim, m)
    betas = canonical_indices(dim, m - 2)
    time_idx = np.empty(len(betas), dtype=np.int64)
    space_idx = np.empty((len(betas), dim - 1), dtype=np.int64)
    for b, beta in enumerate(betas):
        time_idx[b] = pos_high[tuple(sorted(beta + (0, 0)))]
        for p in range(1, dim):
            space_idx[b, p - 1] = pos_high[tuple(sorted(beta + (p, p)))]
    return time_idx, space_idx


def J_op(u: SymTensor, c: float) -> SymTensor:
    """Weighted trace -c^2 u[..00] + sum_p u[..pp] over spatial p.

    Coincides with j_v against diag(-1, 1, .., 1) when c = 1.
    """
    if u.rank < 2:
        raise ValueError("J needs rank >= 2")
    time_idx, space_idx = _trace_tables(u.dim, u.rank)
    data = -c**2 * u.data[time_idx] + u.data[space_idx].sum(axis=1)
    return SymTensor(u.dim, u.rank - 2, data)


def _delta_tensor(dim: int) -> SymTensor:
    t = SymTensor.zeros(dim, 2)
    pos = _position_of(dim, 2)
    data = t.data.copy()
    for p in range(dim):
        data[pos[(p, p)]] = 1.0
    return SymTensor(dim, 2, data)


def i_delta(u: SymTensor) -> SymTensor:
    """Symmetrized product with the Kronecker delta over all index values."""
    return i_v(_delta_tensor(u.dim), u)


def j_delta(u: SymTensor) -> SymTensor:
    """Trace of the last two slots against the Kronecker delta."""
    if u.rank < 2:
        raise ValueError("j_delta needs rank >= 2")
    return j_v(_delta_tensor(u.dim), u)


# -- commutator constants and the trace decomposition ----------------------


def _binom2(k: int) -> int:
    return k * (k - 1) // 2 if k >= 2 else 0


def commutator_constants(m: int, n: int) -> tuple[float, float]:
    """Constants (D_m, C_m) in J(i_g u) = D_m i_g(J u) + C_m u.

    Here u has rank m-2 over spatial dimension n, and binom(k, 2) is
    taken as 0 for k < 2, which removes the i_g J term for m in {2, 3}.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    b = _binom2(m)
    return _binom2(m - 2) / b, (n + m - 1) / b


def i_v_matrix(dim: int, m: int, v: SymTensor) -> np.ndarray:
    """Matrix of u -> i_v u over canonical bases, shape (N_m, N_{m-2})."""
    cols = dim_sym(dim - 1, m - 2)
    out = np.empty((dim_sym(dim - 1, m), cols))
    for j in range(cols):
        e = SymTensor(dim, m - 2, np.eye(cols)[j])
        out[:, j] = i_v(v, e).data
    return out


def decompose(u: SymTensor, c: float) -> tuple[SymTensor, SymTensor]:
    """Split u = A + i_g(f_low) with J A = 0, g = diag(-1/c^2, 1, .., 1).

    Solves the triangular system obtained by repeatedly applying J to
    the defining equation J i_g(B) = J u, peeling one trace level per
    step with the commutator constants.  The closed-form scalar
    (n - 1/c^2)^{-1} J u sometimes quoted for m = 2 is not used; the
    machine-checked ground truth is J A = 0, which forces B = J u / (n+1)
    at m = 2 regardless of c.
    """
    m, n = u.rank, u.dim - 1
    if m < 2:
        raise ValueError("decompose needs rank >= 2")
    g = MinkowskiMetric(c, n).tensor()

    # J^j u for j = 1 .. as far as rank allows.
    j_powers = [u]
    while j_powers[-1].rank >= 2:
        j_powers.append(J_op(j_powers[-1], c))

    # Coefficients E_j, F_j of the level-j equation
    #   E_j J^j B + F_j i_g J^{j+1} B = J^{j+1} u.
    D0, C0 = commutator_constants(m, n)
    E, F = [C0], [D0]
    while F[-1] != 0.0:
        r = m - 2 * len(E)
        Dr, Cr = commutator_constants(r, n)
        E.append(E[-1] + F[-1] * Cr)
        F.append(F[-1] * Dr)

    top = len(E) - 1
    jb = j_powers[top + 1] * (1.0 / E[top])  # J^top B, F_top = 0
    for j in range(top - 1, -1, -1):
        jb = (j_powers[j + 1] - F[j] * i_v(g, jb)) * (1.0 / E[j])
    f_low = jb
    return u - i_v(g, f_low), f_low
