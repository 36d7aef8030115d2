"""Orthogonal multiplications, Hopf constructions, and bi-eigenmap assembly.

An orthogonal multiplication is a bilinear map f: R^k x R^l -> R^n with
|f(x,y)| = |x||y| for all x, y.  Each one is stored here as an integer
coefficient tensor T with f_m(x, y) = sum_ij T[m,i,j] x_i y_j, which makes the
algebraic checks (bilinearity, harmonicity of the Hopf construction) exact.

The Hopf construction on f is F_f(x, y) = (2 f(x,y), |x|^2 - |y|^2), a map of
homogeneous quadratics whose restriction to the unit sphere is an eigenmap
when k = l.  Composing a degree-lambda circle map with such an eigenmap gives
the bi-eigenmaps whose angle profiles the solver computes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import Profile

__all__ = [
    "OrthogonalMultiplication",
    "SphereEigenmap",
    "BiEigenmap",
    "complex_multiplication",
    "quaternion_multiplication",
    "octonion_multiplication",
    "restricted_multiplication",
    "multiplication_by_name",
    "orthmul_eval",
    "hopf_construction_eval",
    "eigenvalue_check",
    "identity_eigenmap",
    "hopf_eigenmap",
    "alpha_hopf_eval",
]


@dataclass(frozen=True, eq=False)
class OrthogonalMultiplication:
    """Bilinear norm-multiplicative map encoded as an integer tensor (n, k, l)."""

    kind: str
    tensor: np.ndarray

    @property
    def k(self) -> int:
        return self.tensor.shape[1]

    @property
    def l(self) -> int:
        return self.tensor.shape[2]

    @property
    def n_out(self) -> int:
        return self.tensor.shape[0]

    def __call__(self, x, y) -> np.ndarray:
        return orthmul_eval(self, x, y)


def _quaternion_table() -> np.ndarray:
    """Structure constants of the Hamilton product: e_i e_j = sum_k T[k,i,j] e_k."""
    t = np.zeros((4, 4, 4), dtype=np.int64)
    # e0 is the unit
    for i in range(4):
        t[i, 0, i] = 1
        t[i, i, 0] = 1
    t[0, 0, 0] = 1
    for i in (1, 2, 3):
        t[0, i, i] = -1
    # i*j = k and cyclic permutations, anticommuting
    cyc = [(1, 2, 3), (2, 3, 1), (3, 1, 2)]
    for i, j, k in cyc:
        t[k, i, j] = 1
        t[k, j, i] = -1
    return t


def _octonion_table() -> np.ndarray:
    """Cayley-Dickson doubling of the quaternions: (a,b)(c,d) = (ac - d*b, da + bc*)."""
    q = _quaternion_table()
    conj = np.diag([1, -1, -1, -1]).astype(np.int64)  # q -> q* on basis coefficients

    def qmul(u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.einsum("kij,i,j->k", q, u, v)

    t = np.zeros((8, 8, 8), dtype=np.int64)
    basis = np.eye(4, dtype=np.int64)
    for i in range(8):
        a, b = (basis[i], np.zeros(4, np.int64)) if i < 4 else (np.zeros(4, np.int64), basis[i - 4])
        for j in range(8):
            c, d = (basis[j], np.zeros(4, np.int64)) if j < 4 else (np.zeros(4, np.int64), basis[j - 4])
            first = qmul(a, c) - qmul(conj @ d, b)
            second = qmul(d, a) + qmul(b, conj @ c)
            t[:4, i, j] = first
            t[4:, i, j] = second
    return t


def complex_multiplication() -> OrthogonalMultiplication:
    """Complex product on R^2 x R^2 -> R^2."""
    t = np.zeros((2, 2, 2), dtype=np.int64)
    t[0, 0, 0] = 1
    t[0, 1, 1] = -1
    t[1, 0, 1] = 1
    t[1, 1, 0] = 1
    return OrthogonalMultiplication("complex", t)


def quaternion_multiplication() -> OrthogonalMultiplication:
    return OrthogonalMultiplication("quaternion", _quaternion_table())


def octonion_multiplication() -> OrthogonalMultiplication:
    return OrthogonalMultiplication("octonion", _octonion_table())


def restricted_multiplication(l: int) -> OrthogonalMultiplication:
    """Orthogonal multiplication R^2 x R^l -> R^(l+1) for odd l.

    Built from two pointwise-orthogonal isometric embeddings A, B of R^l into
    R^(l+1): A y = (y, 0), and B y rotates the even-dimensional head of y by a
    complex structure, parks the last input coordinate in the new slot, and
    zeroes the vacated one.  Then f(x, y) = x_0 A y + x_1 B y satisfies
    |f|^2 = |x|^2 |y|^2 exactly because <A y, B y> = 0 for every y.
    """
    if l < 3 or l % 2 == 0:
        raise ValueError("restricted multiplication needs odd l >= 3")
    t = np.zeros((l + 1, 2, l), dtype=np.int64)
    for i in range(l):
        t[i, 0, i] = 1  # A
    for m in range((l - 1) // 2):  # B: complex structure on the head
        t[2 * m, 1, 2 * m + 1] = -1
        t[2 * m + 1, 1, 2 * m] = 1
    t[l, 1, l - 1] = 1  # B: last input coordinate moves to the new slot
    return OrthogonalMultiplication(f"restricted(2x{l}->{l + 1})", t)


_BUILDERS = {
    "complex": complex_multiplication,
    "quaternion": quaternion_multiplication,
    "octonion": octonion_multiplication,
    "restricted3": lambda: restricted_multiplication(3),
    "restricted5": lambda: restricted_multiplication(5),
    "restricted9": lambda: restricted_multiplication(9),
}


def multiplication_by_name(name: str) -> OrthogonalMultiplication:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise ValueError(
            f"unknown multiplication {name!r}; choose from {sorted(_BUILDERS)}"
        ) from None


def orthmul_eval(m: OrthogonalMultiplication, x, y) -> np.ndarray:
    """f(x, y); bilinear in each slot and norm-multiplicative."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1] != m.k or y.shape[-1] != m.l:
        raise ValueError(
            f"dimension mismatch: {m.kind} takes R^{m.k} x R^{m.l}, "
            f"got {x.shape[-1]} and {y.shape[-1]}"
        )
    if x.ndim == 1 and y.ndim == 1:
        return np.einsum("kij,i,j->k", m.tensor, x, y)
    return np.einsum("kij,...i,...j->...k", m.tensor, x, y)


def hopf_construction_eval(m: OrthogonalMultiplication, x, y) -> np.ndarray:
    """F_f(x, y) = (2 f(x,y), |x|^2 - |y|^2); satisfies |F_f| = |x|^2 + |y|^2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    f = orthmul_eval(m, x, y)
    last = np.sum(x**2, axis=-1) - np.sum(y**2, axis=-1)
    return np.concatenate([2.0 * f, np.expand_dims(last, -1)], axis=-1)


def eigenvalue_check(m: OrthogonalMultiplication) -> int:
    """Verify harmonicity of all Hopf-construction components; return the eigenvalue.

    Each component of F_f is a homogeneous quadratic on the ambient R^(k+l);
    its Hessian is a constant integer matrix whose trace must vanish.  For the
    bilinear components the Hessian is the off-diagonal block pair (2T_m,
    2T_m^T), and for the final component it is diag(2,...,2,-2,...,-2), so the
    requirement pins k = l.  The restriction to the unit sphere is then an
    eigenmap of eigenvalue 2*(k+l).
    """
    if m.k != m.l:
        raise ValueError(
            f"eigenvalue_check needs k = l, got {m.k} x {m.l} ({m.kind})"
        )
    k, l = m.k, m.l
    dim = k + l
    for comp in range(m.n_out):
        h = np.zeros((dim, dim), dtype=np.int64)
        h[:k, k:] = 2 * m.tensor[comp]
        h[k:, :k] = 2 * m.tensor[comp].T
        if int(np.trace(h)) != 0:
            raise ValueError(
                f"component {comp} of the Hopf construction on {m.kind} "
                f"is not harmonic (Hessian trace {int(np.trace(h))})"
            )
    h_last = np.diag([2] * k + [-2] * l).astype(np.int64)
    if int(np.trace(h_last)) != 0:
        raise ValueError(
            f"norm component not harmonic: Hessian trace {int(np.trace(h_last))}"
        )
    return 2 * dim


@dataclass(frozen=True, eq=False)
class SphereEigenmap:
    """A sphere-to-sphere eigenmap with its Laplace eigenvalue.

    ``dim_in``/``dim_out`` are ambient Euclidean dimensions (the map sends
    S^(dim_in - 1) into S^(dim_out - 1)).
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    dim_in: int
    dim_out: int
    eigenvalue: float

    def __call__(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape[-1] != self.dim_in:
            raise ValueError(
                f"{self.name} expects vectors in R^{self.dim_in}, got {y.shape[-1]}"
            )
        return self.func(y)


def identity_eigenmap(dim: int) -> SphereEigenmap:
    """Identity on S^(dim-1); linear coordinates have eigenvalue dim - 1."""
    return SphereEigenmap("identity", lambda y: y, dim, dim, float(dim - 1))


def hopf_eigenmap(m: OrthogonalMultiplication) -> SphereEigenmap:
    """Restricted Hopf construction of a k = l multiplication as an eigenmap."""
    mu = eigenvalue_check(m)

    def func(y: np.ndarray) -> np.ndarray:
        return hopf_construction_eval(m, y[..., : m.k], y[..., m.k :])

    return SphereEigenmap(
        f"hopf({m.kind})", func, m.k + m.l, m.n_out + 1, float(mu)
    )


@dataclass(frozen=True, eq=False)
class BiEigenmap:
    """Circle factor of degree d composed with a second-factor eigenmap.

    The circle factor z -> z^d contributes eigenvalue d^2; the couple is a
    blockwise complex rotation when the second factor's ambient dimension is
    even, and one of the 2 x odd restricted multiplications (available for
    3, 5, 9) otherwise.  Either way the result is unit-sphere valued with
    bi-eigenvalue (d^2, second.eigenvalue).
    """

    circle_degree: int
    second: SphereEigenmap
    _couple: Optional[OrthogonalMultiplication] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.circle_degree < 1:
            raise ValueError("circle degree must be >= 1")
        if self.second.dim_out % 2 == 1:
            object.__setattr__(
                self, "_couple", restricted_multiplication(self.second.dim_out)
            )

    @property
    def lam(self) -> float:
        return float(self.circle_degree**2)

    @property
    def mu(self) -> float:
        return self.second.eigenvalue

    @property
    def target_dim(self) -> int:
        d = self.second.dim_out
        return d if d % 2 == 0 else d + 1

    def __call__(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (2,):
            raise ValueError("circle factor takes a point of S^1 in R^2")
        z = complex(x[0], x[1]) ** self.circle_degree
        phase = np.array([z.real, z.imag])
        w = self.second(y)
        if self._couple is not None:
            return self._couple(phase, w)
        out = np.empty_like(w)
        out[0::2] = phase[0] * w[0::2] - phase[1] * w[1::2]
        out[1::2] = phase[0] * w[1::2] + phase[1] * w[0::2]
        return out


def alpha_hopf_eval(profile: Profile, f_map, t: float, x, y) -> np.ndarray:
    """Join map value (sin(alpha(t)) * f(x,y), cos(alpha(t))) at angle t.

    alpha is interpolated from the profile; x and y are expected on their unit
    spheres, in which case the output lies on the unit sphere exactly up to
    rounding.  Raises :class:`DomainError` for t outside the profile's grid.
    """
    alpha = float(profile.interpolate(t))
    v = np.asarray(f_map(x, y), dtype=float)
    return np.concatenate([math.sin(alpha) * v, [math.cos(alpha)]])
