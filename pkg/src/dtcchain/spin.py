"""Dense operators and states on a chain of spin-1/2 sites.

Basis convention: site 1 is the most significant bit of the basis index and
``|up>`` maps to bit 0, so ``|up up ... up>`` is basis vector 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence, Union

import numpy as np

MAX_DIM = 4096

HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-10
RHO_HERMITIAN_TOL = 1e-10
RHO_TRACE_TOL = 1e-8
RHO_EIG_TOL = -1e-8

_PAULI = {
    "identity": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    # sigma^+ = |up><down|, sigma^- = |down><up|
    "plus": np.array([[0, 1], [0, 0]], dtype=complex),
    "minus": np.array([[0, 0], [1, 0]], dtype=complex),
}


def pauli(axis: str) -> np.ndarray:
    """Return a fresh copy of the 2x2 Pauli or ladder matrix for ``axis``.

    ``axis`` is one of ``x, y, z, plus, minus, identity``.
    """
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}") from None


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class HilbertSpace:
    n_sites: int

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 1:
            raise ValueError(f"n_sites must be a positive integer, got {self.n_sites}")
        if 2**self.n_sites > MAX_DIM:
            raise ValueError(f"dimension 2^{self.n_sites} exceeds the dense cap {MAX_DIM}")

    @property
    def dim(self) -> int:
        return 2**self.n_sites

    def _check_site(self, site: int) -> None:
        if not 1 <= site <= self.n_sites:
            raise IndexError(f"site {site} outside 1..{self.n_sites}")


@dataclass(frozen=True, eq=False)
class StateVector:
    space: HilbertSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = _frozen(self.amplitudes)
        if amp.shape != (self.space.dim,):
            raise ValueError(f"expected {self.space.dim} amplitudes, got shape {amp.shape}")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |psi| = {norm!r}")
        object.__setattr__(self, "amplitudes", amp)

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.space, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    space: HilbertSpace
    matrix: np.ndarray

    def __post_init__(self):
        rho = _frozen(self.matrix)
        d = self.space.dim
        if rho.shape != (d, d):
            raise ValueError(f"expected {d}x{d} density matrix, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > RHO_HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > RHO_TRACE_TOL:
            raise ValueError(f"density matrix trace {tr!r} != 1")
        lo = np.linalg.eigvalsh(rho).min()
        if lo < RHO_EIG_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {lo!r}")
        object.__setattr__(self, "matrix", rho)

    @classmethod
    def maximally_mixed(cls, space: HilbertSpace) -> "DensityMatrix":
        return cls(space, np.eye(space.dim) / space.dim)


@dataclass(frozen=True, eq=False)
class SpinOperator:
    space: HilbertSpace
    matrix: np.ndarray
    hermitian_flag: bool = field(default=False)

    def __post_init__(self):
        m = _frozen(self.matrix)
        d = self.space.dim
        if m.shape != (d, d):
            raise ValueError(f"expected {d}x{d} operator, got {m.shape}")
        if self.hermitian_flag and np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise ValueError("operator flagged Hermitian but is not")
        object.__setattr__(self, "matrix", m)

    def _combine(self, other: "SpinOperator", matrix: np.ndarray, herm: bool) -> "SpinOperator":
        if other.space != self.space:
            raise ValueError("operators live on different spaces")
        return SpinOperator(self.space, matrix, herm)

    def __add__(self, other: "SpinOperator") -> "SpinOperator":
        return self._combine(other, self.matrix + other.matrix,
                             self.hermitian_flag and other.hermitian_flag)

    def __sub__(self, other: "SpinOperator") -> "SpinOperator":
        return self._combine(other, self.matrix - other.matrix,
                             self.hermitian_flag and other.hermitian_flag)

    def __neg__(self) -> "SpinOperator":
        return SpinOperator(self.space, -self.matrix, self.hermitian_flag)

    def __mul__(self, c) -> "SpinOperator":
        herm = self.hermitian_flag and np.isreal(c)
        return SpinOperator(self.space, c * self.matrix, bool(herm))

    __rmul__ = __mul__

    def __matmul__(self, other: "SpinOperator") -> "SpinOperator":
        return self._combine(other, self.matrix @ other.matrix, False)

    def dagger(self) -> "SpinOperator":
        return SpinOperator(self.space, self.matrix.conj().T, self.hermitian_flag)

    def apply(self, state: StateVector) -> np.ndarray:
        """Raw vector O|psi>; not renormalized."""
        _check_space(self.space, state.space)
        return self.matrix @ state.amplitudes

    @classmethod
    def identity(cls, space: HilbertSpace) -> "SpinOperator":
        return cls(space, np.eye(space.dim), True)

    @classmethod
    def zero(cls, space: HilbertSpace) -> "SpinOperator":
        return cls(space, np.zeros((space.dim, space.dim)), True)


def _check_space(a: HilbertSpace, b: HilbertSpace) -> None:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


def _is_hermitian(op: np.ndarray) -> bool:
    return bool(np.max(np.abs(op - op.conj().T)) <= HERMITIAN_TOL)


def embed_single(op: np.ndarray, site: int, space: HilbertSpace) -> SpinOperator:
    """Place a 2x2 ``op`` on ``site`` (1-based) with identities elsewhere."""
    op = np.asarray(op, dtype=complex)
    if op.shape != (2, 2):
        raise ValueError("single-site operator must be 2x2")
    space._check_site(site)
    factors = [op if k == site else _PAULI["identity"] for k in range(1, space.n_sites + 1)]
    return SpinOperator(space, reduce(np.kron, factors), _is_hermitian(op))


def embed_pair(op_a: np.ndarray, op_b: np.ndarray, i: int, j: int,
               space: HilbertSpace) -> SpinOperator:
    """Tensor embedding of ``op_a`` on site ``i`` and ``op_b`` on site ``j``."""
    op_a = np.asarray(op_a, dtype=complex)
    op_b = np.asarray(op_b, dtype=complex)
    space._check_site(i)
    space._check_site(j)
    if i == j:
        raise ValueError(f"embed_pair needs distinct sites, got {i} twice")
    factors = []
    for k in range(1, space.n_sites + 1):
        factors.append(op_a if k == i else op_b if k == j else _PAULI["identity"])
    herm = _is_hermitian(op_a) and _is_hermitian(op_b)
    return SpinOperator(space, reduce(np.kron, factors), herm)


_UP = {"up", "u", "↑", "0", 0}
_DOWN = {"down", "d", "↓", "1", 1}


def parse_pattern(pattern: Union[str, Sequence]) -> list[int]:
    """Turn ``"UDUDU"``, ``"↑↓↑"`` or ``["up", "down"]`` into bits (up=0)."""
    items = list(pattern.lower()) if isinstance(pattern, str) else list(pattern)
    bits = []
    for s in items:
        key = s.lower() if isinstance(s, str) else s
        if key in _UP:
            bits.append(0)
        elif key in _DOWN:
            bits.append(1)
        else:
            raise ValueError(f"unrecognized spin label {s!r}")
    return bits


def basis_index(bits: Sequence[int]) -> int:
    idx = 0
    for b in bits:
        idx = (idx << 1) | int(b)
    return idx


def product_state(pattern, space: HilbertSpace | None = None) -> StateVector:
    """Computational-basis product state for a pattern of ups and downs."""
    bits = parse_pattern(pattern)
    if space is None:
        space = HilbertSpace(len(bits))
    if len(bits) != space.n_sites:
        raise ValueError(f"pattern has {len(bits)} sites, space has {space.n_sites}")
    amp = np.zeros(space.dim, dtype=complex)
    amp[basis_index(bits)] = 1.0
    return StateVector(space, amp)


def neel_state(space: HilbertSpace) -> StateVector:
    """``|up down up down ...>`` starting with up on site 1."""
    return product_state([k % 2 for k in range(space.n_sites)], space)


def expectation(op: SpinOperator, state: Union[StateVector, DensityMatrix]):
    """<psi|O|psi> or Tr(rho O); a float when ``op`` is flagged Hermitian."""
    _check_space(op.space, state.space)
    if isinstance(state, StateVector):
        val = np.vdot(state.amplitudes, op.matrix @ state.amplitudes)
    elif isinstance(state, DensityMatrix):
        val = np.einsum("ij,ji->", state.matrix, op.matrix)
    else:
        raise TypeError(f"cannot take expectation in {type(state).__name__}")
    return float(val.real) if op.hermitian_flag else complex(val)


def total_sz(space: HilbertSpace) -> SpinOperator:
    """Sum of sigma^z over all sites (no factor 1/2)."""
    return SpinOperator(space, np.diag(sz_diagonal(space)).astype(complex), True)


def sz_diagonal(space: HilbertSpace) -> np.ndarray:
    """Diagonal of sum_i sigma_i^z in the product basis, as a float array."""
    idx = np.arange(space.dim)
    n_down = np.zeros(space.dim, dtype=int)
    for k in range(space.n_sites):
        n_down += (idx >> k) & 1
    return (space.n_sites - 2 * n_down).astype(float)


def site_reversal(space: HilbertSpace) -> SpinOperator:
    """Permutation mapping site i to site N+1-i."""
    n = space.n_sites
    idx = np.arange(space.dim)
    rev = np.zeros_like(idx)
    for k in range(n):
        rev |= ((idx >> k) & 1) << (n - 1 - k)
    perm = np.zeros((space.dim, space.dim), dtype=complex)
    perm[rev, idx] = 1.0
    return SpinOperator(space, perm, True)


def commutator(a: SpinOperator, b: SpinOperator) -> np.ndarray:
    return a.matrix @ b.matrix - b.matrix @ a.matrix
