"""
Two-state discrete-time quantum walks on a truncated integer line.

A walk state holds a coin amplitude ``(left, right)`` for every site of
``[-L, L]``.  One step applies

    Psi_{n+1}(x) = P_{x+1} Psi_n(x+1) + Q_{x-1} Psi_n(x-1),

where ``P_x`` (top row of the local coin) sends amplitude to the left and
``Q_x`` (bottom row) sends it to the right.  Amplitude outside ``[-L, L]``
is treated as zero; a state whose weight comes within one site of the edge
is flagged with ``boundary_leak``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import BoundaryLeakError, DomainError

__all__ = [
    "HADAMARD",
    "UNITARY_TOL",
    "LEAK_FRACTION",
    "Amplitude",
    "Coin",
    "CoinSplit",
    "CoinField",
    "WalkState",
    "Measure",
    "hadamard_coin",
    "build_wojcik_coin_field",
    "homogeneous_field",
    "split_coin",
    "step",
    "evolve",
    "measure",
    "total_norm",
    "time_averaged_measure",
]

UNITARY_TOL = 1e-12
LEAK_FRACTION = 1e-14

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / math.sqrt(2.0)
HADAMARD.flags.writeable = False


def _frozen(arr: ArrayLike, dtype=np.complex128) -> NDArray:
    out = np.array(arr, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Amplitude:
    """Coin state ``(Psi^L(x), Psi^R(x))`` at a single site."""

    left: complex
    right: complex

    @property
    def weight(self) -> float:
        return abs(self.left) ** 2 + abs(self.right) ** 2

    def as_array(self) -> NDArray[np.complex128]:
        return np.array([self.left, self.right], dtype=np.complex128)


@dataclass(frozen=True)
class Coin:
    """A 2x2 unitary ``[[a, b], [c, d]]``.

    Raises
    ------
    DomainError
        If the matrix is not unitary to within ``UNITARY_TOL`` entrywise.
    """

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        m = self.matrix
        err = np.max(np.abs(m.conj().T @ m - np.eye(2)))
        if not err <= UNITARY_TOL:
            raise DomainError(f"coin is not unitary (max |U*U - I| = {err:.3e})")

    @classmethod
    def from_matrix(cls, m: ArrayLike) -> "Coin":
        m = np.asarray(m, dtype=np.complex128)
        if m.shape != (2, 2):
            raise DomainError(f"coin must be 2x2, got shape {m.shape}")
        return cls(complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))

    @property
    def matrix(self) -> NDArray[np.complex128]:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.complex128)

    def scaled(self, factor: complex) -> "Coin":
        return Coin(factor * self.a, factor * self.b, factor * self.c, factor * self.d)


def hadamard_coin() -> Coin:
    """Return the Hadamard coin ``(1/sqrt 2) [[1, 1], [1, -1]]``."""
    return Coin.from_matrix(HADAMARD)


@dataclass(frozen=True)
class CoinSplit:
    """Left-mover block ``p`` (top row) and right-mover block ``q`` (bottom row)."""

    p: NDArray[np.complex128]
    q: NDArray[np.complex128]


def split_coin(u: Coin) -> CoinSplit:
    """Split a coin into its left-moving and right-moving blocks.

    ``p = [[a, b], [0, 0]]`` and ``q = [[0, 0], [c, d]]``, so ``p + q``
    reproduces the coin entry for entry (every entry of the sum is an
    addition with an exact zero).
    """
    p = np.array([[u.a, u.b], [0, 0]], dtype=np.complex128)
    q = np.array([[0, 0], [u.c, u.d]], dtype=np.complex128)
    return CoinSplit(_frozen(p), _frozen(q))


@dataclass(frozen=True)
class CoinField:
    """Assignment of a coin to every lattice site.

    The one-defect form uses ``defect_coin`` at the origin and ``bulk_coin``
    elsewhere.  ``site_coins`` overrides individual sites (including the
    origin) and is the hook for multi-defect fields.
    """

    bulk_coin: Coin
    defect_coin: Coin
    phase: float | None = None
    site_coins: Mapping[int, Coin] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "site_coins", MappingProxyType(dict(self.site_coins)))

    @classmethod
    def from_sites(cls, bulk_coin: Coin, site_coins: Mapping[int, Coin]) -> "CoinField":
        """General field: ``bulk_coin`` everywhere except the listed sites."""
        site_coins = dict(site_coins)
        return cls(bulk_coin, site_coins.get(0, bulk_coin), None, site_coins)

    def coin_at(self, x: int) -> Coin:
        if x in self.site_coins:
            return self.site_coins[x]
        return self.defect_coin if x == 0 else self.bulk_coin

    def coefficients(self, half_width: int) -> NDArray[np.complex128]:
        """Coin entries for ``x = -L..L`` as an array of shape ``(2L+1, 4)``.

        Columns are ``a, b, c, d``.
        """
        n = 2 * half_width + 1
        bulk = self.bulk_coin
        coef = np.empty((n, 4), dtype=np.complex128)
        coef[:] = (bulk.a, bulk.b, bulk.c, bulk.d)
        special = {0: self.defect_coin, **self.site_coins}
        for x, u in special.items():
            if -half_width <= x <= half_width:
                coef[x + half_width] = (u.a, u.b, u.c, u.d)
        return coef


def build_wojcik_coin_field(phi: float) -> CoinField:
    """Hadamard coins everywhere, multiplied by ``exp(2 pi i phi)`` at the origin.

    Raises
    ------
    DomainError
        Unless ``0 < phi < 1``.
    """
    phi = float(phi)
    if not 0.0 < phi < 1.0:
        raise DomainError(f"phase phi must lie in the open interval (0, 1), got {phi!r}")
    bulk = hadamard_coin()
    omega = cmath.exp(2j * math.pi * phi)
    return CoinField(bulk, bulk.scaled(omega), phi)


def homogeneous_field(coin: Coin | None = None) -> CoinField:
    """Same coin at every site (Hadamard by default); no defect."""
    coin = hadamard_coin() if coin is None else coin
    return CoinField(coin, coin, None)


@dataclass(frozen=True)
class WalkState:
    """Amplitudes on ``[-L, L]`` at time ``time``.

    ``amplitudes`` has shape ``(2L+1, 2)``; row ``i`` is site ``x = i - L``
    and the columns are the left and right chiralities.  The array is
    read-only.
    """

    half_width: int
    amplitudes: NDArray[np.complex128]
    time: int = 0
    boundary_leak: bool = False

    def __post_init__(self):
        if int(self.half_width) < 1:
            raise DomainError(f"half_width must be >= 1, got {self.half_width}")
        amps = _frozen(self.amplitudes)
        if amps.shape != (2 * self.half_width + 1, 2):
            raise DomainError(
                f"amplitudes must have shape ({2 * self.half_width + 1}, 2), got {amps.shape}"
            )
        if not np.all(np.isfinite(amps)):
            raise DomainError("amplitudes must be finite")
        if self.time < 0:
            raise DomainError(f"time must be >= 0, got {self.time}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zeros(cls, half_width: int) -> "WalkState":
        return cls(half_width, np.zeros((2 * half_width + 1, 2), dtype=np.complex128))

    @classmethod
    def localized(cls, half_width: int, left: complex, right: complex, x: int = 0) -> "WalkState":
        """State supported on the single site ``x``."""
        if abs(x) > half_width:
            raise DomainError(f"site {x} is outside [-{half_width}, {half_width}]")
        amps = np.zeros((2 * half_width + 1, 2), dtype=np.complex128)
        amps[x + half_width] = (left, right)
        return cls(half_width, amps)

    @property
    def positions(self) -> NDArray[np.int64]:
        return np.arange(-self.half_width, self.half_width + 1)

    @property
    def sites(self) -> tuple[Amplitude, ...]:
        return tuple(Amplitude(complex(l), complex(r)) for l, r in self.amplitudes)

    def site(self, x: int) -> Amplitude:
        if abs(x) > self.half_width:
            return Amplitude(0j, 0j)
        l, r = self.amplitudes[x + self.half_width]
        return Amplitude(complex(l), complex(r))

    def interleaved(self) -> NDArray[np.complex128]:
        """Flat vector ``[..., L(-1), R(-1), L(0), R(0), L(1), R(1), ...]``."""
        return self.amplitudes.reshape(-1).copy()

    @classmethod
    def from_interleaved(cls, vec: ArrayLike, time: int = 0) -> "WalkState":
        vec = np.asarray(vec, dtype=np.complex128)
        if vec.ndim != 1 or vec.size % 4 != 2:
            raise DomainError(f"interleaved vector must have length 2(2L+1), got {vec.shape}")
        return cls((vec.size // 2 - 1) // 2, vec.reshape(-1, 2), time)


@dataclass(frozen=True)
class Measure:
    """Nonnegative site weights on ``[-L, L]``."""

    half_width: int
    values: NDArray[np.float64]

    def __post_init__(self):
        vals = _frozen(self.values, dtype=np.float64)
        if vals.shape != (2 * self.half_width + 1,):
            raise DomainError(f"measure must have {2 * self.half_width + 1} entries, got {vals.shape}")
        if np.any(vals < 0):
            raise DomainError("measure entries must be nonnegative")
        object.__setattr__(self, "values", vals)

    @property
    def positions(self) -> NDArray[np.int64]:
        return np.arange(-self.half_width, self.half_width + 1)

    def at(self, x: int) -> float:
        if abs(x) > self.half_width:
            return 0.0
        return float(self.values[x + self.half_width])


def _site_weights(amps: NDArray[np.complex128]) -> NDArray[np.float64]:
    sq = amps.real**2 + amps.imag**2
    return sq[:, 0] + sq[:, 1]


def _touches_boundary(amps: NDArray[np.complex128]) -> bool:
    edge_rows = np.concatenate((amps[:2], amps[-2:])) if amps.shape[0] > 2 else amps
    edge = float(np.sum(edge_rows.real**2 + edge_rows.imag**2))
    if edge == 0.0:
        return False
    # pairwise summation is ample for a 1e-14 fraction test
    total = float(np.sum(_site_weights(amps)))
    return edge > LEAK_FRACTION * total


def _advance(amps: NDArray[np.complex128], coef: NDArray[np.complex128]) -> NDArray[np.complex128]:
    left, right = amps[:, 0], amps[:, 1]
    left_out = coef[:, 0] * left + coef[:, 1] * right
    right_out = coef[:, 2] * left + coef[:, 3] * right
    new = np.empty_like(amps)
    new[-1, 0] = 0
    new[0, 1] = 0
    new[:-1, 0] = left_out[1:]
    new[1:, 1] = right_out[:-1]
    return new


def step(state: WalkState, field: CoinField) -> WalkState:
    """Advance the walk by one time step.

    The result carries ``boundary_leak=True`` if either the input or the
    output has more than ``LEAK_FRACTION`` of its weight on the sites
    ``|x| in {L-1, L}``; the flag is sticky.
    """
    coef = field.coefficients(state.half_width)
    new = _advance(state.amplitudes, coef)
    leak = (
        state.boundary_leak
        or _touches_boundary(state.amplitudes)
        or _touches_boundary(new)
    )
    return WalkState(state.half_width, new, state.time + 1, leak)


def evolve(state: WalkState, field: CoinField, n: int) -> WalkState:
    """Apply :func:`step` ``n`` times."""
    if n < 0:
        raise DomainError(f"number of steps must be >= 0, got {n}")
    if n == 0:
        return state
    coef = field.coefficients(state.half_width)
    amps = state.amplitudes
    leak = state.boundary_leak or _touches_boundary(amps)
    for _ in range(n):
        amps = _advance(amps, coef)
        if not leak:
            leak = _touches_boundary(amps)
    return WalkState(state.half_width, amps, state.time + n, leak)


def measure(state: WalkState) -> Measure:
    """Site weights ``|Psi^L(x)|^2 + |Psi^R(x)|^2``."""
    return Measure(state.half_width, _site_weights(state.amplitudes))


def total_norm(state: WalkState) -> float:
    # fsum is correctly rounded, so the result does not depend on summation order
    return math.fsum(_site_weights(state.amplitudes))


def time_averaged_measure(init: WalkState, field: CoinField, horizon: int) -> Measure:
    """Empirical average ``(1/T) sum_{n<T} mu_n`` of the site measure.

    Raises
    ------
    BoundaryLeakError
        If the walk touches the lattice edge before time ``T - 1``; the
        average would silently miss weight.
    """
    if horizon < 1:
        raise DomainError(f"horizon must be >= 1, got {horizon}")
    coef = field.coefficients(init.half_width)
    amps = init.amplitudes
    weights = _site_weights(amps)
    if init.boundary_leak or _touches_boundary(amps):
        raise BoundaryLeakError("initial state already touches the lattice boundary")
    acc = weights.copy()
    for n in range(1, horizon):
        amps = _advance(amps, coef)
        if _touches_boundary(amps):
            raise BoundaryLeakError(
                f"walk reached the boundary of [-{init.half_width}, {init.half_width}] at step {n}; "
                f"use half_width >= horizon + support radius"
            )
        acc += _site_weights(amps)
    return Measure(init.half_width, acc / horizon)
