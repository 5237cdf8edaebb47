"""
The evolution operator on ``[-L, L]`` as an explicit sparse matrix.

Used as an oracle independent of :func:`qwdefect.core.step`: the matrix is
assembled block by block from the ``P``/``Q`` splitting, then applied to
candidate eigenvectors to measure how well ``U Psi = lambda Psi`` holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from numpy.typing import ArrayLike, NDArray

from .analytic import StationarySolution, stationary_state
from .core import CoinField, Measure, WalkState, build_wojcik_coin_field, split_coin
from .errors import DomainError, InsufficientDataError, OverflowCapError

__all__ = [
    "RESIDUAL_FLOOR",
    "TruncatedOperator",
    "build_truncated_operator",
    "eigen_residual",
    "overflow_cap",
    "stationarity_residual",
    "decay_fit",
]

RESIDUAL_FLOOR = 1e-300


@dataclass(frozen=True)
class TruncatedOperator:
    """``U`` restricted to ``[-L, L]`` in the interleaved layout.

    Index ``2 i + c`` is site ``x = i - L`` with chirality ``c`` (0 = left,
    1 = right).  Columns for sites outside the window are dropped, so the
    two edge sites lose unitarity.
    """

    half_width: int
    matrix: sp.csr_matrix

    @property
    def dim(self) -> int:
        return 2 * (2 * self.half_width + 1)

    def to_dense(self) -> NDArray[np.complex128]:
        return self.matrix.toarray()

    def apply(self, vec: ArrayLike) -> NDArray[np.complex128]:
        return self.matrix @ np.asarray(vec, dtype=np.complex128)

    def apply_state(self, state: WalkState) -> WalkState:
        if state.half_width != self.half_width:
            raise DomainError("state and operator have different half widths")
        return WalkState.from_interleaved(self.apply(state.interleaved()), state.time + 1)


def build_truncated_operator(field: CoinField, half_width: int) -> TruncatedOperator:
    """Assemble the block matrix with ``P_{x+1}`` right of and ``Q_{x-1}`` left of the diagonal.

    Row block ``x`` holds ``P_{x+1}`` in column block ``x+1`` and
    ``Q_{x-1}`` in column block ``x-1``.
    """
    if half_width < 1:
        raise DomainError(f"half_width must be >= 1, got {half_width}")
    n_sites = 2 * half_width + 1
    rows: list[int] = []
    cols: list[int] = []
    vals: list[complex] = []
    for i in range(n_sites):
        x = i - half_width
        for dx, block_name in ((1, "p"), (-1, "q")):
            j = i + dx
            if not 0 <= j < n_sites:
                continue
            block = getattr(split_coin(field.coin_at(x + dx)), block_name)
            for r in range(2):
                for c in range(2):
                    if block[r, c] != 0:
                        rows.append(2 * i + r)
                        cols.append(2 * j + c)
                        vals.append(block[r, c])
    dim = 2 * n_sites
    mat = sp.csr_matrix((np.array(vals, dtype=np.complex128), (rows, cols)), shape=(dim, dim))
    return TruncatedOperator(half_width, mat)


def eigen_residual(
    op: TruncatedOperator, amplitudes: ArrayLike, lambda_: complex, margin: int = 2
) -> float:
    """Largest per-site relative residual ``|(U Psi)(x) - lambda Psi(x)| / |Psi(x)|`` for ``|x| <= L - margin``.

    Site norms below ``RESIDUAL_FLOOR`` are replaced by the floor.
    """
    L = op.half_width
    if margin < 1 or L <= margin + 1:
        raise DomainError(f"need margin >= 1 and L > margin + 1 (got L={L}, margin={margin})")
    amps = np.asarray(amplitudes, dtype=np.complex128).reshape(2 * L + 1, 2)
    image = op.apply(amps.reshape(-1)).reshape(2 * L + 1, 2)
    sl = slice(margin, 2 * L + 1 - margin)
    diff = np.linalg.norm(image[sl] - lambda_ * amps[sl], axis=1)
    scale = np.maximum(np.linalg.norm(amps[sl], axis=1), RESIDUAL_FLOOR)
    return float(np.max(diff / scale))


def overflow_cap(sol: StationarySolution) -> float:
    """Widest lattice for which ``|theta_s|^L`` stays inside double range.

    ``floor(600 / |log10 |theta_s|^2|)``; ``inf`` when ``|theta_s| = 1``.
    """
    lg = abs(math.log10(sol.theta_s_abs_sq))
    return math.inf if lg == 0.0 else math.floor(600.0 / lg)


def stationarity_residual(
    sol: StationarySolution, field: CoinField | None, half_width: int, margin: int = 2
) -> float:
    """Interior relative residual of the closed-form eigenvector under the truncated operator.

    ``field`` defaults to the one-defect field at ``sol.phase``.

    Raises
    ------
    OverflowCapError
        If ``half_width`` exceeds :func:`overflow_cap`.
    """
    cap = overflow_cap(sol)
    if half_width > cap:
        raise OverflowCapError(
            f"half_width={half_width} exceeds overflow cap {cap} for |theta_s|^2={sol.theta_s_abs_sq!r}"
        )
    if field is None:
        field = build_wojcik_coin_field(sol.phase)
    op = build_truncated_operator(field, half_width)
    psi = stationary_state(sol, half_width)
    return eigen_residual(op, psi.amplitudes, sol.lambda_, margin)


def decay_fit(m: Measure, x_max: int | None = None) -> float:
    """Per-site decay ratio from a least-squares line through ``log mu(x)``, ``x >= 1``.

    Zero entries are skipped.  Returns ``exp(slope)``.
    """
    x = m.positions
    mask = (x >= 1) & (m.values > 0)
    if x_max is not None:
        mask &= x <= x_max
    if np.count_nonzero(mask) < 4:
        raise InsufficientDataError(
            f"decay fit needs at least 4 positive entries on x >= 1, got {np.count_nonzero(mask)}"
        )
    slope, _ = np.polyfit(x[mask].astype(float), np.log(m.values[mask]), 1)
    return float(np.exp(slope))
