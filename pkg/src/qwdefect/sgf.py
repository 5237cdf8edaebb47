"""
Numerical checks of the split generating-function equations.

For an eigenvector ``Psi`` put ``f_+^j(z) = sum_{x>=1} Psi^j(x) z^x`` and
``f_-^j(z) = sum_{x<=-1} Psi^j(x) z^x``.  The eigen-relation turns into the
2x2 linear systems ``A f_+ = a_+`` and ``A f_- = a_-`` with

    A   = [[lambda - 1/(sqrt2 z), -1/(sqrt2 z)], [-z/sqrt2, lambda + z/sqrt2]]
    a_+ = [-lambda alpha, omega z (alpha - beta) / sqrt2]
    a_- = [omega (alpha + beta) / (sqrt2 z), -lambda beta]

Here the series are truncated after ``N`` terms and the residual of the
linear system is measured.  Both series converge on the unit circle only
when ``|theta_s| < 1``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from .analytic import DecayClass, StationarySolution, half_line_amplitudes
from .errors import DivergentSeriesError, DomainError

__all__ = [
    "DEFAULT_TERMS",
    "CONVERGENCE_MARGIN",
    "POLE_EXCLUSION",
    "Side",
    "Chirality",
    "GenFunSystem",
    "Lemma1Residual",
    "build_system",
    "det_A",
    "det_A_quadratic",
    "det_A_roots",
    "truncated_series",
    "lemma1_residual",
    "lemma1_tail_constant",
    "lemma1_applicable",
    "unit_circle_points",
]

DEFAULT_TERMS = 400
CONVERGENCE_MARGIN = 1e-6
POLE_EXCLUSION = 1e-3
_SQRT2 = math.sqrt(2.0)


class Side(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"


class Chirality(enum.Enum):
    L = 0
    R = 1


@dataclass(frozen=True)
class GenFunSystem:
    z: complex
    lambda_: complex
    a_matrix: NDArray[np.complex128]
    rhs_plus: NDArray[np.complex128]
    rhs_minus: NDArray[np.complex128]


class Lemma1Residual(NamedTuple):
    plus: float
    minus: float


def build_system(z: complex, lambda_: complex, omega: complex, alpha: complex, beta: complex) -> GenFunSystem:
    if z == 0:
        raise DomainError("evaluation point z must be nonzero")
    if lambda_ == 0:
        raise DomainError("lambda must be nonzero")
    z, lam = complex(z), complex(lambda_)
    a = np.array(
        [
            [lam - 1 / (_SQRT2 * z), -1 / (_SQRT2 * z)],
            [-z / _SQRT2, lam + z / _SQRT2],
        ],
        dtype=np.complex128,
    )
    rhs_plus = np.array([-lam * alpha, omega * z * (alpha - beta) / _SQRT2], dtype=np.complex128)
    rhs_minus = np.array([omega * (alpha + beta) / (_SQRT2 * z), -lam * beta], dtype=np.complex128)
    for arr in (a, rhs_plus, rhs_minus):
        arr.flags.writeable = False
    return GenFunSystem(z, lam, a, rhs_plus, rhs_minus)


def det_A(system: GenFunSystem) -> complex:
    m = system.a_matrix
    return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def det_A_quadratic(z: complex, lambda_: complex) -> complex:
    """``z^2 - sqrt2 (1/lambda - lambda) z - 1``; ``det A`` is this times ``lambda / (sqrt2 z)``."""
    return z * z - _SQRT2 * (1 / lambda_ - lambda_) * z - 1


def det_A_roots(lambda_: complex) -> tuple[complex, complex]:
    """Roots ``(theta_s, theta_l)`` of ``z^2 - sqrt2 (1/lambda - lambda) z - 1``.

    Ordered by modulus; roots of equal modulus (within 1e-12) are ordered
    by principal argument.  The second root is computed as ``-1/q`` from
    the first so that the product is ``-1`` to rounding.
    """
    lam = complex(lambda_)
    if abs(abs(lam) - 1.0) > 1e-12:
        raise DomainError(f"lambda must have unit modulus, got |lambda| = {abs(lam)!r}")
    p = -_SQRT2 * (1 / lam - lam)
    disc = cmath.sqrt(p * p + 4)
    # pick the sign that avoids cancellation, then use the product -1 for the other root
    big = -(p + disc) / 2 if abs(p + disc) >= abs(p - disc) else -(p - disc) / 2
    r1, r2 = big, -1 / big
    if abs(abs(r1) - abs(r2)) <= 1e-12:
        key = lambda r: cmath.phase(r)
    else:
        key = abs
    lo, hi = sorted((r1, r2), key=key)
    return lo, hi


def _check_convergence(sol: StationarySolution, side: Side, z: complex) -> None:
    if side is Side.PLUS:
        ratio = abs(sol.theta_s * z)
        what = "|theta_s * z|"
    else:
        ratio = abs(sol.theta_s / z)
        what = "|theta_s / z|"
    if not ratio < 1.0 - CONVERGENCE_MARGIN:
        raise DivergentSeriesError(
            f"{side.value} series diverges at z={z!r}: {what} = {ratio!r} "
            f"(needs < 1 - {CONVERGENCE_MARGIN:g}); radius of convergence is "
            f"{'1/|theta_s|' if side is Side.PLUS else '|z| > |theta_s|'}"
        )


def _series_pair(sol: StationarySolution, side: Side, z: complex, terms: int) -> NDArray[np.complex128]:
    if terms < 0:
        raise DomainError(f"number of terms must be >= 0, got {terms}")
    if terms == 0:
        return np.zeros(2, dtype=np.complex128)
    coeffs = half_line_amplitudes(sol, side is Side.PLUS, terms)
    k = np.arange(1, terms + 1)
    powers = z**k if side is Side.PLUS else z ** (-k)
    return (coeffs * powers[:, None]).sum(axis=0)


def truncated_series(
    sol: StationarySolution, side: Side, chirality: Chirality, z: complex, terms: int
) -> complex:
    """Partial sum of the first ``terms`` terms of ``f_side^chirality(z)``."""
    if terms < 1:
        raise DomainError(f"number of terms must be >= 1, got {terms}")
    z = complex(z)
    _check_convergence(sol, side, z)
    return complex(_series_pair(sol, side, z, terms)[chirality.value])


def lemma1_residual(sol: StationarySolution, z: complex, terms: int = DEFAULT_TERMS) -> Lemma1Residual:
    """Max-norm residuals of ``A f_+ - a_+`` and ``A f_- - a_-`` with truncated series.

    ``terms = 0`` gives the empty-sum baseline ``max |a_+|``, ``max |a_-|``.
    """
    z = complex(z)
    _check_convergence(sol, Side.PLUS, z)
    _check_convergence(sol, Side.MINUS, z)
    system = build_system(z, sol.lambda_, sol.omega, sol.alpha, sol.beta)
    f_plus = _series_pair(sol, Side.PLUS, z, terms)
    f_minus = _series_pair(sol, Side.MINUS, z, terms)
    res_plus = system.a_matrix @ f_plus - system.rhs_plus
    res_minus = system.a_matrix @ f_minus - system.rhs_minus
    return Lemma1Residual(float(np.max(np.abs(res_plus))), float(np.max(np.abs(res_minus))))


def lemma1_tail_constant(sol: StationarySolution, z: complex) -> float:
    """Constant ``C`` with ``lemma1_residual(sol, z, N) <= C |theta_s|^N`` on ``|z| = 1``.

    The truncation error of each series is a geometric tail; ``A`` maps it
    to the residual, so ``C = ||A||_inf * max|c_j| * r / |1 - r_signed|``
    maximised over both sides, where ``c_j`` are the half-line amplitude
    vectors.
    """
    z = complex(z)
    system = build_system(z, sol.lambda_, sol.omega, sol.alpha, sol.beta)
    norm_a = float(np.max(np.abs(system.a_matrix).sum(axis=1)))
    pos = half_line_amplitudes(sol, True, 1)[0] / (-sol.theta_s)
    neg = half_line_amplitudes(sol, False, 1)[0] / sol.theta_s
    r_plus = -sol.theta_s * z
    r_minus = sol.theta_s / z
    c_plus = float(np.max(np.abs(pos))) * abs(r_plus) / abs(1 - r_plus)
    c_minus = float(np.max(np.abs(neg))) * abs(r_minus) / abs(1 - r_minus)
    # |r|^(N+1) = |theta_s|^N |r| on the unit circle
    return norm_a * max(c_plus, c_minus)


def unit_circle_points(sol: StationarySolution, count: int = 8) -> list[complex]:
    """Points ``exp(i k pi / 4)`` (for ``count = 8``) away from the series poles.

    Points with ``|1 + theta_s z| < POLE_EXCLUSION`` or
    ``|z - theta_s| < POLE_EXCLUSION`` are dropped.
    """
    pts = []
    for k in range(count):
        z = cmath.exp(2j * math.pi * k / count)
        if abs(1 + sol.theta_s * z) < POLE_EXCLUSION or abs(z - sol.theta_s) < POLE_EXCLUSION:
            continue
        pts.append(z)
    return pts


def lemma1_applicable(sol: StationarySolution) -> bool:
    """Both series share the unit circle as a convergence domain only for decaying solutions."""
    return sol.decay_class is DecayClass.DECAYING
