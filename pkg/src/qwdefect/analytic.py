"""
Closed-form eigenstates and stationary measures of the one-phase-defect walk.

The walk uses the Hadamard coin at every site except the origin, where the
coin carries an extra factor ``omega = exp(2 pi i phi)``.  Its eigenvectors
``U Psi = lambda Psi`` with ``Psi(0) = (alpha, beta)`` exist on two
branches, ``beta = i alpha`` and ``beta = -i alpha``.  Away from the origin
the amplitude is geometric in ``theta_s`` and the site measure decays (or
grows) by ``|theta_s|^2`` per site.

Only ``lambda**2`` is fixed by the model.  :func:`select_lambda` takes the
principal root; the other root ``-lambda`` belongs to the eigenvector
``(-1)**x Psi(x)``, which has the same measure.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .core import Amplitude, Measure, WalkState
from .errors import DegenerateStateError, DomainError, SingularParameterError

__all__ = [
    "SINGULAR_TOL",
    "MARGINAL_TOL",
    "DEFAULT_ALPHA",
    "Branch",
    "DecayClass",
    "StationarySolution",
    "wojcik_omega",
    "lambda_squared",
    "select_lambda",
    "theta_s_form1",
    "theta_s_all_forms",
    "theta_s_squared",
    "gamma_factor",
    "classify_decay",
    "build_solution",
    "stationary_amplitude",
    "stationary_state",
    "stationary_measure",
    "stationary_measure_table",
    "half_line_amplitudes",
    "corollary_trig",
    "phase_grid",
]

SINGULAR_TOL = 1e-14
MARGINAL_TOL = 1e-12
DEFAULT_ALPHA = 1.0 / math.sqrt(2.0)
_SQRT2 = math.sqrt(2.0)


class Branch(enum.Enum):
    """Which of the two consistent origin coin states: ``beta = +i alpha`` or ``-i alpha``."""

    PLUS_I = "plus-i"
    MINUS_I = "minus-i"

    @property
    def sign(self) -> int:
        return 1 if self is Branch.PLUS_I else -1

    def beta_for(self, alpha: complex) -> complex:
        return self.sign * 1j * alpha

    @classmethod
    def parse(cls, name: str) -> "Branch":
        try:
            return cls(name.lower().replace("_", "-"))
        except ValueError:
            raise DomainError(f"unknown branch {name!r}; expected 'plus-i' or 'minus-i'") from None


class DecayClass(str, enum.Enum):
    DECAYING = "DECAYING"
    MARGINAL = "MARGINAL"
    GROWING = "GROWING"


@dataclass(frozen=True)
class StationarySolution:
    phase: float
    branch: Branch
    alpha: complex
    beta: complex
    lambda_sq: complex
    lambda_: complex
    theta_s: complex
    theta_l: complex
    gamma: float
    theta_s_abs_sq: float
    decay_class: DecayClass

    @property
    def omega(self) -> complex:
        return wojcik_omega(self.phase)


def _check_phase(phi: float) -> float:
    phi = float(phi)
    if not 0.0 < phi < 1.0:
        raise DomainError(f"phase phi must lie in the open interval (0, 1), got {phi!r}")
    return phi


def wojcik_omega(phi: float) -> complex:
    """The defect phase factor ``exp(2 pi i phi)``."""
    return cmath.exp(2j * math.pi * _check_phase(phi))


def lambda_squared(phi: float, branch: Branch) -> complex:
    """Squared eigenvalue for the given branch.

    ``lambda^2 = omega (1 - 2w + w^2) -/+ i omega (1 - w + w^2)`` over
    ``1 - 2w + 2w^2``, with the minus sign on the ``PLUS_I`` branch.
    """
    w = wojcik_omega(phi)
    den = 1 - 2 * w + 2 * w * w
    if abs(den) <= SINGULAR_TOL:
        raise SingularParameterError("1 - 2*omega + 2*omega^2", phi)
    num = w * (1 - 2 * w + w * w) - branch.sign * 1j * w * (1 - w + w * w)
    return num / den


def select_lambda(lambda_sq: complex) -> complex:
    """Principal square root, with argument in ``(-pi/2, pi/2]``."""
    lambda_sq = complex(lambda_sq)
    if abs(abs(lambda_sq) - 1.0) > MARGINAL_TOL:
        raise DomainError(f"lambda^2 must have unit modulus, got |lambda^2| = {abs(lambda_sq)!r}")
    root = cmath.sqrt(lambda_sq)
    # cmath.sqrt returns arg in [-pi/2, pi/2]; move the -pi/2 edge to +pi/2
    if root.real == 0.0 and root.imag < 0.0:
        root = -root
    return root


def theta_s_form1(lambda_: complex, omega: complex, alpha: complex, beta: complex) -> complex:
    """``theta_s = sqrt2 / (lambda alpha) * ((-lambda^2 + omega/2) alpha - (omega/2) beta)``."""
    if alpha == 0:
        raise DegenerateStateError("alpha = 0: the zero solution has no theta_s")
    if lambda_ == 0:
        raise DomainError("lambda must be nonzero")
    l2 = lambda_ * lambda_
    return _SQRT2 / (lambda_ * alpha) * ((-l2 + omega / 2) * alpha - (omega / 2) * beta)


def theta_s_all_forms(
    lambda_: complex, omega: complex, alpha: complex, beta: complex
) -> tuple[complex, complex, complex, complex]:
    """The four equivalent expressions for ``theta_s``.

    They come from the left/right components of the positive and negative
    half-line generating functions and agree only on a consistent branch.

    Raises
    ------
    DegenerateStateError
        If a denominator vanishes; the message names the offending form.
    """
    if alpha == 0 or beta == 0:
        raise DegenerateStateError("alpha and beta must both be nonzero")
    l2 = lambda_ * lambda_
    den2 = (omega - 1) * alpha - omega * beta
    den3 = omega * alpha + (omega - 1) * beta
    if abs(den2) <= SINGULAR_TOL:
        raise DegenerateStateError("form 2 denominator (omega-1)*alpha - omega*beta vanishes")
    if abs(den3) <= SINGULAR_TOL:
        raise DegenerateStateError("form 3 denominator omega*alpha + (omega-1)*beta vanishes")
    f1 = theta_s_form1(lambda_, omega, alpha, beta)
    f2 = omega * (alpha - beta) / (_SQRT2 * lambda_ * den2)
    f3 = omega * (alpha + beta) / (_SQRT2 * lambda_ * den3)
    f4 = _SQRT2 / (lambda_ * beta) * ((omega / 2) * alpha + (omega / 2 - l2) * beta)
    return f1, f2, f3, f4


def _trig(phi: float) -> tuple[float, float]:
    angle = 2.0 * math.pi * _check_phase(phi)
    return math.cos(angle), math.sin(angle)


def theta_s_squared(phi: float, branch: Branch) -> tuple[complex, float]:
    """``theta_s^2`` from the omega form and ``|theta_s|^2`` from the real trig form.

    Returns
    -------
    (complex, float)
        ``omega / (omega^2 - 3 omega + 1 -/+ i(omega^2 - 1))`` and
        ``1 / (3 - 2 cos(2 pi phi) -/+ 2 sin(2 pi phi))``.
    """
    w = wojcik_omega(phi)
    c, s = _trig(phi)
    den_w = w * w - 3 * w + 1 - branch.sign * 1j * (w * w - 1)
    den_r = 3.0 - 2.0 * c - 2.0 * branch.sign * s
    if abs(den_w) <= SINGULAR_TOL:
        raise SingularParameterError("omega^2 - 3*omega + 1 -/+ i(omega^2 - 1)", phi)
    if abs(den_r) <= SINGULAR_TOL:
        raise SingularParameterError("3 - 2cos(2 pi phi) -/+ 2sin(2 pi phi)", phi)
    return w / den_w, 1.0 / den_r


def gamma_factor(phi: float, branch: Branch) -> float:
    """``2 - cos(2 pi phi) -/+ sin(2 pi phi)``: off-origin weight relative to ``|alpha|^2 |theta_s|^(2|x|)``."""
    c, s = _trig(phi)
    return 2.0 - c - branch.sign * s


def classify_decay(theta_s_abs_sq: float) -> DecayClass:
    if abs(math.sqrt(theta_s_abs_sq) - 1.0) <= MARGINAL_TOL:
        return DecayClass.MARGINAL
    return DecayClass.DECAYING if theta_s_abs_sq < 1.0 else DecayClass.GROWING


def build_solution(phi: float, branch: Branch, alpha: complex = DEFAULT_ALPHA) -> StationarySolution:
    """Assemble the eigen-solution on one branch.

    ``alpha = 0`` gives the zero solution; ``theta_s`` is then taken from
    the unit-scaled state, since it does not depend on the scale of
    ``alpha``.
    """
    phi = _check_phase(phi)
    alpha = complex(alpha)
    beta = branch.beta_for(alpha)
    l2 = lambda_squared(phi, branch)
    lam = select_lambda(l2)
    omega = wojcik_omega(phi)
    if alpha == 0:
        theta_s = theta_s_form1(lam, omega, 1.0, branch.beta_for(1.0))
    else:
        theta_s = theta_s_form1(lam, omega, alpha, beta)
    _, abs_sq = theta_s_squared(phi, branch)
    return StationarySolution(
        phase=phi,
        branch=branch,
        alpha=alpha,
        beta=beta,
        lambda_sq=l2,
        lambda_=lam,
        theta_s=theta_s,
        theta_l=-1.0 / theta_s,
        gamma=gamma_factor(phi, branch),
        theta_s_abs_sq=abs_sq,
        decay_class=classify_decay(abs_sq),
    )


def _side_vectors(sol: StationarySolution) -> tuple[tuple[complex, complex], tuple[complex, complex]]:
    w = sol.omega
    a, b = sol.alpha, sol.beta
    right = (a, (1 - w) * a + w * b)
    left = ((w - 1) * b + w * a, b)
    return right, left


def stationary_amplitude(sol: StationarySolution, x: int) -> Amplitude:
    """Eigenvector component at site ``x``.

    ``x = 0``: ``(alpha, beta)``.
    ``x >= 1``: ``(-theta_s)^x (alpha, (1-w) alpha + w beta)``.
    ``x <= -1``: ``theta_s^|x| ((w-1) beta + w alpha, beta)``.
    """
    if x == 0:
        return Amplitude(sol.alpha, sol.beta)
    right, left = _side_vectors(sol)
    if x > 0:
        f = (-sol.theta_s) ** x
        return Amplitude(f * right[0], f * right[1])
    f = sol.theta_s ** (-x)
    return Amplitude(f * left[0], f * left[1])


def half_line_amplitudes(sol: StationarySolution, positive: bool, n: int) -> NDArray[np.complex128]:
    """Amplitudes at ``x = 1..n`` (``positive``) or ``x = -1..-n``, shape ``(n, 2)``."""
    right, left = _side_vectors(sol)
    k = np.arange(1, n + 1)
    if positive:
        f = (-sol.theta_s) ** k
        vec = right
    else:
        f = sol.theta_s**k
        vec = left
    return np.stack([f * vec[0], f * vec[1]], axis=1)


def stationary_state(sol: StationarySolution, half_width: int) -> WalkState:
    """The eigenvector restricted to ``[-L, L]``."""
    amps = np.empty((2 * half_width + 1, 2), dtype=np.complex128)
    amps[half_width] = (sol.alpha, sol.beta)
    amps[half_width + 1 :] = half_line_amplitudes(sol, True, half_width)
    amps[:half_width] = half_line_amplitudes(sol, False, half_width)[::-1]
    return WalkState(half_width, amps)


def stationary_measure(sol: StationarySolution, x: int) -> float:
    """``2 |alpha|^2`` at the origin, ``2 |alpha|^2 |theta_s|^(2|x|) Gamma`` elsewhere."""
    base = 2.0 * abs(sol.alpha) ** 2
    n = abs(int(x))
    if n == 0:
        return base
    return base * sol.theta_s_abs_sq**n * sol.gamma


def stationary_measure_table(sol: StationarySolution, half_width: int) -> Measure:
    half = [stationary_measure(sol, x) for x in range(half_width + 1)]
    return Measure(half_width, np.array(half[:0:-1] + half))


def corollary_trig(phi: float, branch: Branch) -> tuple[float, float]:
    """``(cos 2xi, sin 2xi)`` as rational functions of ``C = cos 2 pi phi``, ``S = sin 2 pi phi``.

    These are the real and imaginary parts of ``lambda^2 = exp(2 i xi)``.
    """
    C, S = _trig(phi)
    den = 5.0 - 12.0 * C + 8.0 * C * C
    if abs(den) <= SINGULAR_TOL:
        raise SingularParameterError("5 - 12C + 8C^2", phi)
    C2, C3, S3, CS = C * C, C**3, S**3, C * S
    if branch is Branch.PLUS_I:
        cos2 = -2 + 6 * C + 6 * S - 6 * CS - 8 * C2 + 4 * C3 - 4 * S3
        sin2 = 1 - 4 * C + 8 * S - 8 * CS + 6 * C2 - 4 * C3 - 4 * S3
    else:
        cos2 = -2 + 6 * C - 6 * S + 6 * CS - 8 * C2 + 4 * C3 + 4 * S3
        sin2 = -1 + 4 * C + 8 * S - 8 * CS - 6 * C2 + 4 * C3 - 4 * S3
    return cos2 / den, sin2 / den


def phase_grid(n: int) -> list[float]:
    """``n`` uniformly spaced phases ``(k + 1/4) / n`` inside ``(0, 1)``.

    The quarter-step offset keeps the grid off the endpoints; for
    ``n = 1 (mod 4)`` it also places ``phi = 1/4`` exactly on the grid.
    """
    if n < 1:
        raise DomainError(f"grid needs at least one point, got {n}")
    return [(k + 0.25) / n for k in range(n)]
