"""Q-bit amplitude representation and the rotation-gate variation operator.

A Q-bit is a pair of real amplitudes (alpha, beta) with alpha^2 + beta^2 = 1;
alpha^2 is the probability of observing 0.  A candidate solution is encoded as
a string of Q-bits, collapsed to a concrete bit vector by sampling, and nudged
toward an attractor solution by 2x2 rotations whose magnitude is picked from
an eight-entry lookup keyed on (observed bit, attractor bit, attractor-better).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

SQRT_HALF = 2.0 ** -0.5

# Case order of the rotation lookup: index = 4*x + 2*b + (0 if better else 1),
# giving cases 1..8 for (x,b,better) = (0,0,T),(0,0,F),(0,1,T),...,(1,1,F).
_CASES = 8


class Qbit(NamedTuple):
    alpha: float
    beta: float

    def prob_zero(self) -> float:
        return self.alpha * self.alpha


@dataclass
class RotationPolicy:
    """Eight rotation-angle magnitudes (radians) plus the optimization sense.

    The sign of each rotation is not stored: it follows from the quadrant of
    the Q-bit and the target basis state (see :func:`delta_theta`).
    """

    thetas: tuple  # 8 non-negative magnitudes, radians
    maximize: bool = True

    def __post_init__(self):
        self.thetas = tuple(float(t) for t in self.thetas)
        if len(self.thetas) != _CASES:
            raise ValueError("rotation policy needs exactly 8 angle magnitudes")
        if any(t < 0 for t in self.thetas):
            raise ValueError("rotation angle magnitudes must be >= 0")
        self._table = np.asarray(self.thetas, dtype=np.float64)

    @classmethod
    def from_pi_multiples(cls, multiples, maximize: bool = True) -> "RotationPolicy":
        return cls(tuple(float(m) * math.pi for m in multiples), maximize)

    @classmethod
    def canonical(cls, maximize: bool = True) -> "RotationPolicy":
        """Widely used default: theta3 = theta5 = 0.01*pi, all others zero."""
        return cls.from_pi_multiples((0, 0, 0.01, 0, 0.01, 0, 0, 0), maximize)

    @property
    def pi_multiples(self) -> tuple:
        return tuple(t / math.pi for t in self.thetas)

    @property
    def table(self) -> np.ndarray:
        return self._table


@dataclass
class QbitString:
    """Fixed-length string of Q-bits stored as parallel amplitude arrays."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=np.float64)
        self.beta = np.asarray(self.beta, dtype=np.float64)
        if self.alpha.shape != self.beta.shape or self.alpha.ndim != 1:
            raise ValueError("alpha and beta must be 1-D arrays of equal length")
        if len(self.alpha) == 0:
            raise ValueError("empty Q-bit string")
        norm = self.alpha ** 2 + self.beta ** 2
        if np.max(np.abs(norm - 1.0)) > 1e-9:
            raise ValueError("Q-bit amplitudes must satisfy alpha^2 + beta^2 = 1")

    def __len__(self) -> int:
        return len(self.alpha)

    def qbit(self, i: int) -> Qbit:
        return Qbit(float(self.alpha[i]), float(self.beta[i]))


def init_equal(n: int) -> QbitString:
    """All amplitudes 1/sqrt(2): every bit observes 0 or 1 with equal probability."""
    if n < 1:
        raise ValueError("bit count must be >= 1")
    return QbitString(np.full(n, SQRT_HALF), np.full(n, SQRT_HALF))


def init_random(n: int, rng: np.random.Generator) -> QbitString:
    """Random normalized amplitudes via a uniform angle in [0, 2*pi)."""
    if n < 1:
        raise ValueError("bit count must be >= 1")
    phi = rng.uniform(0.0, 2.0 * math.pi, n)
    return QbitString(np.cos(phi), np.sin(phi))


def observe(q: QbitString, rng: np.random.Generator) -> np.ndarray:
    """Collapse to a bit vector: bit_i = 0 iff r_i < alpha_i^2, r_i ~ U[0,1)."""
    r = rng.random(len(q))
    return (r >= q.alpha ** 2).astype(np.uint8)


def observe_amplitudes(alpha: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Array kernel used by the engine; works on any-shaped alpha."""
    return (rng.random(alpha.shape) >= alpha ** 2).astype(np.uint8)


def theta_case(x: int, b: int, better: bool) -> int:
    """Lookup case 1..8 for (observed bit, attractor bit, attractor-better)."""
    return 4 * int(x) + 2 * int(b) + (1 if better else 2)


def _target_one(x, b, better):
    # Case -> target basis state: |1> for cases 3,6,7,8, |0> for 1,2,4,5.
    # Equivalently: rotate toward the attractor bit if it did better, else
    # reinforce the bit the individual itself observed.
    return np.where(better, b == 1, x == 1)


def delta_theta(x: int, b: int, better: bool, q: Qbit, policy: RotationPolicy,
                rng: np.random.Generator) -> float:
    """Signed rotation angle for one Q-bit.

    Magnitude comes from the policy entry for case (x, b, better).  The sign
    drives the amplitude toward the case's target state given the quadrant of
    (alpha, beta); on an axis (alpha*beta == 0) the sign is drawn uniformly.
    """
    mag = policy.thetas[theta_case(x, b, better) - 1]
    prod = q.alpha * q.beta
    toward_one = bool(_target_one(x, b, better))
    if prod == 0.0:
        sign = 1.0 if rng.random() < 0.5 else -1.0
    else:
        sign = math.copysign(1.0, prod) * (1.0 if toward_one else -1.0)
    return sign * mag


def delta_theta_arrays(x: np.ndarray, b: np.ndarray, better, alpha: np.ndarray,
                       beta: np.ndarray, policy: RotationPolicy,
                       rng: np.random.Generator) -> np.ndarray:
    """Vectorized :func:`delta_theta`; `better` broadcasts against the bits."""
    better = np.asarray(better, dtype=bool)
    if better.ndim < x.ndim:
        better = better[..., None]
    case = 4 * x.astype(np.intp) + 2 * b.astype(np.intp) + np.where(better, 0, 1)
    mag = policy.table[case]
    prod = alpha * beta
    sign = np.where(_target_one(x, b, better), 1.0, -1.0) * np.sign(prod)
    on_axis = prod == 0.0
    if np.any(on_axis):
        sign = np.where(on_axis, rng.choice((-1.0, 1.0), size=sign.shape), sign)
    return sign * mag


def rotate(q: Qbit, dtheta: float) -> Qbit:
    """Apply the unitary rotation gate; preserves alpha^2 + beta^2."""
    c, s = math.cos(dtheta), math.sin(dtheta)
    return Qbit(c * q.alpha - s * q.beta, s * q.alpha + c * q.beta)


def rotate_arrays(alpha: np.ndarray, beta: np.ndarray, dtheta: np.ndarray):
    c = np.cos(dtheta)
    s = np.sin(dtheta)
    return c * alpha - s * beta, s * alpha + c * beta


def diversity(q: QbitString, eps: float) -> int:
    """Number of Q-bits whose collapse probability is within eps of 0 or 1.

    The string is considered converged when the count equals its length.
    """
    if not 0.0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 0.5)")
    a2 = q.alpha ** 2
    return int(np.count_nonzero((a2 < eps) | (a2 > 1.0 - eps)))
