"""One-dimensional generating functions and kernel factors.

Provides the order-2M generating function eta_2m, the time-integral factors
P_M and Q_M, the scaled endpoint argument F, and the overflow-safe Psi_M
used by the box cubature.  The public operations take scalar arguments;
``*_array`` variants operate on numpy arrays and are what the potential
assembly calls in its hot path.

Q_M is mathematically the double Hermite sum of the box kernel, but that
form loses all precision as the time argument goes to zero (its pieces grow
like t^(1/2-2M) while their sum vanishes like sqrt(t)).  The equivalent
closed form

    Q_M(x, t, y) = sqrt(t) * N_M(t, x, y) / (2^(M-2) (M-1)! (1+t)^(2M-2))

with integer-coefficient polynomials N_M (precomputed symbolically, see
_Q_NUM below) is exact and stable for every t on the positive imaginary
axis, so it is used everywhere; the literal double sum is kept as
``q_m_reference`` for cross-checking.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteError
from .specfun import SQRT_PI, hermite, w_upper

M_MAX = 5

_FACT = [math.factorial(k) for k in range(2 * M_MAX)]

# numerator polynomials of Q_M: {(x_deg, y_deg): t-poly coefficients, ascending}
_Q_NUM = {
    2: {(0, 1): (1, 1), (1, 0): (1,)},
    3: {(0, 1): (10, 27, 24, 7), (0, 3): (-2, -6, -6, -2),
        (1, 0): (10, 15, 5), (1, 2): (-2, -4, -2),
        (2, 1): (-2, -2), (3, 0): (-2,)},
    4: {(0, 1): (105, 462, 813, 717, 318, 57),
        (0, 3): (-42, -200, -380, -360, -170, -32),
        (0, 5): (4, 20, 40, 40, 20, 4),
        (1, 0): (105, 315, 348, 171, 33),
        (1, 2): (-42, -150, -198, -114, -24),
        (1, 4): (4, 16, 24, 16, 4),
        (2, 1): (-42, -102, -78, -18),
        (2, 3): (4, 12, 12, 4),
        (3, 0): (-42, -56, -14),
        (3, 2): (4, 8, 4),
        (4, 1): (4, 4),
        (5, 0): (4,)},
    5: {(0, 1): (1260, 7686, 20196, 29685, 26400, 14220, 4296, 561),
        (0, 3): (-756, -4932, -13786, -21410, -19960, -11176, -3482, -466),
        (0, 5): (144, 980, 2856, 4620, 4480, 2604, 840, 116),
        (0, 7): (-8, -56, -168, -280, -280, -168, -56, -8),
        (1, 0): (1260, 5670, 10638, 10773, 6291, 2025, 279),
        (1, 2): (-756, -3888, -8274, -9336, -5904, -1992, -282),
        (1, 4): (144, 812, 1900, 2360, 1640, 604, 92),
        (1, 6): (-8, -48, -120, -160, -120, -48, -8),
        (2, 1): (-756, -2916, -4386, -3222, -1170, -174),
        (2, 3): (144, 648, 1152, 1008, 432, 72),
        (2, 5): (-8, -40, -80, -80, -40, -8),
        (3, 0): (-756, -2016, -1882, -740, -118),
        (3, 2): (144, 488, 600, 312, 56),
        (3, 4): (-8, -32, -48, -32, -8),
        (4, 1): (144, 332, 232, 44),
        (4, 3): (-8, -24, -24, -8),
        (5, 0): (144, 180, 36),
        (5, 2): (-8, -16, -8),
        (6, 1): (-8, -8),
        (7, 0): (-8,)},
}

# H_{2M-1}(x)/x is an even polynomial; coefficients of x^(2j), per M
_ETA_POLY = {}
for _m in range(1, M_MAX + 1):
    _deg = 2 * _m - 1
    _coeffs = np.polynomial.hermite.herm2poly([0] * _deg + [1])  # physicists' H
    _ETA_POLY[_m] = tuple(float(c) for c in _coeffs[1::2])
del _m, _deg, _coeffs


def check_order(M: int) -> int:
    M = int(M)
    if not 1 <= M <= M_MAX:
        raise ValueError(f"approximation order M={M} outside 1..{M_MAX}")
    return M


@dataclass(frozen=True)
class PsiArgs:
    """Arguments of Psi_M: scaled coordinate x, positive theta with time
    argument i*theta, and scaled interval endpoint y."""

    x: float
    theta: float
    y: float

    def __post_init__(self):
        if not self.theta > 0.0:
            raise ValueError("theta must be positive")


def eta_2m(M: int, x) -> float | np.ndarray:
    """Generating function eta_2M(x), order-2M moment conditions.

    Evaluated through the even polynomial H_{2M-1}(x)/x, so the removable
    singularity at x = 0 never appears.
    """
    M = check_order(M)
    x = np.asarray(x, dtype=float)
    x2 = x * x
    acc = np.zeros_like(x)
    for c in reversed(_ETA_POLY[M]):
        acc = acc * x2 + c
    pref = (-1.0) ** (M - 1) / (2.0 ** (2 * M - 1) * SQRT_PI * _FACT[M - 1])
    out = pref * acc * np.exp(-x2)
    return float(out) if out.ndim == 0 else out


def p_m(M: int, x: float, t: complex) -> complex:
    """P_M(x, t): truncated heat-kernel factor, principal branches."""
    return complex(p_m_array(check_order(M), np.asarray([x], dtype=float), complex(t))[0])


def p_m_array(M: int, x: np.ndarray, t: complex) -> np.ndarray:
    one_t = 1.0 + t
    inv_sqrt = one_t ** -0.5
    arg = x * inv_sqrt
    acc = np.full(x.shape, inv_sqrt, dtype=complex)
    if M > 1:
        # advance the H recurrence two orders per term to reach H_{2s}(arg)
        h_prev = np.ones_like(arg)
        h_cur = 2.0 * arg
        power = inv_sqrt
        for s in range(1, M):
            h_prev, h_cur = h_cur, 2.0 * arg * h_cur - 2.0 * (2 * s - 1) * h_prev
            power = power / one_t
            acc += ((-1) ** s / (_FACT[s] * 4.0 ** s)) * power * h_cur
            if s < M - 1:
                h_prev, h_cur = h_cur, 2.0 * arg * h_cur - 2.0 * (2 * s) * h_prev
    return acc


def f_arg(args: PsiArgs) -> complex:
    """Scaled endpoint argument F(x, i*theta, y), principal square root."""
    t = 1j * args.theta
    return complex(cmath.sqrt((t + 1.0) / t) * (args.y - args.x / (t + 1.0)))


def q_m(M: int, args: PsiArgs) -> complex:
    """Q_M(x, i*theta, y); zero for M = 1."""
    M = check_order(M)
    return complex(q_m_array(M, np.asarray([args.x], dtype=float), args.theta,
                             np.asarray([args.y], dtype=float))[0])


def q_m_array(M: int, x: np.ndarray, theta: float, y: np.ndarray) -> np.ndarray:
    if M == 1:
        return np.zeros(np.broadcast(x, y).shape, dtype=complex)
    t = 1j * theta
    s = cmath.sqrt(t)
    acc = np.zeros(np.broadcast(x, y).shape, dtype=complex)
    for (cx, dy), tpoly in _Q_NUM[M].items():
        alpha = 0j
        for coef in reversed(tpoly):
            alpha = alpha * t + coef
        acc = acc + alpha * x ** cx * y ** dy
    den = (2 ** (M - 2) * _FACT[M - 1]) * (1.0 + t) ** (2 * M - 2)
    return (s / den) * acc


def q_m_reference(M: int, x: float, t: complex, y: float) -> complex:
    """Literal double Hermite sum of Q_M (generic complex t).

    Numerically unstable for small |t|; retained as a cross-check of the
    closed form at moderate arguments.
    """
    M = check_order(M)
    if M == 1:
        return 0j
    sq_t = cmath.sqrt(t)
    sq_1t = cmath.sqrt(1.0 + t)
    F = (sq_1t / sq_t) * (y - x / (1.0 + t))
    total = 0j
    for k in range(1, M):
        ck = (-1) ** k / (_FACT[k] * 4.0 ** k)
        inner = 0j
        for ell in range(1, 2 * k + 1):
            t1 = complex(hermite(2 * k - ell, y)) * complex(hermite(ell - 1, (y - x) / sq_t))
            t2 = (math.comb(2 * k, ell) * complex(hermite(2 * k - ell, x / sq_1t))
                  * complex(hermite(ell - 1, F)) / (1.0 + t) ** (k + 0.5))
            inner += (-1) ** ell * sq_t ** (-ell) * (t1 - t2)
        total += ck * inner
    return 2.0 * total


def psi_stable(M: int, args: PsiArgs) -> complex:
    """Psi_M(x, i*theta, y) by the overflow-safe two-branch formula.

    The Faddeeva function is only ever called in the closed upper half
    plane: W(iF) when Re F >= 0, W(-iF) otherwise together with the
    reflected exponential term.
    """
    M = check_order(M)
    out = psi_stable_array(M, np.asarray([args.x], dtype=float), args.theta,
                           np.asarray([args.y], dtype=float))
    return complex(out[0])


def psi_stable_array(M: int, x: np.ndarray, theta: float, y: np.ndarray,
                     pm: np.ndarray | None = None) -> np.ndarray:
    """Vectorized Psi_M at time argument i*theta.

    ``pm`` may carry a precomputed p_m_array(M, x, i*theta); the box sums
    reuse it for both interval endpoints.
    """
    if not theta > 0.0:
        raise ValueError("theta must be positive")
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    t = 1j * theta
    inv_1t = 1.0 / (1.0 + t)
    if pm is None:
        pm = p_m_array(M, x, t)
    F = cmath.sqrt((t + 1.0) / t) * (y - x * inv_1t)
    env = np.exp(-y * y + 1j * ((y - x) ** 2 / theta))
    out = q_m_array(M, x, theta, y)
    out = env * out * (-1.0 / (2.0 * math.pi))
    pos = F.real >= 0.0
    if np.any(pos):
        out[pos] += env[pos] * w_upper(1j * F[pos]) * pm[pos] / (2.0 * SQRT_PI)
    neg = ~pos
    if np.any(neg):
        out[neg] += ((2.0 * np.exp(-(x[neg] ** 2) * inv_1t) - env[neg] * w_upper(-1j * F[neg]))
                     * pm[neg] / (2.0 * SQRT_PI))
    if not np.all(np.isfinite(out)):
        raise NonFiniteError(f"psi_stable produced a non-finite value (theta={theta})")
    return out
