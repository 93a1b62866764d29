"""Double-exponential substitution of the half-line time integral.

The substitution chain  t = exp(xi),  xi = a (v + exp(v)),  v = b (u - exp(-u))
maps (0, inf) to the real line with an integrand decaying at double-exponential
speed on both sides; the trapezoidal rule with step tau is then applied over a
window found by thresholding a caller-supplied envelope probe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import fsum
from typing import Callable, Sequence

import numpy as np

from .errors import NonFiniteError, OverflowSignal, TruncationFailure

#: largest exponent such that exp() stays inside double range
_EXP_MAX = 709.0


@dataclass(frozen=True)
class DEParams:
    """Parameters of the double-exponential trapezoid rule."""

    a: float = 6.0
    b: float = 4.0
    tau: float = 1e-2
    trunc_threshold: float = 1e-12
    max_nodes: int = 20_000_000

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("a and b must be positive")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError("tau must lie in (0, 1]")
        if not 0.0 < self.trunc_threshold <= 1e-8:
            raise ValueError("trunc_threshold must lie in (0, 1e-8]")
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be positive")


@dataclass(frozen=True)
class DENode:
    """One trapezoid node: abscissa u, t = phi(u), phi'(u), weight tau."""

    u: float
    phi: float
    phi_prime: float
    weight: float


def phi(u: float, a: float = 6.0, b: float = 4.0) -> float:
    """Substitution t = Phi(u) = exp(a b (u - e^-u) + a e^{b (u - e^-u)})."""
    v = b * (u - math.exp(-u))
    if v > _EXP_MAX:
        raise OverflowSignal(f"phi overflows at u={u}")
    e = a * v + a * math.exp(v)
    if e > _EXP_MAX:
        raise OverflowSignal(f"phi overflows at u={u}")
    return math.exp(e)


def phi_prime(u: float, a: float = 6.0, b: float = 4.0) -> float:
    """Analytic derivative Phi'(u) = Phi(u) a b (1 + e^-u)(1 + e^{b(u - e^-u)})."""
    v = b * (u - math.exp(-u))
    p = phi(u, a, b)
    grow = a * b * (1.0 + math.exp(-u)) * (1.0 + math.exp(min(v, _EXP_MAX)))
    out = p * grow
    if not math.isfinite(out):
        raise OverflowSignal(f"phi_prime overflows at u={u}")
    return out


def _probe_value(decay_probe: Callable[[float], float], u: float) -> float:
    try:
        v = decay_probe(u)
    except OverflowSignal:
        return 0.0
    if not math.isfinite(v) or v < 0.0:
        raise ValueError(f"decay probe returned invalid value {v} at u={u}")
    return v


def nodes(params: DEParams, decay_probe: Callable[[float], float]) -> list[DENode]:
    """Trapezoid nodes {s tau : -N0 <= s <= N1} by envelope thresholding.

    N0 and N1 are the smallest indices at which the probe drops below
    ``trunc_threshold`` times the running maximum of all probed values;
    the first sub-threshold node on each side is kept as the boundary.
    A probe raising OverflowSignal counts as zero (fully decayed).
    """
    tau = params.tau
    run_max = _probe_value(decay_probe, 0.0)
    s = 1
    while True:
        v = _probe_value(decay_probe, s * tau)
        run_max = max(run_max, v)
        if v <= params.trunc_threshold * run_max:
            break
        s += 1
        if s > params.max_nodes:
            raise TruncationFailure(f"no right decay within {params.max_nodes} nodes")
    n1 = s
    s = -1
    while True:
        v = _probe_value(decay_probe, s * tau)
        run_max = max(run_max, v)
        if v <= params.trunc_threshold * run_max:
            break
        s -= 1
        if n1 - s > params.max_nodes:
            raise TruncationFailure(f"no left decay within {params.max_nodes} nodes")
    n0 = -s

    out = []
    for s in range(-n0, n1 + 1):
        u = s * tau
        try:
            out.append(DENode(u, phi(u, params.a, params.b),
                              phi_prime(u, params.a, params.b), tau))
        except OverflowSignal:
            # boundary node pushed past the representable range: drop it
            continue
    return out


def integrate(node_list: Sequence[DENode], f: Callable[[DENode], complex]) -> complex:
    """tau * sum_s f(node_s) with exact (fsum) compensated accumulation.

    Nodes are consumed in ascending u; the summation itself is performed
    with math.fsum on the real and imaginary parts, which makes the result
    independent of evaluation interleaving.
    """
    if not node_list:
        raise ValueError("empty node list")
    vals = [complex(f(nd)) for nd in node_list]
    for nd, v in zip(node_list, vals):
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise NonFiniteError(f"integrand non-finite at u={nd.u}", u=nd.u)
    tau = node_list[0].weight
    return tau * complex(fsum(v.real for v in vals), fsum(v.imag for v in vals))


def kbn_sum_complex(values: np.ndarray, axis: int = 0) -> np.ndarray:
    """Kahan-Babuska-Neumaier compensated sum of a complex array along axis.

    Vectorized over the remaining axes; deterministic for a fixed input
    order.  Used for the rank sums of the tensor contraction.
    """
    values = np.moveaxis(values, axis, 0)
    re = _kbn_real(values.real)
    im = _kbn_real(values.imag)
    return re + 1j * im


def _kbn_real(a: np.ndarray) -> np.ndarray:
    s = a[0].astype(float).copy()
    comp = np.zeros_like(s)
    for k in range(1, a.shape[0]):
        x = a[k]
        t = s + x
        big = np.abs(s) >= np.abs(x)
        comp += np.where(big, (s - t) + x, (x - t) + s)
        s = t
    return s + comp
