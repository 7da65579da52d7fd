"""Scaled modified I-Bessel functions, theta functions and numeric constants.

Everything here works with the exponentially scaled combination e^{-t} I_x(t)
(the discrete heat kernel on Z); the unscaled Bessel function overflows for
the n^2 t arguments the asymptotics need.  Small arguments use the power
series, large arguments a trapezoid rule on the window of the integral
representation that carries all the mass, with the exponent written as
-2t sin^2(w/2) so no accuracy is lost to 1-cos cancellation.

Discrete theta functions come in two forms that theta inversion says are
equal: the spectral sum over Laplacian eigenvalues and the Bessel lattice
sum.  Truncations of the lattice sum are certified with the uniform bound

    sqrt(z) e^{-z} I_m(z) <= (1 + m/z)^{-m/2}

whose right side is log-concave and decreasing in m, so order tails are
dominated by geometric series.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graphs import CirculantSpec, GraphSpec, circulant_spectrum, torus_spectrum

__all__ = [
    "SpecfunError",
    "EULER_GAMMA",
    "ThetaValue",
    "bessel_i_scaled",
    "bessel_i_scaled_orders",
    "bessel_multi_scaled",
    "bessel_tail_envelope",
    "theta_discrete_spectral",
    "theta_discrete_bessel",
    "theta_circle",
    "theta_real_torus",
    "dedekind_eta",
    "riemann_zeta_real",
    "catalan_constant",
]


class SpecfunError(ValueError):
    """Invalid argument or unsatisfiable accuracy request."""


#: -Gamma'(1), to 30 digits.
EULER_GAMMA = 0.577215664901532860606512090082

_SERIES_SWITCH = 30.0
_MAX_QUAD_POINTS = 1 << 23


# ---------------------------------------------------------------------------
# Scaled I-Bessel: power series branch
# ---------------------------------------------------------------------------


def _series_scalar(m: int, z: float) -> float:
    """e^{-z} I_m(z) by the power series; intended for z below the switch point."""
    if z == 0.0:
        return 1.0 if m == 0 else 0.0
    log_base = m * math.log(z / 2.0) - math.lgamma(m + 1) - z
    if log_base < -760.0:
        return 0.0
    q = 0.25 * z * z
    s = 1.0
    term = 1.0
    k = 1
    while True:
        term *= q / (k * (k + m))
        s += term
        if term < 1e-18 * s:
            break
        if s > 1e290:
            return math.inf  # normalized series overflows; caller falls back
        k += 1
    if log_base > -600.0:
        return math.exp(log_base) * s
    return math.exp(log_base + math.log(s))


def _series_orders(z: float, m_max: int) -> np.ndarray:
    """e^{-z} I_m(z) for m = 0..m_max, vectorized over orders."""
    ms = np.arange(m_max + 1, dtype=float)
    if z == 0.0:
        out = np.zeros(m_max + 1)
        out[0] = 1.0
        return out
    lgam = np.array([math.lgamma(m + 1.0) for m in range(m_max + 1)])
    log_base = ms * math.log(z / 2.0) - lgam - z
    base = np.where(log_base < -760.0, 0.0, np.exp(np.maximum(log_base, -760.0)))
    q = 0.25 * z * z
    s = np.ones(m_max + 1)
    term = np.ones(m_max + 1)
    for k in range(1, 100000):
        term *= q / (k * (k + ms))
        s += term
        if term.max() < 1e-18:
            break
    return base * s


# ---------------------------------------------------------------------------
# Scaled I-Bessel: window-trapezoid branch (large argument)
# ---------------------------------------------------------------------------


def _window_quad(exponent_scale: float, phi_terms: Sequence[tuple[float, float]],
                 orders: np.ndarray, window: float, n0: int) -> np.ndarray:
    """(1/pi) int_0^w exp(-sum_j c_j * 2 sin^2(g_j w / 2)) cos(m w) dw per order.

    ``phi_terms`` is a list of (c_j, g_j) pairs; doubling of the trapezoid
    grid continues until the whole order vector is stable.
    """
    n = max(128, n0)
    n = 1 << (n - 1).bit_length()
    prev = None
    scale_floor = 1.0 / math.sqrt(2.0 * math.pi * max(exponent_scale, 1.0))
    while n <= _MAX_QUAD_POINTS:
        theta = np.linspace(0.0, window, n + 1)
        expo = np.zeros(n + 1)
        for c, g in phi_terms:
            s = np.sin(0.5 * g * theta)
            expo -= 2.0 * c * s * s
        env = np.exp(expo)
        env[0] *= 0.5
        env[-1] *= 0.5
        vals = np.empty(len(orders))
        chunk = 256
        for i in range(0, len(orders), chunk):
            block = orders[i:i + chunk, None] * theta[None, :]
            vals[i:i + chunk] = np.cos(block) @ env
        vals *= window / (n * math.pi)
        if prev is not None:
            scale = max(float(np.max(np.abs(vals))), scale_floor)
            if float(np.max(np.abs(vals - prev))) <= 1e-13 * scale:
                return vals
        prev = vals
        n *= 2
    raise SpecfunError("Bessel quadrature did not stabilize; argument too hard")


def _quad_orders(t: float, orders: np.ndarray) -> np.ndarray:
    """e^{-t} I_m(t) for the given non-negative orders, t at or above the switch."""
    m_max = float(orders.max()) if orders.size else 0.0
    E = 50.0 + 0.5 * math.log1p(t) + min(m_max * m_max / (2.0 * t), 700.0)
    w = min(math.pi, math.pi * math.sqrt(E / (2.0 * t)))
    n0 = int(8.0 * math.sqrt(0.5 * E)) + int(1.3 * m_max * w) + 64
    return _window_quad(t, [(t, 1.0)], orders, w, n0)


def bessel_i_scaled(order: int, t: float) -> float:
    """Scaled modified Bessel function e^{-t} I_|order|(t).

    Series for t below the switch point, window quadrature of the integral
    representation above it.  The quadrature has an absolute accuracy floor
    of order 1e-17, so tail orders at moderate t (where the series is still
    affordable) are routed to the series to keep relative accuracy; beyond
    that, values under ~1e-13 of the order-0 value are absolute-accurate
    only.
    """
    if t < 0.0:
        raise SpecfunError(f"t must be non-negative, got {t}")
    m = abs(int(order))
    if t < _SERIES_SWITCH or (t <= 900.0 and m * m >= 20.0 * t):
        val = _series_scalar(m, t)
        if math.isfinite(val):
            return val
    return float(_quad_orders(t, np.array([m], dtype=float))[0])


def bessel_i_scaled_orders(t: float, m_max: int) -> np.ndarray:
    """Vector of e^{-t} I_m(t) for m = 0..m_max (shared-grid evaluation)."""
    if t < 0.0:
        raise SpecfunError(f"t must be non-negative, got {t}")
    if t < _SERIES_SWITCH:
        return _series_orders(t, m_max)
    return _quad_orders(t, np.arange(m_max + 1, dtype=float))


def bessel_multi_scaled(generators: Sequence[int], order: int, u: float) -> float:
    """Scaled d-dimensional I-Bessel e^{-d u} I_order^Gamma(u, ..., u).

    Quadrature of (1/2pi) int_{-pi}^{pi} e^{u(cos w + sum cos(g_i w) - d)}
    cos(order * w) dw.  Symmetric in order <-> -order.
    """
    if u < 0.0:
        raise SpecfunError(f"u must be non-negative, got {u}")
    gens = tuple(int(g) for g in generators)
    if not gens or any(g < 1 for g in gens):
        raise SpecfunError(f"generators must be positive integers: {generators}")
    m = abs(int(order))
    if u == 0.0:
        return 1.0 if m == 0 else 0.0
    c_sum = float(sum(g * g for g in gens))
    E = 50.0 + 0.5 * math.log1p(u) + min(m * m / (2.0 * c_sum * u), 700.0)
    if 1 in gens:
        w = min(math.pi, math.pi * math.sqrt(E / (2.0 * u)))
    else:
        w = math.pi  # no generator-1 lower bound on the exponent; keep the full window
    n0 = int(8.0 * math.sqrt(0.5 * E)) + int(1.3 * m * w) + 64 * max(gens)
    vals = _window_quad(c_sum * u, [(u, float(g)) for g in gens],
                        np.array([m], dtype=float), w, n0)
    return float(vals[0])


# ---------------------------------------------------------------------------
# Certified order tails
# ---------------------------------------------------------------------------


def bessel_tail_envelope(order: int, z: float) -> float:
    """Upper bound (1 + m/z)^{-m/2} / sqrt(z) for e^{-z} I_m(z), integer m >= 0."""
    if z <= 0.0:
        return 1.0 if order == 0 else 0.0
    m = abs(int(order))
    # log form; the plain power overflows its intermediate for large m
    return math.exp(-0.5 * m * math.log1p(m / z) - 0.5 * math.log(z))


def _bessel_tail_sum(m0: int, step: int, z: float) -> float:
    """Bound on sum_{k>=0} e^{-z} I_{m0 + k step}(z) via the geometric envelope."""
    if z <= 0.0:
        return 0.0
    e0 = bessel_tail_envelope(m0, z)
    if e0 == 0.0:
        return 0.0
    e1 = bessel_tail_envelope(m0 + step, z)
    r = e1 / e0
    if r >= 0.999:
        return e0 * 1e4  # hopeless ratio; force the caller to enlarge the cutoff
    return e0 / (1.0 - r)


# ---------------------------------------------------------------------------
# Theta functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaValue:
    """Discrete theta value with its truncation diagnostics."""

    t: float
    value: float
    tail_bound: float = 0.0
    terms: int = 0


def theta_discrete_spectral(spec: GraphSpec, t: float) -> ThetaValue:
    """Spectral side: sum_j e^{-lambda_j t} over the full spectrum."""
    if isinstance(spec, CirculantSpec):
        lam = circulant_spectrum(spec).values
    else:
        lam = torus_spectrum(spec).values
    value = math.fsum(np.exp(-lam * t))
    return ThetaValue(t=t, value=value, tail_bound=0.0, terms=int(lam.size))


def _circulant_bessel_sum(spec: CirculantSpec, z: float, cutoff: int,
                          coeffs: np.ndarray) -> tuple[float, int]:
    """n * sum over the lattice Lambda_Gamma Z^d of scaled Bessel products."""
    n = spec.n
    gens = spec.generators[1:]
    d = spec.d
    terms = 0
    # enumerate the identity-block coordinates, then the admissible k_1
    boxes = [range(-cutoff, cutoff + 1)] * (d - 1)
    acc = []
    for ks in itertools.product(*boxes):
        prod_rest = 1.0
        for k in ks:
            prod_rest *= coeffs[abs(k)]
        if prod_rest == 0.0:
            continue
        shift = sum(g * k for g, k in zip(gens, ks))
        k1_lo = math.ceil((shift - cutoff) / n)
        k1_hi = math.floor((shift + cutoff) / n)
        for k1 in range(k1_lo, k1_hi + 1):
            y1 = n * k1 - shift
            acc.append(coeffs[abs(y1)] * prod_rest)
            terms += 1
    return n * math.fsum(acc), terms


def theta_discrete_bessel(spec: GraphSpec, t: float, truncation: int | None = None,
                          tol: float = 1e-12) -> ThetaValue:
    """Bessel lattice-sum side of theta inversion, truncated with certified tails.

    ``truncation`` is the maximum Bessel order kept in any lattice direction;
    when omitted the smallest cutoff whose certified tail is below ``tol`` is
    used.  An explicitly given insufficient cutoff raises SpecfunError and
    reports the required one.
    """
    if t < 0.0:
        raise SpecfunError(f"t must be non-negative, got {t}")
    z = 2.0 * t

    def tail_bound(cutoff: int) -> float:
        if isinstance(spec, CirculantSpec):
            inner = (spec.d - 1) * _bessel_tail_sum(cutoff + 1, 1, z) \
                + _bessel_tail_sum(cutoff + 1, spec.n, z)
            return 2.0 * spec.n * inner
        # each kept factor is <= l_i (probability identity), so the product
        # tail is at most sum_i T_i * prod_{j != i} l_j = det(Lambda) sum T_i/l_i
        det = math.prod(spec.sides)
        total = 0.0
        for l in spec.sides:
            k_kept = cutoff // l
            total += 2.0 * det * _bessel_tail_sum((k_kept + 1) * l, l, z)
        return total

    if truncation is None:
        cutoff = None
        y = 8
        while y <= 100000:
            if tail_bound(y) <= 0.5 * tol:
                cutoff = y
                break
            y = max(y + 4, int(y * 1.4))
        if cutoff is None:
            raise SpecfunError(f"no certified cutoff below {tol} for t={t}")
    else:
        cutoff = int(truncation)
        bound = tail_bound(cutoff)
        if bound > tol:
            y = cutoff
            while y <= 100000 and tail_bound(y) > 0.5 * tol:
                y = max(y + 4, int(y * 1.4))
            raise SpecfunError(
                f"truncation {cutoff} gives certified tail {bound:.3e} > {tol:.1e}; "
                f"need at least {y}"
            )

    coeffs = bessel_i_scaled_orders(z, cutoff)
    if isinstance(spec, CirculantSpec):
        value, terms = _circulant_bessel_sum(spec, z, cutoff, coeffs)
    else:
        value = 1.0
        terms = 0
        for l in spec.sides:
            k_kept = cutoff // l
            fac = coeffs[0] + 2.0 * math.fsum(coeffs[k * l] for k in range(1, k_kept + 1))
            value *= l * fac
            terms += 1 + 2 * k_kept
    return ThetaValue(t=t, value=value, tail_bound=tail_bound(cutoff), terms=terms)


def theta_circle(t: float) -> float:
    """Theta function of the unit circle R/Z.

    Eigenvalue form sum_k e^{-4 pi^2 k^2 t} for t >= 1, Gaussian (inverted)
    form (4 pi t)^{-1/2} sum_k e^{-k^2/(4t)} for t < 1; both tails below 1e-14
    of the value.
    """
    if t <= 0.0:
        raise SpecfunError(f"t must be positive, got {t}")
    if t >= 1.0:
        s = 1.0
        k = 1
        while True:
            term = 2.0 * math.exp(-4.0 * math.pi * math.pi * k * k * t)
            s += term
            if term < 1e-16 * s:
                break
            k += 1
        return s
    s = 1.0
    k = 1
    while True:
        term = 2.0 * math.exp(-k * k / (4.0 * t))
        s += term
        if term < 1e-16 * s:
            break
        k += 1
    return s / math.sqrt(4.0 * math.pi * t)


def theta_real_torus(sides: Sequence[float], t: float) -> float:
    """Theta of the diagonal real torus R^r / diag(sides) Z^r.

    Eigenvalues are (2 pi)^2 sum (k_i / m_i)^2, so the theta factorizes into
    circle thetas with per-factor rescaled time t / m_i^2.
    """
    if t <= 0.0:
        raise SpecfunError(f"t must be positive, got {t}")
    sides = tuple(float(m) for m in sides)
    if not sides or any(m <= 0 for m in sides):
        raise SpecfunError(f"sides must be positive: {sides}")
    return math.prod(theta_circle(t / (m * m)) for m in sides)


def theta_real_torus_minus_leading(sides: Sequence[float], t: float) -> float:
    """Theta(t) - det(M) (4 pi t)^{-r/2}, computed without cancellation for small t.

    Each Gaussian-form circle factor is m_i (4 pi t)^{-1/2} (1 + eps_i); the
    difference is the leading coefficient times prod(1+eps_i) - 1, accumulated
    stably.  Used by the spectral zeta derivative integrals.
    """
    sides = tuple(float(m) for m in sides)
    if t >= min(m * m for m in sides):
        lead = math.prod(sides) * (4.0 * math.pi * t) ** (-0.5 * len(sides))
        return theta_real_torus(sides, t) - lead
    eps = []
    for m in sides:
        tt = t / (m * m)
        e = 0.0
        k = 1
        while True:
            term = 2.0 * math.exp(-k * k / (4.0 * tt))
            e += term
            if term < 1e-17 * (1.0 + e):
                break
            k += 1
        eps.append(e)
    prod_minus_one = 0.0
    for e in eps:
        prod_minus_one += e + prod_minus_one * e
    lead = math.prod(sides) * (4.0 * math.pi * t) ** (-0.5 * len(sides))
    return lead * prod_minus_one


# ---------------------------------------------------------------------------
# Dedekind eta and numeric constants
# ---------------------------------------------------------------------------


def dedekind_eta(y: float) -> float:
    """eta(iy) = e^{-pi y/12} prod_{n>=1} (1 - e^{-2 pi n y}) for y > 0."""
    if y <= 0.0:
        raise SpecfunError(f"y must be positive, got {y}")
    q = math.exp(-2.0 * math.pi * y)
    prod = 1.0
    qn = q
    while qn >= 1e-17:
        prod *= 1.0 - qn
        qn *= q
    return math.exp(-math.pi * y / 12.0) * prod


# Bernoulli numbers B_2..B_12 for the Euler-Maclaurin correction.
_BERNOULLI = (1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730)


def riemann_zeta_real(s: float) -> float:
    """zeta(s) for real s > 1 by Euler-Maclaurin acceleration of the direct sum."""
    if s <= 1.0:
        raise SpecfunError(f"need s > 1, got {s}")
    N = 24
    head = math.fsum(k ** -s for k in range(1, N))
    tail = N ** (1.0 - s) / (s - 1.0) + 0.5 * N ** -s
    # correction terms B_{2j}/(2j)! * (s)(s+1)...(s+2j-2) * N^{-s-2j+1}
    poch = s
    fact = 2.0
    power = N ** (-s - 1.0)
    corr = 0.0
    for j, b in enumerate(_BERNOULLI, start=1):
        corr += b / fact * poch * power
        poch *= (s + 2 * j - 1) * (s + 2 * j)
        fact *= (2 * j + 1) * (2 * j + 2)
        power /= N * N
    return head + tail + corr


def catalan_constant() -> float:
    """Catalan constant G = sum_{k>=0} (-1)^k/(2k+1)^2, CVZ-accelerated."""
    n = 40
    d = (3.0 + math.sqrt(8.0)) ** n
    d = 0.5 * (d + 1.0 / d)
    b = -1.0
    c = -d
    s = 0.0
    for k in range(n):
        c = b - c
        s += c / ((2 * k + 1) * (2 * k + 1))
        b *= (k + n) * (k - n) / ((k + 0.5) * (k + 1.0))
    return s / d
