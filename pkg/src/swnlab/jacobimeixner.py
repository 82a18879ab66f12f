"""Ladder matrices, Meixner-class orthogonal polynomials, and their measures.

The probability measure whose monic orthogonal polynomials satisfy

    s * p_n(s) = p_{n+1}(s) + beta*(n+1)*p_n(s) + n*(n+1)*p_{n-1}(s)

comes in three regimes, keyed by the parameter beta >= 0:

* ``meixner`` (0 <= beta < 2): absolutely continuous on the whole line,
* ``gamma``  (beta == 2): density s*exp(-s) on (0, inf),
* ``pascal`` (beta > 2): atoms on the lattice sqrt(beta^2-4)*{1, 2, ...}.

This module exposes the tridiagonal ladder matrix whose first-entry powers
give the moments of that measure, the polynomial recurrence, densities and
atom masses, the jump measure obtained by dividing by s^2, the marginal
laws of the compensated noise over a window of given area, cumulants, the
moment/cumulant composition, and the Gram cross-check of the embedded
polynomials s*p_{n-1} under the jump measure.

Moments are always computed from matrix powers (exact up to floating
point, uniform across regimes); densities and series serve as independent
cross-checks driven by quadrature or lattice summation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

from scipy.integrate import quad

from .basespace import GridFunction, power_integral

REGIME_MEIXNER = "meixner"
REGIME_GAMMA = "gamma"
REGIME_PASCAL = "pascal"

_TAIL = 1e-13  # integrand endpoint mass relative to peak when picking a window


# ---------------------------------------------------------------------------
# Jacobi matrices


@dataclass(frozen=True)
class JacobiMatrix:
    """Symmetric tridiagonal matrix: diagonal plus nonnegative off-diagonal."""

    diag: tuple
    off: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "diag", tuple(float(a) for a in self.diag))
        object.__setattr__(self, "off", tuple(float(b) for b in self.off))
        if len(self.diag) < 1:
            raise ValueError("JacobiMatrix needs at least one diagonal entry")
        if len(self.off) != len(self.diag) - 1:
            raise ValueError("off-diagonal length must be size - 1")
        if any(b < 0 for b in self.off):
            raise ValueError("off-diagonal entries must be nonnegative")

    @property
    def size(self) -> int:
        return len(self.diag)

    def matvec(self, v: Sequence[float]) -> List[float]:
        n = self.size
        out = [self.diag[i] * v[i] for i in range(n)]
        for i, b in enumerate(self.off):
            out[i] += b * v[i + 1]
            out[i + 1] += b * v[i]
        return out

    def dense(self):
        import numpy as np

        m = np.diag(self.diag)
        for i, b in enumerate(self.off):
            m[i, i + 1] = b
            m[i + 1, i] = b
        return m


def vacuum_moments(matrix: JacobiMatrix, j_max: int) -> List[float]:
    """First-entry power moments (matrix^j)[0, 0] for j = 0..j_max."""
    if j_max < 0:
        raise ValueError("j_max must be >= 0")
    v = [0.0] * matrix.size
    v[0] = 1.0
    out = [1.0]
    for _ in range(j_max):
        v = matrix.matvec(v)
        out.append(v[0])
    return out


def jacobi_beta(beta: float, size: int) -> JacobiMatrix:
    """Ladder matrix: diagonal beta*n, off-diagonal sqrt(n*(n+1)), n from 1."""
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if size < 1:
        raise ValueError("size must be >= 1")
    diag = tuple(beta * n for n in range(1, size + 1))
    off = tuple(math.sqrt(n * (n + 1)) for n in range(1, size))
    return JacobiMatrix(diag, off)


def spectral_moment(beta: float, j: int) -> float:
    """j-th moment of the spectral measure attached to the ladder matrix."""
    if j < 0:
        raise ValueError("moment order must be >= 0")
    return vacuum_moments(jacobi_beta(beta, j + 2), j)[j]


# ---------------------------------------------------------------------------
# Monic orthogonal polynomials


def polynomial_sequence(beta: float, n_max: int) -> List[List[float]]:
    """Monic polynomials of the three-term recurrence, ascending coefficients.

    p_0 = 1 and s*p_n = p_{n+1} + beta*(n+1)*p_n + n*(n+1)*p_{n-1}, so each
    p_{n+1} = (s - beta*(n+1))*p_n - n*(n+1)*p_{n-1}.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    polys: List[List[float]] = [[1.0]]
    if n_max == 0:
        return polys
    prev: List[float] = []
    cur = [1.0]
    for n in range(n_max):
        shifted = [0.0] + cur                      # s * p_n
        a = beta * (n + 1)
        b = float(n * (n + 1))
        nxt = [0.0] * (len(cur) + 1)
        for i, ci in enumerate(shifted):
            nxt[i] += ci
        for i, ci in enumerate(cur):
            nxt[i] -= a * ci
        for i, ci in enumerate(prev):
            nxt[i] -= b * ci
        polys.append(nxt)
        prev, cur = cur, nxt
    return polys


def poly_eval(coeffs: Sequence[float], s: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * s + c
    return acc


def poly_product(p: Sequence[float], q: Sequence[float]) -> List[float]:
    out = [0.0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


# ---------------------------------------------------------------------------
# Complex log-gamma (Lanczos), used by the meixner-regime marginal density


_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _log_sin_pi(z: complex) -> complex:
    w = cmath.pi * z
    if w.imag > 20.0:
        # sin w ~ exp(Im w) * exp(-i Re w) * i / 2
        return complex(w.imag - math.log(2.0), math.pi / 2.0 - w.real)
    if w.imag < -20.0:
        return complex(-w.imag - math.log(2.0), w.real - math.pi / 2.0)
    return cmath.log(cmath.sin(w))


def log_gamma_complex(z: complex) -> complex:
    """Lanczos approximation of log Gamma; relative error below 1e-10.

    The real part (all that the density evaluations consume) is exact to
    roughly 1e-13 over the strips used here; arguments left of Re z = 0.5
    go through the reflection formula.
    """
    z = complex(z)
    if z.real < 0.5:
        return math.log(math.pi) - _log_sin_pi(z) - log_gamma_complex(1.0 - z)
    zz = z - 1.0
    x = complex(_LANCZOS_COEFFS[0])
    for i in range(1, len(_LANCZOS_COEFFS)):
        x += _LANCZOS_COEFFS[i] / (zz + i)
    t = zz + _LANCZOS_G + 0.5
    return (
        0.5 * math.log(2.0 * math.pi)
        + (zz + 0.5) * cmath.log(t)
        - t
        + cmath.log(x)
    )


def abs_gamma_sq(z: complex) -> float:
    """|Gamma(z)|^2 via the complex log-gamma."""
    return math.exp(2.0 * log_gamma_complex(z).real)


# ---------------------------------------------------------------------------
# The three-regime measure and the induced jump measure


@dataclass(frozen=True)
class LevyMeasureSpec:
    """Regime tag plus the derived constants used by density evaluations."""

    beta: float
    regime: str
    root: float                    # sqrt(|4 - beta^2|), zero in the gamma regime
    pascal_ratio: Optional[float]  # lattice mass ratio, pascal only
    meixner_tilt: Optional[float]  # exponential tilt rate, meixner only

    def __post_init__(self) -> None:
        if self.regime == REGIME_PASCAL:
            if self.pascal_ratio is None or not 0.0 < self.pascal_ratio < 1.0:
                raise ValueError("pascal ratio must lie strictly between 0 and 1")


def levy_spec(beta: float) -> LevyMeasureSpec:
    beta = float(beta)
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if beta == 2.0:
        return LevyMeasureSpec(beta, REGIME_GAMMA, 0.0, None, None)
    if beta < 2.0:
        root = math.sqrt(4.0 - beta * beta)
        tilt = 2.0 * math.atan(beta / root) / root
        return LevyMeasureSpec(beta, REGIME_MEIXNER, root, None, tilt)
    root = math.sqrt(beta * beta - 4.0)
    ratio = (beta - root) / (beta + root)
    return LevyMeasureSpec(beta, REGIME_PASCAL, root, ratio, None)


def _nu_tilde_meixner(spec: LevyMeasureSpec, s: float) -> float:
    # Density of the regime measure: root/(2*pi) * |Gamma(1+iy)|^2 * exp(tilt*s)
    # with y = s/root.  The tilt is the positive rate forced by the recurrence
    # (mean beta); it is strictly smaller than pi/root, so the product decays
    # on both sides even though the factors separately overflow.
    y = s / spec.root
    t = math.pi * y
    tilt_term = spec.meixner_tilt * s
    if abs(t) < 30.0:
        g = t / math.sinh(t) if t != 0.0 else 1.0
        return spec.root / (2.0 * math.pi) * g * math.exp(tilt_term)
    # log domain: pi*y/sinh(pi*y) ~ 2*pi*|y|*exp(-pi*|y|)
    log_density = (
        math.log(spec.root / (2.0 * math.pi))
        + math.log(2.0 * math.pi * abs(y))
        - abs(t)
        + tilt_term
    )
    if log_density < -745.0:
        return 0.0
    return math.exp(log_density)


def pascal_support_point(spec: LevyMeasureSpec, k: int) -> float:
    if spec.regime != REGIME_PASCAL:
        raise ValueError("support points exist only in the pascal regime")
    if k < 1:
        raise ValueError("support index must be >= 1")
    return spec.root * k


def levy_density(
    spec: LevyMeasureSpec,
    which: str,
    s: Optional[float] = None,
    k: Optional[int] = None,
) -> float:
    """Density (continuous regimes) or atom mass (pascal) of the base or jump measure.

    ``which`` is ``"nu_tilde"`` for the probability measure and ``"nu"`` for
    the jump measure obtained by dividing by s^2.  Pascal queries address an
    atom by its lattice index k >= 1; the other regimes take a real point s.
    """
    if which not in ("nu_tilde", "nu"):
        raise ValueError("which must be 'nu_tilde' or 'nu'")
    if spec.regime == REGIME_PASCAL:
        if k is None or s is not None:
            raise ValueError("pascal queries take a support index k, not a point s")
        if k < 1:
            raise ValueError("support index must be >= 1")
        mass = spec.root**2 * spec.pascal_ratio**k * k
        if which == "nu":
            return mass / pascal_support_point(spec, k) ** 2
        return mass
    if s is None or k is not None:
        raise ValueError("continuous regimes take a real point s")
    s = float(s)
    if spec.regime == REGIME_GAMMA:
        if s <= 0.0:
            raise ValueError("the gamma-regime density is queried for s > 0 only")
        dens = s * math.exp(-s)
        if which == "nu":
            return dens / (s * s)
        return dens
    # meixner
    if which == "nu":
        if s == 0.0:
            raise ValueError("the jump-measure density diverges at s = 0")
        return _nu_tilde_meixner(spec, s) / (s * s)
    return _nu_tilde_meixner(spec, s)


def integration_window(f: Callable[[float], float], start: float = 8.0) -> float:
    """Half-width L such that |f(+-L)| is below _TAIL of the peak of |f|."""
    n = 81
    peak = max(abs(f(-start + 2.0 * start * i / (n - 1))) for i in range(n))
    if peak == 0.0:
        peak = 1.0
    width = start
    while max(abs(f(width)), abs(f(-width))) > _TAIL * peak:
        width *= 1.5
        if width > 1e4:
            break
    return width


def _quad(f: Callable[[float], float], lo: float, hi: float) -> float:
    # the downstream checks judge accuracy against explicit tolerances, so
    # scipy's roundoff chatter on nearly-cancelling integrands is muted
    import warnings

    from scipy.integrate import IntegrationWarning

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _err = quad(f, lo, hi, limit=300, epsabs=1e-13, epsrel=1e-12)
    return val


def _quad_full_line(f: Callable[[float], float]) -> float:
    width = integration_window(f)
    return _quad(f, -width, width)


def _quad_half_line(f: Callable[[float], float], lo: float = 0.0) -> float:
    probe = lambda s: f(s) if s > lo else 0.0
    width = integration_window(probe)
    return _quad(f, lo, max(width, lo + 1.0))


def _pascal_levy_sum(
    spec: LevyMeasureSpec, fn: Callable[[float], float], rel_tail: float = 1e-16
) -> float:
    """Sum fn over the lattice against the base-measure atom masses.

    Terms eventually decay geometrically with the mass ratio; the loop stops
    once a term falls below ``rel_tail`` of the running scale.
    """
    acc = 0.0
    scale = 0.0
    k = 1
    while k < 200000:
        mass = spec.root**2 * spec.pascal_ratio**k * k
        term = fn(pascal_support_point(spec, k)) * mass
        acc += term
        scale = max(scale, abs(term), abs(acc))
        if k > 8 and abs(term) <= rel_tail * max(scale, 1e-300):
            break
        k += 1
    return acc


def measure_moment(spec: LevyMeasureSpec, j: int) -> float:
    """j-th moment of the base probability measure by its regime-native route.

    Closed form in the gamma regime, lattice series in the pascal regime,
    adaptive quadrature in the meixner regime.  This is the independent
    oracle against which ``spectral_moment`` is checked.
    """
    if j < 0:
        raise ValueError("moment order must be >= 0")
    if spec.regime == REGIME_GAMMA:
        return float(math.factorial(j + 1))
    if spec.regime == REGIME_PASCAL:
        return _pascal_levy_sum(spec, lambda s: s**j)
    return _quad_full_line(lambda s: s**j * _nu_tilde_meixner(spec, s))


def total_mass(spec: LevyMeasureSpec) -> float:
    """Total mass of the base measure, by quadrature or lattice summation."""
    if spec.regime == REGIME_GAMMA:
        return _quad_half_line(lambda s: s * math.exp(-s))
    if spec.regime == REGIME_PASCAL:
        return _pascal_levy_sum(spec, lambda s: 1.0)
    return _quad_full_line(lambda s: _nu_tilde_meixner(spec, s))


# ---------------------------------------------------------------------------
# Marginal laws of the compensated noise over a window of given area


def _rising(x: float, n: int) -> float:
    out = 1.0
    for i in range(n):
        out *= x + i
    return out


def marginal_density(beta: float, area: float, s: float) -> float:
    """Density of the window marginal, gamma and meixner regimes."""
    if area <= 0:
        raise ValueError("area must be positive")
    spec = levy_spec(beta)
    s = float(s)
    if spec.regime == REGIME_PASCAL:
        raise ValueError("the pascal-regime marginal is discrete; query atoms instead")
    if spec.regime == REGIME_GAMMA:
        # unit-scale gamma law with shape = area, shifted to mean zero
        t = s + area
        if t <= 0.0:
            return 0.0
        return t ** (area - 1.0) * math.exp(-t) / math.gamma(area)
    root = spec.root
    center = s + beta * area / 2.0
    log_pref = (
        (area - 1.0) / 2.0 * math.log(4.0 - beta * beta)
        - math.log(2.0 * math.pi)
        - math.lgamma(area)
    )
    log_gsq = 2.0 * log_gamma_complex(complex(area / 2.0, center / root)).real
    # same positive tilt as the regime measure, centered at -beta*area/2
    log_density = log_pref + log_gsq + center * spec.meixner_tilt
    if log_density < -745.0:
        return 0.0
    return math.exp(log_density)


def marginal_support_point(beta: float, area: float, k: int) -> float:
    """k-th atom location of the pascal-regime marginal, k >= 0."""
    spec = levy_spec(beta)
    if spec.regime != REGIME_PASCAL:
        raise ValueError("atoms exist only in the pascal regime")
    if k < 0:
        raise ValueError("atom index must be >= 0")
    return spec.root * k - 2.0 * area / (beta + spec.root)


def marginal_mass(beta: float, area: float, k: int) -> float:
    """Mass of the k-th atom of the pascal-regime marginal (negative binomial)."""
    if area <= 0:
        raise ValueError("area must be positive")
    spec = levy_spec(beta)
    if spec.regime != REGIME_PASCAL:
        raise ValueError("atoms exist only in the pascal regime")
    if k < 0:
        raise ValueError("atom index must be >= 0")
    p = spec.pascal_ratio
    mass = (1.0 - p) ** area
    for i in range(1, k + 1):  # running product keeps the factorial ratio finite
        mass *= (area + i - 1.0) / i * p
    return mass


def marginal_atoms(beta: float, area: float, rel_tail: float = 1e-15) -> List[Tuple[float, float]]:
    """Atoms (location, mass) of the pascal-regime marginal up to a tail cut."""
    out = []
    k = 0
    scale = 0.0
    while k < 200000:
        m = marginal_mass(beta, area, k)
        out.append((marginal_support_point(beta, area, k), m))
        scale = max(scale, m)
        if k > 8 and m <= rel_tail * scale:
            break
        k += 1
    return out


def marginal_law(
    beta: float,
    area: float,
    s: Optional[float] = None,
    k: Optional[int] = None,
) -> object:
    """Dispatcher: density at s, atom mass at index k, or the full atom list."""
    spec = levy_spec(beta)
    if spec.regime == REGIME_PASCAL:
        if k is not None:
            return marginal_mass(beta, area, k)
        if s is not None:
            raise ValueError("pascal marginals are discrete; query by index k")
        return marginal_atoms(beta, area)
    if s is None:
        raise ValueError("continuous marginals are queried at a point s")
    return marginal_density(beta, area, s)


def marginal_moment(beta: float, area: float, j: int) -> float:
    """j-th moment of the window marginal by its regime-native route."""
    if j < 0:
        raise ValueError("moment order must be >= 0")
    spec = levy_spec(beta)
    if spec.regime == REGIME_GAMMA:
        # moments of (gamma(shape=area) - area)
        return sum(
            math.comb(j, i) * _rising(area, i) * (-area) ** (j - i) for i in range(j + 1)
        )
    if spec.regime == REGIME_PASCAL:
        acc = 0.0
        scale = 0.0
        k = 0
        while k < 200000:
            m = marginal_mass(beta, area, k)
            term = m * marginal_support_point(beta, area, k) ** j
            acc += term
            scale = max(scale, abs(term), abs(acc), m)
            if k > 8 and max(m, abs(term)) <= 1e-16 * max(scale, 1e-300):
                break
            k += 1
        return acc
    return _quad_full_line(lambda s: s**j * marginal_density(beta, area, s))


# ---------------------------------------------------------------------------
# Cumulants of the compensated noise and the moment composition


def cumulant(beta: float, phi: GridFunction, j: int) -> float:
    """j-th cumulant of the smeared compensated noise.

    The first cumulant vanishes by compensation; for j >= 2 the jump measure
    contributes its (j-2)-nd base-measure moment times the j-th power
    integral of the test function.
    """
    if j < 1:
        raise ValueError("cumulant order must be >= 1")
    if j == 1:
        return 0.0
    return spectral_moment(beta, j - 2) * power_integral(phi, j)


def moments_from_cumulants(kappas: Sequence[float], k: int) -> float:
    """Raw moment of order k from cumulants of orders 1..k.

    Uses the standard recursion m_k = sum_j C(k-1, j-1) kappa_j m_{k-j},
    which sums the same products over set partitions as the direct
    enumeration.
    """
    if k < 0:
        raise ValueError("moment order must be >= 0")
    if len(kappas) < k:
        raise ValueError(f"need cumulants up to order {k}, got {len(kappas)}")
    m = [1.0]
    for order in range(1, k + 1):
        acc = 0.0
        for j in range(1, order + 1):
            acc += math.comb(order - 1, j - 1) * kappas[j - 1] * m[order - j]
        m.append(acc)
    return m[k]


# ---------------------------------------------------------------------------
# Gram cross-check of the embedded polynomials under the jump measure


def polynomial_gram(beta: float, n_max: int) -> List[List[float]]:
    """Pairings of s*p_{m-1} and s*p_{n-1} under the jump measure, m,n = 1..n_max.

    The two embedded factors of s cancel the 1/s^2 of the jump measure, so
    entry (m, n) is the pairing of p_{m-1} and p_{n-1} under the base
    measure itself.  Expected: diagonal (n-1)!*n!, zero off the diagonal.
    """
    if not 1 <= n_max <= 8:
        raise ValueError("n_max must be between 1 and 8")
    spec = levy_spec(beta)
    polys = polynomial_sequence(beta, n_max - 1)

    def pair(pm: Sequence[float], pn: Sequence[float]) -> float:
        prod = poly_product(pm, pn)
        if spec.regime == REGIME_GAMMA:
            return sum(c * math.factorial(d + 1) for d, c in enumerate(prod))
        if spec.regime == REGIME_PASCAL:
            return _pascal_levy_sum(spec, lambda s: poly_eval(prod, s))
        return _quad_full_line(lambda s: poly_eval(prod, s) * _nu_tilde_meixner(spec, s))

    gram = [[0.0] * n_max for _ in range(n_max)]
    for m in range(n_max):
        for n in range(m, n_max):
            val = pair(polys[m], polys[n])
            gram[m][n] = val
            gram[n][m] = val
    return gram
