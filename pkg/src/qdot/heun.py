"""Exact polynomial solutions of the relative-motion equation.

Writing u(r) = r^(l+1/2) exp(-omega r^2 / 2) y(sqrt(omega) r) turns the
radial equation into a biconfluent Heun form

    x y'' + (1 + alpha - 2 x^2) y' + (-delta/2 + (gamma - alpha - 2) x) y = 0

with alpha = 2l, gamma = eta/omega and delta = 2/sqrt(omega).  Degree-n
polynomial solutions require gamma - alpha - 2 = 2n, i.e. the quantization

    eta(n, l) = 2 (n + l + 1) omega,

together with a termination condition A_{n+1}(t) = 0 on the series
coefficients, where t = delta/2 = 1/sqrt(omega).  Each positive root t
selects one admissible frequency omega = 1/t^2.  The coefficients obey

    A_{p+2} = t A_{p+1} - (2n - 2p)(p + 1)(p + alpha + 1) A_p,
    A_0 = 1,  A_1 = t,

so every A_p is a polynomial in t with exact integer coefficients and the
parity of p.  For even n the termination polynomial also has the root
t = 0 (omega -> infinity): the non-interacting limit, whose solutions
reduce to Laguerre polynomials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import NumericsError, QuantumNumbers, RadialWaveFunction
from .numerov import normalize

# Integer coefficient growth is exact at any degree, but root conditioning
# degrades; refuse silently inaccurate territory.
MAX_DEGREE = 20

_ROOT_TOL = 1e-12


@dataclass(frozen=True)
class CoefficientPolynomial:
    """One series coefficient A_p as an exact integer polynomial in t."""

    degree: int
    coeffs: tuple[int, ...]  # index = power of t

    def __call__(self, t: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def derivative(self, t: float) -> float:
        acc = 0.0
        for k in range(len(self.coeffs) - 1, 0, -1):
            acc = acc * t + k * self.coeffs[k]
        return acc


@dataclass(frozen=True)
class HeunSolution:
    """One exact polynomial solution at an admissible frequency.

    y_coeffs are the coefficients of y as a polynomial in r (not x);
    the wavefunction is u(r) = r^(l+1/2) exp(-omega r^2/2) y(r).
    """

    n: int
    l: int
    t: float            # admissible root 1/sqrt(omega)
    omega: float        # 1/t^2, Hartree
    eta: float          # 2(n+l+1) omega, Hartree
    y_coeffs: tuple[float, ...]
    alpha: int          # 2l
    gamma: float        # eta/omega = 2(n+l+1)


def recurrence_coefficients(n: int, l: int) -> list[CoefficientPolynomial]:
    """A_0 ... A_{n+1} as exact integer polynomials in t."""
    QuantumNumbers(l=l, n=n)
    if n > MAX_DEGREE:
        raise ValueError(
            f"n={n} exceeds the supported degree {MAX_DEGREE}; root "
            "conditioning is not validated beyond it"
        )
    alpha = 2 * l
    polys = [[1], [0, 1]]
    for p in range(n):
        c = (2 * n - 2 * p) * (p + 1) * (p + alpha + 1)
        nxt = [0] * (p + 3)
        for k, a in enumerate(polys[p + 1]):
            nxt[k + 1] += a
        for k, a in enumerate(polys[p]):
            nxt[k] -= c * a
        polys.append(nxt)
    return [
        CoefficientPolynomial(degree=len(cs) - 1, coeffs=tuple(cs))
        for cs in polys
    ]


def _even_part(poly: CoefficientPolynomial) -> tuple[list[int], bool]:
    """Reduce A(t) to Q(s), s = t^2, splitting off a t factor if present.

    A_{n+1} has the parity of n+1, so it is either even (Q(t^2)) or odd
    (t * Q(t^2)).  Returns (Q coefficients, had_t_factor).
    """
    cs = poly.coeffs
    odd = all(c == 0 for c in cs[0::2])
    if odd:
        reduced = list(cs[1::2])
        return reduced, True
    if not all(c == 0 for c in cs[1::2]):
        raise NumericsError("termination polynomial lost its parity structure")
    return list(cs[0::2]), False


def _positive_roots(q: list[int], tol: float) -> list[float]:
    """All positive roots of the integer polynomial Q(s), to relative tol.

    Candidates come from two independent routes: a sign-change scan on a
    log-spaced grid (complete for simple roots at scan resolution) and the
    companion-matrix eigenvalues.  Each candidate is polished by bisection
    plus a Newton step cleanup.
    """
    while q and q[-1] == 0:
        q.pop()
    if len(q) <= 1:
        return []

    def val(s: float) -> float:
        acc = 0.0
        for c in reversed(q):
            acc = acc * s + c
        return acc

    def dval(s: float) -> float:
        acc = 0.0
        for k in range(len(q) - 1, 0, -1):
            acc = acc * s + k * q[k]
        return acc

    lead = abs(q[-1])
    s_hi = 1.0 + max(abs(c) / lead for c in q[:-1])
    s_lo = 1e-9

    brackets: list[tuple[float, float]] = []
    scan = np.geomspace(s_lo, s_hi * 1.01, 2048)
    vals = [val(s) for s in scan]
    for i in range(len(scan) - 1):
        if vals[i] == 0.0:
            brackets.append((scan[i], scan[i]))
        elif vals[i] * vals[i + 1] < 0:
            brackets.append((scan[i], scan[i + 1]))

    for z in np.roots(list(reversed([float(c) for c in q]))):
        if abs(z.imag) > 1e-9 * max(1.0, abs(z.real)) or z.real <= 0:
            continue
        s = float(z.real)
        w = max(1e-9, 1e-6 * s)
        a, b = s - w, s + w
        for _ in range(60):
            if a > 0 and val(a) * val(b) < 0:
                brackets.append((a, b))
                break
            w *= 4.0
            a, b = max(s - w, s_lo / 2), s + w
        # no sign change found: nearly multiple root, keep Newton candidate
        else:
            brackets.append((s, s))

    roots: list[float] = []
    for a, b in brackets:
        ya = val(a)
        if a == b or ya == 0.0:
            s = a
        else:
            for it in range(200):
                m = 0.5 * (a + b)
                ym = val(m)
                if ym == 0.0:
                    a = b = m
                    break
                if ya * ym < 0:
                    b = m
                else:
                    a, ya = m, ym
                if b - a <= _ROOT_TOL * max(1.0, b):
                    break
            else:
                raise NumericsError(
                    f"root refinement did not converge in bracket [{a}, {b}]"
                )
            s = 0.5 * (a + b)
        for _ in range(4):
            d = dval(s)
            if d == 0.0:
                break
            step = val(s) / d
            if not np.isfinite(step) or abs(step) > 0.5 * max(1.0, abs(s)):
                break
            s -= step
        if s <= 0:
            continue
        if abs(val(s)) > 1e-3 * (abs(q[-1]) * s ** (len(q) - 1) + abs(q[0])):
            continue
        if not any(abs(s - have) <= 1e-9 * max(1.0, have) for have in roots):
            roots.append(s)
    roots.sort()
    return roots


def admissible_roots(n: int, l: int, tol: float = 1e-9) -> tuple[list[float], bool]:
    """Positive roots t of A_{n+1}(t) = 0 plus the asymptotic (t = 0) flag.

    Roots are returned ascending, each accurate to tol (relative) or
    better.  The t = 0 root, present exactly when n is even, marks the
    omega -> infinity non-interacting solution and is reported as the
    boolean flag instead of a list entry.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    a_last = recurrence_coefficients(n, l)[n + 1]
    q, has_t_factor = _even_part(a_last)
    s_roots = _positive_roots(q, min(tol, _ROOT_TOL))
    return [math.sqrt(s) for s in s_roots], has_t_factor


def quantized_energy(n: int, l: int, omega: float) -> float:
    """eta(n, l) = 2 (n + l + 1) omega."""
    if omega <= 0:
        raise ValueError(f"omega must be > 0, got {omega}")
    return 2.0 * (n + l + 1) * omega


def _pochhammer(a: int, p: int) -> int:
    out = 1
    for j in range(p):
        out *= a + j
    return out


def build_solution(n: int, l: int, root_index: int) -> HeunSolution:
    """Assemble the exact solution for the root_index-th admissible root.

    The series in x = sqrt(omega) r has coefficients A_p / ((1+alpha)_p p!),
    so the r-space coefficient of r^p is A_p(t) t^(-p) / ((1+alpha)_p p!).
    """
    roots, _ = admissible_roots(n, l)
    if not 0 <= root_index < len(roots):
        raise ValueError(
            f"root_index {root_index} out of range; (n={n}, l={l}) has "
            f"{len(roots)} positive roots"
        )
    t = roots[root_index]
    alpha = 2 * l
    polys = recurrence_coefficients(n, l)
    y = tuple(
        polys[p](t) / (_pochhammer(1 + alpha, p) * math.factorial(p) * t**p)
        for p in range(n + 1)
    )
    omega = 1.0 / (t * t)
    return HeunSolution(
        n=n, l=l, t=t, omega=omega,
        eta=quantized_energy(n, l, omega),
        y_coeffs=y, alpha=alpha, gamma=float(2 * (n + l + 1)),
    )


def sample_u(solution: HeunSolution, grid: np.ndarray) -> RadialWaveFunction:
    """u(r) = r^(l+1/2) e^(-omega r^2 / 2) y(r), normalized on the grid."""
    r = np.asarray(grid, dtype=float)
    if r.ndim != 1 or r.size < 3:
        raise ValueError("grid must be 1-d with at least 3 points")
    if np.any(r <= 0) or np.any(np.diff(r) <= 0):
        raise ValueError("grid must be strictly increasing and positive")
    y = np.zeros_like(r)
    for c in reversed(solution.y_coeffs):
        y = y * r + c
    u = r ** (solution.l + 0.5) * np.exp(-0.5 * solution.omega * r * r) * y
    return normalize(RadialWaveFunction(grid=r, values=u))


def asymptotic_series_coefficients(n: int, l: int) -> list[float]:
    """Series route to the omega -> infinity solution: coefficients of y in x.

    Runs the recurrence with delta' = 0 under gamma - alpha - 2 = 4n.  Odd
    coefficients vanish identically; the returned list spans x^0 .. x^(2n).
    """
    if n < 0 or l < 0:
        raise ValueError("need n >= 0 and l >= 0")
    alpha = 2 * l
    a = [Fraction(1), Fraction(0)]
    for p in range(2 * n):
        nxt = -Fraction((4 * n - 2 * p) * (p + 1) * (p + alpha + 1)) * a[p]
        a.append(nxt)
    return [
        float(a[p] / (_pochhammer(1 + alpha, p) * math.factorial(p)))
        for p in range(2 * n + 1)
    ]


def laguerre_asymptotic(n: int, l: int) -> list[float]:
    """Closed form of the same limit: coefficients of y in powers of x^2.

    y(x) = n! Gamma(1 + l) / Gamma(1 + l + n) * L_n^l(x^2), normalized so
    y(0) = 1.  Exact rational arithmetic throughout.
    """
    if n < 0 or l < 0:
        raise ValueError("need n >= 0 and l >= 0")
    norm = Fraction(math.factorial(n) * math.factorial(l), math.factorial(n + l))
    out = []
    for k in range(n + 1):
        c = Fraction((-1) ** k * math.comb(n + l, n - k), math.factorial(k))
        out.append(float(norm * c))
    return out
