"""Numerov shooting engine for the radial equation, any potential and omega.

The three-point recursion

    u_{i+1} = [(12 - 10 f_i) u_i - f_{i-1} u_{i-1}] / f_{i+1},
    f_i = 1 + h^2 g_i / 12,   g = eta - V_eff,

is integrated outward from the origin region and inward from r_max; the
two solutions are matched at the outermost classical turning point, where
the log-derivative defect crosses zero exactly at an eigenvalue.
Eigenvalues are bracketed by node-count transitions of the outward
solution (Sturm ordering), bisected, then polished by a secant iteration
on the matching defect.  Trial energies are propagated as one vectorized
batch; results are identical to evaluating them one by one.

Two starting rules are used at the inner boundary:

* regular start (default): the l = 0 centrifugal term -1/(4 r^2) is
  critically attractive, and u ~ r^(l+1/2) varies too fast near the
  origin for a coarse uniform grid.  The regular solution is therefore
  carried through the core by Runge-Kutta integration of the smooth
  reduced function w = u / r^(l+1/2) on a log-spaced auxiliary mesh, and
  handed to the Numerov recursion at the first grid index where the local
  phase per step is resolved.  Positive spectra computed this way are
  cutoff-independent and reproduce closed-form energies to ~1e-6.

* raw start (bound-state searches): u(r_min) = r_min^(l+1/2) and
  u(r_min + h) = (r_min + h)^(l+1/2) literally on the grid.  At l = 0 the
  critical core then has no self-adjoint continuum limit; the grid plus
  the cutoff r_min act as the regularizer, and negative eigenvalues are
  regularization-defined quantities that legitimately depend on r_min.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .model import (
    NumericalEigenstate,
    NumericsError,
    PotentialKind,
    RadialProblem,
    RadialWaveFunction,
    effective_potential,
)

log = logging.getLogger(__name__)

_RESCALE_EVERY = 1000
_RESCALE_LIMIT = 1e100
_CORE_CELLS = 33         # hand-off needs r >= this many grid steps (r^(l+1/2) resolution)
_MAX_STEP_PHASE = 0.35   # and h * sqrt|g| at most this
_SCAN_PANELS = 400


@dataclass(frozen=True)
class ShotResult:
    """Diagnostics of one trial integration at fixed eta."""

    nodes: int               # interior sign changes of the outward solution
    mismatch: float          # log-derivative defect at the matching point
    samples: np.ndarray      # outward-sweep u values (block-rescaled)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)


@dataclass(frozen=True)
class SpectrumRequest:
    """Eigenvalue search window over one RadialProblem."""

    problem: RadialProblem
    eta_min: float
    eta_max: float
    max_states: int = 50
    tol: float = 1e-6

    def __post_init__(self):
        if not self.eta_min < self.eta_max:
            raise ValueError("need eta_min < eta_max")
        if self.max_states < 1:
            raise ValueError("max_states must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")


def normalize(wave: RadialWaveFunction) -> RadialWaveFunction:
    """Rescale so that the Simpson-rule integral of u^2 dr equals 1.

    The sign is fixed positive at the first interior point carrying
    appreciable amplitude.  Pure function: returns a new wavefunction.
    """
    u = wave.values
    if u.size < 3:
        raise ValueError("need at least 3 samples to normalize")
    norm2 = simpson(u * u, x=wave.grid)
    if norm2 <= 0 or not np.isfinite(norm2):
        raise ValueError("cannot normalize an (almost) identically zero function")
    out = u / np.sqrt(norm2)
    thresh = 1e-8 * np.max(np.abs(out))
    interior = np.nonzero(np.abs(out[1:]) > thresh)[0]
    anchor = 1 + (interior[0] if interior.size else 0)
    if out[anchor] < 0:
        out = -out
    return RadialWaveFunction(grid=wave.grid, values=out)


# ---------------------------------------------------------------------------
# regular-solution seeding through the critical core


def _w_rhs(kind: PotentialKind, omega: float, nu: float, etas, r, w, wp):
    if kind is PotentialKind.COULOMB:
        v = 1.0 / r
    elif kind is PotentialKind.LOG:
        v = np.log(r)
    else:
        v = 0.0
    return wp, -(2.0 * nu / r) * wp - (etas - v - (omega * r) ** 2) * w


class _CoreIntegrator:
    """RK4 carrier of the regular solution w = u/r^(l+1/2) from near zero.

    Advances on log-spaced sub-meshes, counting sign changes of w on the
    way so the caller loses no node hidden below the Numerov hand-off.
    """

    def __init__(self, kind, omega, l, etas, ra):
        self.kind, self.omega, self.nu = kind, omega, l + 0.5
        self.etas = np.asarray(etas, dtype=float)
        self.r = ra
        nu = self.nu
        if kind is PotentialKind.LOG:
            a = 1.0 / (2 + 4 * nu)
            b = -(self.etas + a * (3 + 2 * nu)) / (2 + 4 * nu)
            self.w = 1.0 + ra * ra * (a * np.log(ra) + b)
            self.wp = 2 * ra * (a * np.log(ra) + b) + ra * a
        else:
            c1 = 1.0 / (2 * nu) if kind is PotentialKind.COULOMB else 0.0
            c2 = (c1 - self.etas) / (2 * (2 * nu + 1))
            self.w = 1.0 + c1 * ra + c2 * ra * ra
            self.wp = (c1 + 2 * c2 * ra) + 0.0 * self.etas
            self.w = self.w + 0.0 * self.etas
        self.flips = np.zeros(self.etas.shape, dtype=int)

    def advance(self, r_to, nsteps):
        xs = np.geomspace(self.r, r_to, nsteps + 1)
        kind, omega, nu, etas = self.kind, self.omega, self.nu, self.etas
        w, wp = self.w, self.wp
        for k in range(nsteps):
            rk, rn = xs[k], xs[k + 1]
            hh = rn - rk
            k1w, k1p = _w_rhs(kind, omega, nu, etas, rk, w, wp)
            k2w, k2p = _w_rhs(kind, omega, nu, etas, rk + hh / 2, w + hh / 2 * k1w, wp + hh / 2 * k1p)
            k3w, k3p = _w_rhs(kind, omega, nu, etas, rk + hh / 2, w + hh / 2 * k2w, wp + hh / 2 * k2p)
            k4w, k4p = _w_rhs(kind, omega, nu, etas, rn, w + hh * k3w, wp + hh * k3p)
            wn = w + hh / 6 * (k1w + 2 * k2w + 2 * k3w + k4w)
            wp = wp + hh / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
            np.add(self.flips, (w * wn) < 0, out=self.flips, casting="unsafe")
            w = wn
        self.w, self.wp, self.r = w, wp, r_to
        return w

    def u(self):
        return self.r**self.nu * self.w


def _core_start(kind, omega, l, etas, radii, i0):
    """Regular-solution u at radii[0..i0+1] plus the sub-hand-off node count.

    Returns (profile, flips): profile holds the values at every grid
    radius up to index i0+1 (also used to fill wavefunction heads), and
    flips counts the sign changes on (ra, radii[i0+1]], from where the
    Numerov tally continues seamlessly.
    """
    etas = np.atleast_1d(np.asarray(etas, dtype=float))
    ra = min(1e-4, 0.5 * radii[0])
    core = _CoreIntegrator(kind, omega, l, etas, ra)
    phase = radii[i0 + 1] * np.sqrt(np.max(np.abs(etas)) + 1.0) + 0.5 * np.log(
        radii[i0 + 1] / ra
    )
    first_steps = 400 + int(24 * phase)
    profile = np.empty((etas.size, i0 + 2))
    core.advance(radii[0], first_steps)
    profile[:, 0] = core.u()
    for i in range(1, i0 + 2):
        core.advance(radii[i], 8)
        profile[:, i] = core.u()
    # flips cover (ra, radii[i0+1]]; the Numerov tally continues seamlessly
    return profile, core.flips.copy()


def _start_index(V, h, eta_abs_max, steps, r0):
    """First grid index at which the Numerov recursion takes over.

    Two requirements: the radius must span _CORE_CELLS grid steps so the
    power-law core behavior r^(l+1/2) is representable, and the local
    phase per step h sqrt|g| must be moderate.
    """
    cap = max(_CORE_CELLS + 2, steps // 50)
    i_power = max(0, int(np.ceil(_CORE_CELLS - r0 / h)))
    if i_power > cap:
        i_power = cap
    zone = min(V.size - 2, cap + 1)
    ok = h * np.sqrt(np.abs(V[:zone]) + eta_abs_max) <= _MAX_STEP_PHASE
    good = np.nonzero(ok[i_power:zone])[0]
    if good.size == 0:
        raise NumericsError(
            "trial energies vary faster than this grid resolves; "
            "increase steps or narrow the energy window"
        )
    return i_power + int(good[0])


# ---------------------------------------------------------------------------
# batched two-sided sweeps


def _join_indices(V, etas, lo_clip, n):
    jj = np.empty(etas.size, dtype=int)
    vmin_idx = int(np.argmin(V))
    for k, eta in enumerate(etas):
        allowed = np.nonzero(V < eta)[0]
        jj[k] = allowed[-1] if allowed.size else vmin_idx
    return np.clip(jj, lo_clip, n - 3)


def _batch(problem: RadialProblem, r, V, etas, raw_start, need_w=True, keep=None):
    """Propagate a batch of trial energies; see the module docstring.

    Returns (nodes, wronskian, logderiv, i0, jj, arrays, seed_flips).
    ``arrays`` is None unless ``keep`` selects one batch row, for which
    the full outward and inward solutions (head filled from the core
    profile) are stored; wronskian and logderiv are None when need_w is
    False and keep is None.  seed_flips are the sign changes below the
    hand-off index already included in nodes.
    """
    etas = np.atleast_1d(np.asarray(etas, dtype=float))
    n = r.size
    h = r[1] - r[0]
    m = etas.size
    c = h * h / 12.0
    fe = 1.0 + c * etas
    fv = c * V
    # size rescale blocks so exponential growth cannot overflow within one:
    # fastest growth rate on the grid is sqrt(max V - min eta) per unit r
    kappa = np.sqrt(max(float(np.max(V)) - float(np.min(etas)), 1.0))
    rescale_every = int(np.clip(150.0 / (h * kappa), 1, _RESCALE_EVERY))

    if raw_start:
        i0 = 0
        s1 = np.full(m, r[0] ** (problem.l + 0.5))
        s2 = np.full(m, r[1] ** (problem.l + 0.5))
        seed_flips = np.zeros(m, dtype=int)
        head = None
    else:
        i0 = _start_index(V, h, float(np.max(np.abs(etas))), problem.steps, r[0])
        head, seed_flips = _core_start(
            problem.potential, problem.omega, problem.l, etas, r, i0
        )
        s1 = head[:, i0]
        s2 = head[:, i0 + 1]

    jj = _join_indices(V, etas, i0 + 2, n)
    join_rows = {}
    for k, j in enumerate(jj):
        join_rows.setdefault(int(j), []).append(k)

    keep_fwd = np.zeros(n) if keep is not None else None
    keep_bwd = np.zeros(n) if keep is not None else None

    up = s1.copy()
    uc = s2.copy()
    nodes = seed_flips.copy()
    cap_l = np.zeros((m, 3))
    if keep is not None:
        if head is not None:
            keep_fwd[: i0 + 2] = head[keep]
        else:
            keep_fwd[0], keep_fwd[1] = s1[keep], s2[keep]
    f_prev = fe - fv[i0]
    f_cur = fe - fv[i0 + 1]
    for i in range(i0 + 1, n - 1):
        f_next = fe - fv[i + 1]
        un = ((12.0 - 10.0 * f_cur) * uc - f_prev * up) / f_next
        rows = join_rows.get(i)
        if rows is not None:
            cap_l[rows, 0] = up[rows]
            cap_l[rows, 1] = uc[rows]
            cap_l[rows, 2] = un[rows]
        np.add(nodes, (uc * un) < 0, out=nodes, casting="unsafe")
        up = uc
        uc = un
        f_prev = f_cur
        f_cur = f_next
        if keep is not None:
            keep_fwd[i + 1] = un[keep]
        if i % rescale_every == 0:
            big = np.maximum(np.abs(up), np.abs(uc))
            over = big > _RESCALE_LIMIT
            if over.any():
                # the stored outward array stays piecewise-scaled: rescales
                # only ever fire beyond the matching point, in the diverging
                # tail that the composed eigenfunction never uses
                fac = np.where(over, big, 1.0)
                up = up / fac
                uc = uc / fac
                log.debug("outward sweep rescaled %d rows at i=%d", int(over.sum()), i)

    if not need_w and keep is None:
        return nodes, None, None, i0, jj, None, seed_flips

    upb = np.zeros(m)
    ucb = np.full(m, 1e-30)
    cap_r = np.zeros((m, 3))
    if keep is not None:
        keep_bwd[n - 1] = 0.0
        keep_bwd[n - 2] = 1e-30
    f_prev = fe - fv[n - 1]
    f_cur = fe - fv[n - 2]
    for i in range(n - 2, 0, -1):
        f_next = fe - fv[i - 1]
        un = ((12.0 - 10.0 * f_cur) * ucb - f_prev * upb) / f_next
        rows = join_rows.get(i)
        if rows is not None:
            cap_r[rows, 2] = upb[rows]
            cap_r[rows, 1] = ucb[rows]
            cap_r[rows, 0] = un[rows]
        upb = ucb
        ucb = un
        f_prev = f_cur
        f_cur = f_next
        if keep is not None:
            keep_bwd[i - 1] = un[keep]
        if i % rescale_every == 0:
            big = np.maximum(np.abs(upb), np.abs(ucb))
            over = big > _RESCALE_LIMIT
            if over.any():
                fac = np.where(over, big, 1.0)
                upb = upb / fac
                ucb = ucb / fac
                log.debug("inward sweep rescaled %d rows at i=%d", int(over.sum()), i)
                if keep is not None and over[keep]:
                    keep_bwd[i - 1 :] /= big[keep]

    d_l = cap_l[:, 2] - cap_l[:, 0]
    d_r = cap_r[:, 2] - cap_r[:, 0]
    wron = d_l * cap_r[:, 1] - d_r * cap_l[:, 1]
    scale = np.abs(cap_l).max(axis=1) * np.abs(cap_r).max(axis=1)
    wron = wron / np.where(scale > 0, scale, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        logderiv = d_l / (2 * h * cap_l[:, 1]) - d_r / (2 * h * cap_r[:, 1])
    arrays = (keep_fwd, keep_bwd) if keep is not None else None
    return nodes, wron, logderiv, i0, jj, arrays, seed_flips


def trial_nodes(problem: RadialProblem, etas, raw_start: bool = False) -> np.ndarray:
    """Node counts of the outward solution for a batch of trial energies."""
    r = problem.grid()
    V = effective_potential(problem.potential, problem.omega, problem.l, r)
    return _batch(problem, r, V, etas, raw_start, need_w=False)[0]


def integrate(problem: RadialProblem, eta: float, raw_start: bool = False) -> ShotResult:
    """One trial shot at fixed eta: node count, matching defect, samples."""
    if not np.isfinite(eta):
        raise ValueError("eta must be finite")
    r = problem.grid()
    V = effective_potential(problem.potential, problem.omega, problem.l, r)
    nodes, _, logderiv, _, _, arrays, _ = _batch(
        problem, r, V, np.array([eta]), raw_start, need_w=True, keep=0
    )
    return ShotResult(
        nodes=int(nodes[0]), mismatch=float(logderiv[0]), samples=arrays[0]
    )


def _composite_nodes(u, seed_flips):
    pos = u > 0
    neg = u < 0
    sgn = np.where(pos, 1, np.where(neg, -1, 0))
    live = sgn != 0
    s = sgn[live]
    return int(seed_flips + np.count_nonzero(s[1:] * s[:-1] < 0))


def _eigenfunction(problem, r, V, eta, raw_start):
    """Matched, normalized eigenfunction at a converged eta."""
    _, _, _, i0, jj, arrays, seed_flips = _batch(
        problem, r, V, np.array([eta]), raw_start, need_w=True, keep=0
    )
    fwd, bwd = arrays
    j = int(jj[0])
    # avoid matching on a node of either branch
    best, best_amp = j, -1.0
    for cand in range(max(i0 + 2, j - 3), min(r.size - 3, j + 4)):
        amp = min(abs(fwd[cand]), abs(bwd[cand]))
        if amp > best_amp:
            best, best_amp = cand, amp
    j = best
    if fwd[j] == 0.0 or bwd[j] == 0.0:
        raise NumericsError(f"degenerate matching point at eta={eta}")
    u = np.empty_like(fwd)
    u[: j + 1] = fwd[: j + 1] / fwd[j]
    u[j:] = bwd[j:] / bwd[j]
    u[~np.isfinite(u)] = 0.0
    wave = normalize(RadialWaveFunction(grid=r, values=u))
    # the matched tail replaces the diverging outward one, so count nodes on
    # the composite from the hand-off; sub-grid nodes come from the core tally
    start = 0 if raw_start else i0 + 1
    return wave, _composite_nodes(wave.values[start:], int(seed_flips[0]))


def find_eigenvalues(request: SpectrumRequest, raw_start: bool = False) -> list[NumericalEigenstate]:
    """All eigenvalues in [eta_min, eta_max], ascending, converged to tol.

    The window is scanned in 400 panels; node-count transitions bracket
    each state (panels where the count jumps by more than one are
    subdivided), brackets are bisected on the node count, and the result
    is polished by a few secant steps on the matching defect.  An empty
    window returns an empty list.  Batched trial energies make the scan
    and the bisections one vectorized sweep per iteration.
    """
    problem = request.problem
    r = problem.grid()
    V = effective_potential(problem.potential, problem.omega, problem.l, r)

    def nodes_at(etas):
        return _batch(problem, r, V, etas, raw_start, need_w=False)[0]

    es = np.linspace(request.eta_min, request.eta_max, _SCAN_PANELS + 1)
    nodes = nodes_at(es)
    if np.any(np.diff(nodes) < 0):
        raise NumericsError(
            "node count decreased along the energy scan; the grid is too "
            "coarse for this problem - increase steps (smaller h)"
        )

    stack = [
        (es[i], es[i + 1], int(nodes[i]), int(nodes[i + 1]))
        for i in range(_SCAN_PANELS)
        if nodes[i + 1] > nodes[i]
    ]
    brackets = []
    while stack:
        todo = []
        for s in stack:
            if s[3] - s[2] == 1 or s[1] - s[0] < request.tol:
                brackets.append(s)
            else:
                todo.append(s)
        if not todo:
            break
        mids = np.array([0.5 * (a + b) for a, b, _, _ in todo])
        nm = nodes_at(mids)
        stack = []
        for (a, b, na, nb), mid, nmid in zip(todo, mids, nm.astype(int)):
            if nmid < na or nmid > nb:
                raise NumericsError(
                    "node count is not monotone while subdividing; increase steps"
                )
            if nmid > na:
                stack.append((a, mid, na, nmid))
            if nb > nmid:
                stack.append((mid, b, nmid, nb))

    singles = []
    for a, b, na, nb in sorted(brackets):
        for target in range(na + 1, nb + 1):
            singles.append((a, b, target))
    singles = singles[: request.max_states]
    if not singles:
        return []

    lo = np.array([s[0] for s in singles])
    hi = np.array([s[1] for s in singles])
    target = np.array([s[2] for s in singles])
    while np.max(hi - lo) > 0.25 * request.tol:
        mid = 0.5 * (lo + hi)
        nm = nodes_at(mid)
        go_up = nm >= target
        hi = np.where(go_up, mid, hi)
        lo = np.where(go_up, lo, mid)
    etas = 0.5 * (lo + hi)

    # secant polish on the matching defect inside each bracket
    x0 = np.maximum(etas - 0.25 * request.tol, request.eta_min)
    x1 = np.minimum(etas + 0.25 * request.tol, request.eta_max)
    w0 = _batch(problem, r, V, x0, raw_start)[1]
    w1 = _batch(problem, r, V, x1, raw_start)[1]
    for _ in range(8):
        denom = w1 - w0
        ok = np.abs(denom) > 0
        step = np.where(ok, w1 * (x1 - x0) / np.where(ok, denom, 1.0), 0.0)
        x2 = x1 - step
        inside = (x2 > etas - 2 * request.tol) & (x2 < etas + 2 * request.tol)
        x2 = np.where(inside, x2, 0.5 * (x0 + x1))
        if np.all(np.abs(x2 - x1) < 1e-3 * request.tol):
            x1 = x2
            break
        w2 = _batch(problem, r, V, x2, raw_start)[1]
        x0, w0, x1, w1 = x1, w1, x2, w2
    etas = np.where(np.abs(x1 - etas) <= 2 * request.tol, x1, etas)

    states = []
    for eta in sorted(etas):
        wave, nnodes = _eigenfunction(problem, r, V, float(eta), raw_start)
        states.append(NumericalEigenstate(eta=float(eta), nodes=nnodes, wave=wave))
    for a, b in zip(states, states[1:]):
        if b.nodes <= a.nodes:
            raise NumericsError(
                "returned node counts are not strictly increasing; the grid "
                "is too coarse for this problem - increase steps"
            )
    return states


def grid_resolvable_floor(problem: RadialProblem) -> float:
    """Deepest trial energy the three-point recursion can represent."""
    return -4.8 / problem.h**2


def bound_states(problem: RadialProblem, eta_floor: float) -> list[NumericalEigenstate]:
    """Negative-energy states in [eta_floor, 0) for an l = 0 problem.

    Only l = 0 can bind: for l >= 1 the centrifugal term (l^2 - 1/4)/r^2
    is repulsive and, together with the interaction, keeps the effective
    potential positive, so no negative eigenvalue exists.  At l = 0 the
    critical -1/(4 r^2) core binds only through the regularization; the
    raw grid start is used on purpose, and the returned energies carry
    their r_min (wave.grid[0]) because they depend on it.
    """
    if problem.l != 0:
        raise ValueError(
            "bound states exist only for l = 0: for l >= 1 the centrifugal "
            "plus interaction potential is strictly repulsive"
        )
    if eta_floor >= 0:
        raise ValueError("eta_floor must be negative")
    floor = grid_resolvable_floor(problem)
    if eta_floor < floor:
        raise ValueError(
            f"eta_floor={eta_floor:g} is below the grid-resolvable depth "
            f"{floor:g}; increase steps or raise eta_floor"
        )
    request = SpectrumRequest(
        problem=problem, eta_min=eta_floor, eta_max=-1e-9, max_states=50
    )
    return find_eigenvalues(request, raw_start=True)
