"""Parameter-space studies: reality regions, positivity, continuum limit.

The sweeps evaluate many couplings in one batched root solve.  When the
environment variable ``HERMITIZE_THREADS`` is set to a positive integer,
grids are split into that many chunks and solved concurrently; chunks
share no mutable state and results are assembled in axis order, and the
root iteration freezes accepted points, so the output is independent of
the chunking.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import SingularParameters
from .metric import (hermitian_eigenvalues, metric_band,
                     metric_band_extended, metric_n3_general,
                     metric_n3_special, metric_n4_special)
from .model import energy_from_y
from .spectrum import REALITY_TOL, _solve_batch, reality_flags

# Two real secular roots closer than this are flagged as a near-merge:
# the parameter point sits next to a complexification threshold and the
# real/complex classification is not robust there.
MERGE_TOL = 1e-4


def _max_threads():
    raw = os.environ.get("HERMITIZE_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        raise ValueError(
            f"HERMITIZE_THREADS must be a positive integer, got {raw!r}")
    return value


def _zs_from_grid(xi, zeta):
    """Vectorized coupling map with an explicit pole check."""
    xi = np.asarray(xi, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    denom = (1.0 - zeta) ** 2 + xi ** 2
    if np.any(denom == 0.0):
        raise SingularParameters(
            "grid hits the pole (xi, zeta) = (0, 1); split the range so "
            "this point is excluded")
    return ((1.0 - zeta) + 1j * xi) / denom


def _batched_roots(n, zs, tol=1e-12, max_iter=500):
    threads = _max_threads()
    if threads == 1 or zs.size < 2 * threads:
        return _solve_batch(n, zs, tol=tol, max_iter=max_iter)
    out = np.empty((zs.size, n), dtype=complex)
    chunks = [c for c in np.array_split(np.arange(zs.size), threads)
              if c.size]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {pool.submit(_solve_batch, n, zs[c],
                               tol=tol, max_iter=max_iter): c
                   for c in chunks}
        for fut, c in futures.items():
            out[c] = fut.result()
    return out


@dataclass
class RealityClassification:
    """Reality census of one root set.

    Attributes
    ----------
    n_real : int
    n_complex_pairs : int
        Non-real roots come in conjugate pairs (real coefficients).
    near_merge : numpy.ndarray
        Per-root flag: a real root with another real root closer than
        ``MERGE_TOL``; the classification is fragile at such points.
    """

    n_real: int
    n_complex_pairs: int
    near_merge: np.ndarray

    @property
    def all_real(self):
        return self.n_complex_pairs == 0


def classify_reality(y_roots, tol=REALITY_TOL, merge_tol=MERGE_TOL):
    """Count real roots and conjugate pairs, flagging near-merges.

    Parameters
    ----------
    y_roots : array_like
        Roots of one secular polynomial.
    tol : float
        Reality tolerance, scaled by max(1, |y|).
    merge_tol : float
        Gap below which two real roots are flagged as nearly merged.

    Returns
    -------
    RealityClassification
    """
    y = np.asarray(y_roots)
    real = reality_flags(y, tol)
    near = np.zeros(y.size, dtype=bool)
    re_parts = y.real[real]
    if re_parts.size > 1:
        srt = np.sort(re_parts)
        gaps = np.diff(srt) < merge_tol
        flagged = set()
        for i, g in enumerate(gaps):
            if g:
                flagged.add(srt[i])
                flagged.add(srt[i + 1])
        for i in np.flatnonzero(real):
            if y.real[i] in flagged:
                near[i] = True
    n_real = int(np.count_nonzero(real))
    return RealityClassification(
        n_real=n_real,
        n_complex_pairs=int(np.count_nonzero(~real)) // 2,
        near_merge=near)


@dataclass
class SweepResult:
    """Spectra along a one-parameter grid.

    Attributes
    ----------
    axis : str
        Name of the swept parameter ("xi" or "zeta").
    values : numpy.ndarray
        Grid values, ascending.
    fixed : dict
        The parameter held fixed.
    n : int
    convention : str
    y_roots : numpy.ndarray
        Shape (len(values), n), each row sorted by (Re, Im).
    energies : numpy.ndarray
    is_real : numpy.ndarray
        Boolean, same shape as ``y_roots``.
    """

    axis: str
    values: np.ndarray
    fixed: dict
    n: int
    convention: str
    y_roots: np.ndarray
    energies: np.ndarray
    is_real: np.ndarray

    @property
    def all_real(self):
        return np.all(self.is_real, axis=1)

    @property
    def n_real(self):
        return np.count_nonzero(self.is_real, axis=1)


def sweep_xi(n, zeta, xi_min, xi_max, steps, convention="lattice",
             tol=1e-12, max_iter=500):
    """Spectra along a xi grid at fixed zeta.

    Parameters
    ----------
    n : int
        Chain length.
    zeta : float
        Fixed detuning.
    xi_min, xi_max : float
        Grid range (inclusive).
    steps : int
        Number of grid points, >= 1.
    convention : {"lattice", "shifted"}
    tol, max_iter :
        Root solver controls.

    Returns
    -------
    SweepResult
    """
    values = np.linspace(xi_min, xi_max, steps)
    zs = _zs_from_grid(values, zeta)
    roots = _batched_roots(n, zs, tol=tol, max_iter=max_iter)
    return SweepResult(
        axis="xi", values=values, fixed={"zeta": zeta}, n=n,
        convention=convention, y_roots=roots,
        energies=energy_from_y(roots, convention),
        is_real=reality_flags(roots))


def sweep_zeta(n, xi, zeta_min, zeta_max, steps, convention="lattice",
               tol=1e-12, max_iter=500):
    """Spectra along a zeta grid at fixed xi.

    Raises ``SingularParameters`` when xi = 0 and the grid touches the
    pole zeta = 1; split the range in that case.

    Parameters
    ----------
    n : int
    xi : float
        Fixed coupling strength.
    zeta_min, zeta_max : float
    steps : int
    convention : {"lattice", "shifted"}
    tol, max_iter :
        Root solver controls.

    Returns
    -------
    SweepResult
    """
    values = np.linspace(zeta_min, zeta_max, steps)
    zs = _zs_from_grid(xi, values)
    roots = _batched_roots(n, zs, tol=tol, max_iter=max_iter)
    return SweepResult(
        axis="zeta", values=values, fixed={"xi": xi}, n=n,
        convention=convention, y_roots=roots,
        energies=energy_from_y(roots, convention),
        is_real=reality_flags(roots))


@dataclass
class CriticalResult:
    """Critical detuning below which the spectrum stays real for all xi.

    Attributes
    ----------
    n : int
    value : float
        Bisection midpoint of the last bracket.
    bracket : tuple
        Final (real, non-real) bracket of width <= the requested
        tolerance.
    xi_max, xi_steps : float, int
        The xi grid the reality predicate was evaluated on.
    """

    n: int
    value: float
    bracket: tuple
    xi_max: float
    xi_steps: int


def critical_zeta(n, xi_max=10.0, xi_steps=2000, zeta_tol=1e-5,
                  bracket=(0.0, 0.75), tol=1e-12):
    """Locate the largest zeta with an everywhere-real spectrum.

    For fixed zeta the spectrum is scanned over a xi grid; the critical
    value is bracketed by bisection on the predicate "all roots real over
    the grid".  The upper bracket end is enlarged automatically (up to
    0.99) if the spectrum is still real there.

    Parameters
    ----------
    n : int
    xi_max : float
        Upper end of the xi grid (lower end is 0).
    xi_steps : int
        Grid resolution; complexification windows narrower than the grid
        spacing can be missed, which biases the result upward.
    zeta_tol : float
        Bisection stops when the bracket is narrower than this.
    bracket : (float, float)
        Initial bracket; the predicate must hold at the lower end.
    tol : float
        Root solver tolerance.

    Returns
    -------
    CriticalResult
    """
    xi_grid = np.linspace(0.0, xi_max, xi_steps)

    def all_real(zeta):
        zs = _zs_from_grid(xi_grid, zeta)
        roots = _batched_roots(n, zs, tol=tol)
        return bool(np.all(reality_flags(roots)))

    lo, hi = bracket
    if not all_real(lo):
        raise ValueError(f"spectrum is not real at zeta = {lo}; "
                         "lower the bracket start")
    while all_real(hi):
        if hi >= 0.99:
            raise ValueError("no complexification found for zeta <= 0.99")
        hi = min(0.99, hi + 0.25)
    while hi - lo > zeta_tol:
        mid = 0.5 * (lo + hi)
        if all_real(mid):
            lo = mid
        else:
            hi = mid
    return CriticalResult(n=n, value=0.5 * (lo + hi), bracket=(lo, hi),
                          xi_max=xi_max, xi_steps=xi_steps)


_POSITIVITY_BUILDERS = {
    "band": lambda n, kw: (lambda v: metric_band(n, v)),
    "band_u": lambda n, kw: (lambda v: metric_band_extended(n, v, kw.get("u", 0.0))),
    "n3_general": lambda n, kw: (lambda v: metric_n3_general(
        v, r=kw.get("r", 1.0), s=kw.get("s", 1.0), u=kw.get("u", 0.0))),
    "n3_special": lambda n, kw: (lambda v: metric_n3_special(v, u=kw.get("u", 0.0))),
    "n4_special": lambda n, kw: (lambda v: metric_n4_special(v)),
}

_FIXED_SIZE_FAMILIES = {"n3_general": 3, "n3_special": 3, "n4_special": 4}


@dataclass
class PositivityResult:
    """Positivity census of a metric family along its parameter.

    Attributes
    ----------
    family : str
    n : int
    extra : dict
        Fixed family parameters (u, r, s where applicable).
    values : numpy.ndarray
        Parameter grid.
    min_eigenvalues : numpy.ndarray
        Smallest metric eigenvalue at each grid point.
    edge_positive, edge_negative : float or None
        Bisection-refined positivity edges above/below zero, when the
        grid detects a sign change on that side.
    loss_abs : float or None
        Smallest |parameter| at which positivity is lost.
    """

    family: str
    n: int
    extra: dict
    values: np.ndarray
    min_eigenvalues: np.ndarray
    edge_positive: float | None
    edge_negative: float | None
    loss_abs: float | None


def metric_positivity_sweep(family, n, param_min, param_max, steps,
                            param_tol=1e-6, **extra):
    """Scan a metric family for loss of positive definiteness.

    The family parameter (omega for the band families, xi for the fixed
    size ones) is swept over a grid; where the smallest eigenvalue changes
    sign next to the origin, the edge is refined by bisection to
    ``param_tol``.

    Parameters
    ----------
    family : str
        One of "band", "band_u", "n3_general", "n3_special", "n4_special".
    n : int
        Dimension; must be 3 or 4 for the fixed-size families.
    param_min, param_max : float
        Grid range; should contain 0, where every family is positive.
    steps : int
    param_tol : float
        Bisection tolerance for the edges.
    **extra :
        Fixed family parameters (u, r, s).

    Returns
    -------
    PositivityResult
    """
    if family not in _POSITIVITY_BUILDERS:
        raise ValueError(f"unknown family {family!r}")
    want = _FIXED_SIZE_FAMILIES.get(family)
    if want is not None and n != want:
        raise ValueError(f"family {family!r} has fixed size {want}")
    build = _POSITIVITY_BUILDERS[family](n, extra)

    values = np.linspace(param_min, param_max, steps)
    min_eigs = np.array([hermitian_eigenvalues(build(v).matrix)[0]
                         for v in values])

    def refine(a, b):
        # min-eig > 0 at a, <= 0 at b; returns the midpoint at param_tol.
        while abs(b - a) > param_tol:
            mid = 0.5 * (a + b)
            if hermitian_eigenvalues(build(mid).matrix)[0] > 0.0:
                a = mid
            else:
                b = mid
        return 0.5 * (a + b)

    positive = min_eigs > 0.0
    edge_pos = None
    edge_neg = None
    upper = np.flatnonzero((values[:-1] >= 0.0) & positive[:-1]
                           & ~positive[1:])
    if upper.size:
        k = upper[0]
        edge_pos = refine(values[k], values[k + 1])
    lower = np.flatnonzero((values[1:] <= 0.0) & positive[1:]
                           & ~positive[:-1])
    if lower.size:
        k = lower[-1]
        edge_neg = refine(values[k + 1], values[k])
    losses = [abs(e) for e in (edge_pos, edge_neg) if e is not None]
    return PositivityResult(
        family=family, n=n, extra=dict(extra), values=values,
        min_eigenvalues=min_eigs, edge_positive=edge_pos,
        edge_negative=edge_neg, loss_abs=min(losses) if losses else None)


@dataclass
class ContinuumTable:
    """Low eigenvalues of the hard-wall chain against the box spectrum.

    Attributes
    ----------
    ms : list of int
        Half-size parameters; the chain has 2 M - 1 sites.
    levels : int
    energies : numpy.ndarray
        Raw lattice energies, shape (len(ms), levels).
    rescaled : numpy.ndarray
        Energies times ((2 M + 1) / 2)^2, the lattice-to-box scaling.
    targets : numpy.ndarray
        Box limits ((k pi / 2)^2 for level k), shape (levels,).
    """

    ms: list
    levels: int
    energies: np.ndarray
    rescaled: np.ndarray
    targets: np.ndarray

    def richardson(self):
        """Extrapolate the rescaled energies in 1/M.

        Requires the M sequence to double at each step; eliminates the
        1/M, 1/M^2, ... corrections with the standard tableau
        T[i, j] = (2^j T[i+1, j-1] - T[i, j-1]) / (2^j - 1).

        Returns
        -------
        numpy.ndarray
            One extrapolated value per level.
        """
        ms = self.ms
        for a, b in zip(ms, ms[1:]):
            if b != 2 * a:
                raise ValueError("Richardson extrapolation needs a "
                                 "doubling M sequence")
        tab = self.rescaled.copy()
        rows = tab.shape[0]
        for j in range(1, rows):
            fac = 2.0 ** j
            tab = (fac * tab[1:] - tab[:-1]) / (fac - 1.0)
        return tab[0]


def continuum_convergence(ms, levels=2):
    """Hard-wall chain spectra on the path to the continuum box.

    The chain with 2 M - 1 sites and impenetrable ends has the closed-form
    spectrum E_k = 2 - 2 cos(k pi / (2 M)); rescaling by ((2 M + 1) / 2)^2
    sends level k to (k pi / 2)^2 as M grows.

    Parameters
    ----------
    ms : sequence of int
        Half-size parameters, each >= levels.
    levels : int
        Number of low levels to tabulate.

    Returns
    -------
    ContinuumTable
    """
    ms = [int(m) for m in ms]
    if any(m < max(1, levels) for m in ms):
        raise ValueError("each M must be at least the number of levels")
    k = np.arange(1, levels + 1)
    energies = np.empty((len(ms), levels))
    rescaled = np.empty_like(energies)
    for i, m in enumerate(ms):
        e = 2.0 - 2.0 * np.cos(k * np.pi / (2.0 * m))
        energies[i] = e
        rescaled[i] = e * ((2.0 * m + 1.0) / 2.0) ** 2
    targets = (k * np.pi / 2.0) ** 2
    return ContinuumTable(ms=ms, levels=levels, energies=energies,
                          rescaled=rescaled, targets=targets)


@dataclass
class LocusBranch:
    """One curve in the (zeta, xi) plane where a root sits at y = +/-1."""

    name: str
    t: np.ndarray
    zeta: np.ndarray
    xi: np.ndarray


@dataclass
class LocusResult:
    """Both endpoint loci of the n-site well (upper half plane xi >= 0)."""

    n: int
    y_plus: LocusBranch
    y_minus: LocusBranch


def endpoint_locus(n, samples=20, t=None):
    """Closed-form loci where a secular root reaches y = +1 or y = -1.

    The y = +1 branch is the circle zeta^2 + xi^2 = 2 zeta / (n + 1)
    (through the origin); the y = -1 branch is parametrized by the radius
    rho = |(zeta, xi)| via zeta = (4 n + (n + 1) rho^2) / (4 n + 2) with
    rho running from 2 - 2/(n + 1) to 2.

    Parameters
    ----------
    n : int
    samples : int
        Number of points per branch when ``t`` is not given.
    t : array_like, optional
        Explicit parameter values in [0, 1] to sample both branches at.

    Returns
    -------
    LocusResult
    """
    if t is None:
        t = np.linspace(0.0, 1.0, samples)
    t = np.asarray(t, dtype=float)
    if np.any((t < 0.0) | (t > 1.0)):
        raise ValueError("parameter values must lie in [0, 1]")

    zeta_p = t * 2.0 / (n + 1.0)
    xi_p = np.sqrt(np.maximum(2.0 * zeta_p / (n + 1.0) - zeta_p ** 2, 0.0))
    plus = LocusBranch(name="y_plus", t=t, zeta=zeta_p, xi=xi_p)

    rho_lo = 2.0 - 2.0 / (n + 1.0)
    rho = rho_lo + t * (2.0 - rho_lo)
    zeta_m = (4.0 * n + (n + 1.0) * rho ** 2) / (4.0 * n + 2.0)
    xi_m = np.sqrt(np.maximum(rho ** 2 - zeta_m ** 2, 0.0))
    minus = LocusBranch(name="y_minus", t=t, zeta=zeta_m, xi=xi_m)
    return LocusResult(n=n, y_plus=plus, y_minus=minus)
