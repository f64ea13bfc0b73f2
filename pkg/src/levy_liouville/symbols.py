"""Characteristic exponents of Levy processes and their jump measures.

A symbol is a continuous negative definite function psi with the
Levy-Khintchine form

    psi(xi) = i b.xi + xi.Q xi / 2 + integral of
              (1 - exp(i y.xi) + i y.xi 1_{(0,1)}(|y|)) nu(dy),

parameterised either by a closed-form family or by an explicit triplet
(b, Q, nu).  Jump measures are integrated over dyadic shells with
Gauss-Legendre panels; small-jump truncation is controlled through the
declared singularity order and a geometric tail extrapolation that is exact
for power-law densities.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._quadrature import angular_rule, geometric_tail, geometric_tail_array, panel_nodes
from .errors import NonLiouvilleWarning, QuadratureDivergence, UnsupportedFamily

TOL_PSD = 1e-12
MOMENT_DECAY_RATIO = 0.95
MOMENT_FAIL_STREAK = 8

_FAMILIES = (
    "brownian",
    "isotropic_stable",
    "relativistic",
    "tempered_stable",
    "compound_poisson",
    "subordinated_bm",
    "custom",
)


# ---------------------------------------------------------------------------
# jump measures
# ---------------------------------------------------------------------------

@dataclass
class LevyMeasureSpec:
    """Descriptor of a jump measure nu on R^d minus the origin.

    kind "density" takes a full density y -> n(y) (vectorised), "radial" a
    radial profile r -> q(r) with nu(dy) = q(|y|) dy, and "atoms" a finite
    list of (location, mass) pairs.  ``singularity_order`` is the exponent s
    with n(y) ~ |y|^(-d-s) near the origin; it sizes the shell quadrature.
    """

    kind: str
    density_fn: Callable | None = None
    singularity_order: float = 0.0
    atoms: Sequence = ()
    support_radius: float | None = None
    dimension: int = 1

    def __post_init__(self):
        if self.kind not in ("density", "radial", "atoms"):
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.dimension not in (1, 2, 3):
            raise ValueError("measure dimension must be 1, 2 or 3")
        if self.kind == "atoms":
            locs = []
            masses = []
            for loc, mass in self.atoms:
                y = np.atleast_1d(np.asarray(loc, dtype=float))
                if y.shape != (self.dimension,):
                    raise ValueError("atom location has wrong dimension")
                if not np.any(y != 0.0):
                    raise ValueError("atom locations must be nonzero")
                if mass <= 0.0:
                    raise ValueError("atom masses must be positive")
                locs.append(y)
                masses.append(float(mass))
            self._atom_locs = np.array(locs) if locs else np.zeros((0, self.dimension))
            self._atom_masses = np.array(masses)
        else:
            if self.density_fn is None:
                raise ValueError(f"kind {self.kind!r} requires density_fn")
            if not 0.0 <= self.singularity_order < 2.0:
                raise ValueError("singularity_order must lie in [0, 2)")
            self._atom_locs = np.zeros((0, self.dimension))
            self._atom_masses = np.zeros(0)
        self._tables: dict[float, _MeasureTable] = {}
        # integrability of min(1, |y|^2) against nu, checked by building the
        # default quadrature table
        if self.kind != "atoms":
            self.table(64.0)

    # -- quadrature table ---------------------------------------------------

    def table(self, max_freq: float) -> "_MeasureTable":
        bucket = 2.0 ** math.ceil(math.log2(max(max_freq, 64.0)))
        tab = self._tables.get(bucket)
        if tab is None:
            tab = _MeasureTable.build(self, bucket)
            self._tables[bucket] = tab
        return tab

    def density_at(self, pts: np.ndarray, radii: np.ndarray) -> np.ndarray:
        """Density values at points ``pts`` with radii ``radii``."""
        if self.kind == "radial":
            return np.asarray(self.density_fn(radii), dtype=float)
        if self.dimension == 1:
            return np.asarray(self.density_fn(pts[:, 0]), dtype=float)
        return np.asarray(self.density_fn(pts), dtype=float)

    def reflected(self) -> "LevyMeasureSpec":
        """The image measure under y -> -y."""
        if self.kind == "atoms":
            return LevyMeasureSpec(
                kind="atoms",
                atoms=[(-loc, mass) for loc, mass in zip(self._atom_locs, self._atom_masses)],
                dimension=self.dimension,
            )
        if self.kind == "radial":
            return self
        fn = self.density_fn
        if self.dimension == 1:
            refl = lambda y: fn(-np.asarray(y))
        else:
            refl = lambda y: fn(-np.asarray(y))
        return LevyMeasureSpec(
            kind="density",
            density_fn=refl,
            singularity_order=self.singularity_order,
            support_radius=self.support_radius,
            dimension=self.dimension,
        )


class _MeasureTable:
    """Precomputed shell nodes/weights for one measure and frequency range."""

    __slots__ = (
        "inner_pts", "inner_wts", "inner_starts",
        "outer_pts", "outer_wts", "outer_starts",
        "inner_m2", "outer_mass", "outer_tail_mass", "max_freq",
    )

    @staticmethod
    def build(nu: LevyMeasureSpec, max_freq: float) -> "_MeasureTable":
        d = nu.dimension
        dirs, ang_w = angular_rule(d)
        tab = _MeasureTable()
        tab.max_freq = max_freq

        def shell(a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
            width = b - a
            n_panels = int(np.clip(math.ceil(width * max_freq / 18.0), 1, 64))
            r, wr = panel_nodes(a, b, n_panels, 16)
            pts = (r[:, None, None] * dirs[None, :, :]).reshape(-1, d)
            radii = np.repeat(r, len(dirs))
            wts = (wr[:, None] * ang_w[None, :]).reshape(-1)
            wts = wts * radii ** (d - 1) * nu.density_at(pts, radii)
            return pts, wts

        # inner shells: scales r_in * 2^-j down towards the origin
        r_in = min(1.0, nu.support_radius) if nu.support_radius else 1.0
        j_cap = max(32, int(900.0 / (d + max(nu.singularity_order, 0.25))))
        pts_list, wts_list, starts, m2 = [], [], [], []
        offset = 0
        j = 0
        streak = 0
        while True:
            a, b = r_in * 2.0 ** (-j - 1), r_in * 2.0 ** (-j)
            pts, wts = shell(a, b)
            radii = np.linalg.norm(pts, axis=1) if d > 1 else np.abs(pts[:, 0])
            pts_list.append(pts)
            wts_list.append(wts)
            starts.append(offset)
            offset += len(wts)
            m2.append(float(np.sum(wts * radii**2)))
            if j >= 2:
                ratio = m2[-1] / m2[-2] if m2[-2] > 0 else 0.0
                streak = streak + 1 if ratio >= 0.9999 else 0
                if streak >= MOMENT_FAIL_STREAK:
                    raise QuadratureDivergence(
                        "second-moment shell sums near the origin fail to decay"
                    )
                prev_ratio = m2[-2] / m2[-3] if m2[-3] > 0 else 0.0
                tail = abs(geometric_tail(m2[-1], m2[-2]))
                stable_ratio = abs(ratio - prev_ratio) <= 1e-9 * max(ratio, 1e-30)
                total = sum(m2)
                if j >= 24 and (tail < 1e-13 * max(total, 1e-300) or stable_ratio):
                    break
            if j >= j_cap:
                break
            j += 1
        tab.inner_pts = np.concatenate(pts_list)
        tab.inner_wts = np.concatenate(wts_list)
        tab.inner_starts = np.array(starts)
        tab.inner_m2 = np.array(m2)

        # outer shells: 1, 2, 4, ... out to the support radius or until the
        # shell masses are negligible
        pts_list, wts_list, starts, mass = [], [], [], []
        offset = 0
        r_out = nu.support_radius if nu.support_radius else math.inf
        j = 0
        streak = 0
        tail_mass = 0.0
        while 2.0**j < r_out and j < 256:
            a, b = 2.0**j, min(2.0 ** (j + 1), r_out)
            pts, wts = shell(a, b)
            pts_list.append(pts)
            wts_list.append(wts)
            starts.append(offset)
            offset += len(wts)
            mass.append(float(np.sum(wts)))
            if j >= 2:
                ratio = mass[-1] / mass[-2] if mass[-2] > 0 else 0.0
                streak = streak + 1 if ratio >= MOMENT_DECAY_RATIO else 0
                if streak >= MOMENT_FAIL_STREAK:
                    raise QuadratureDivergence("jump measure has infinite mass away from 0")
                tail = abs(geometric_tail(mass[-1], mass[-2]))
                if tail < 1e-15 * max(sum(mass), 1e-300):
                    tail_mass = tail
                    break
            j += 1
        else:
            if mass and len(mass) >= 2:
                tail_mass = abs(geometric_tail(mass[-1], mass[-2]))
        if pts_list:
            tab.outer_pts = np.concatenate(pts_list)
            tab.outer_wts = np.concatenate(wts_list)
            tab.outer_starts = np.array(starts)
            tab.outer_mass = np.array(mass)
        else:
            tab.outer_pts = np.zeros((0, d))
            tab.outer_wts = np.zeros(0)
            tab.outer_starts = np.zeros(0, dtype=int)
            tab.outer_mass = np.zeros(0)
        tab.outer_tail_mass = tail_mass
        return tab


def _one_minus_exp_compensated(z: np.ndarray) -> np.ndarray:
    """1 - exp(iz) + iz, elementwise, cancellation-safe for small z."""
    real = 2.0 * np.sin(0.5 * z) ** 2
    small = np.abs(z) < 0.25
    z2 = z * z
    series = (z * z2 / 6.0) * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0 * (1.0 - z2 / 72.0)))
    imag = np.where(small, series, z - np.sin(z))
    return real + 1j * imag


def _measure_psi(nu: LevyMeasureSpec, xi: np.ndarray) -> np.ndarray:
    """Compensated Levy-Khintchine integral of nu at frequencies xi (m, d)."""
    m = xi.shape[0]
    out = np.zeros(m, dtype=complex)
    if nu.kind == "atoms":
        z = xi @ nu._atom_locs.T  # (m, n_atoms)
        radii = np.linalg.norm(nu._atom_locs, axis=1)
        comp = radii < 1.0
        vals = (1.0 - np.exp(1j * z)) + 1j * z * comp[None, :]
        return vals @ nu._atom_masses
    xi_max = float(np.max(np.linalg.norm(xi, axis=1))) if m else 0.0
    tab = nu.table(xi_max)
    chunk = max(1, int(4.0e6 / max(len(tab.inner_wts), 1)))
    for lo in range(0, m, chunk):
        sl = slice(lo, min(lo + chunk, m))
        z_in = tab.inner_pts @ xi[sl].T  # (q_in, mc)
        contrib = _one_minus_exp_compensated(z_in) * tab.inner_wts[:, None]
        shells = np.add.reduceat(contrib, tab.inner_starts, axis=0)
        total = shells.sum(axis=0)
        if len(shells) >= 2:
            total = total + geometric_tail_array(shells[-1], shells[-2])
        if len(tab.outer_wts):
            z_out = tab.outer_pts @ xi[sl].T
            vals = (1.0 - np.exp(1j * z_out)) * tab.outer_wts[:, None]
            oshells = np.add.reduceat(vals, tab.outer_starts, axis=0)
            total = total + oshells.sum(axis=0)
            if len(oshells) >= 2:
                total = total + geometric_tail_array(oshells[-1], oshells[-2])
        out[sl] = total
    return out


def _measure_inner_first_moment(nu: LevyMeasureSpec) -> np.ndarray:
    """Vector integral of y over {0 < |y| < 1} against nu (finite-mass case)."""
    d = nu.dimension
    if nu.kind == "atoms":
        inside = np.linalg.norm(nu._atom_locs, axis=1) < 1.0
        return (nu._atom_locs[inside] * nu._atom_masses[inside, None]).sum(axis=0)
    if nu.kind == "radial":
        return np.zeros(d)
    tab = nu.table(64.0)
    return (tab.inner_pts * tab.inner_wts[:, None]).sum(axis=0)


# ---------------------------------------------------------------------------
# triplets and subordinators
# ---------------------------------------------------------------------------

@dataclass
class LevyTriplet:
    """Levy triplet (b, Q, nu) with the unit-ball jump cutoff."""

    b: np.ndarray
    Q: np.ndarray
    nu: LevyMeasureSpec | None = None

    def __post_init__(self):
        self.b = np.atleast_1d(np.asarray(self.b, dtype=float))
        d = len(self.b)
        self.Q = np.asarray(self.Q, dtype=float).reshape(d, d)
        if not np.allclose(self.Q, self.Q.T, atol=1e-10):
            raise ValueError("diffusion matrix must be symmetric")
        eigs = np.linalg.eigvalsh(self.Q)
        if np.min(eigs) < -TOL_PSD:
            raise ValueError("diffusion matrix must be positive semi-definite")
        if self.nu is not None and self.nu.dimension != d:
            raise ValueError("jump measure dimension does not match drift")

    @property
    def dimension(self) -> int:
        return len(self.b)

    def adjoint(self) -> "LevyTriplet":
        """Triplet of the L^2 adjoint: (-b, Q, nu(-dy))."""
        nu = self.nu.reflected() if self.nu is not None else None
        return LevyTriplet(-self.b, self.Q, nu)


@dataclass
class SubordinatorSpec:
    """Nondecreasing Levy process used as a random clock for Brownian motion.

    The stable kind uses the Laplace exponent (2*lam)^rho so that the
    subordinated symbol is exactly |xi|^(2*rho).
    """

    kind: str
    rho: float = 0.5
    rate: float = 1.0
    shape: float = 1.0
    theta: float = 1.0

    def __post_init__(self):
        if self.kind not in ("stable", "deterministic", "gamma"):
            raise ValueError(f"unknown subordinator kind {self.kind!r}")
        if self.kind == "stable" and not 0.0 < self.rho < 1.0:
            raise ValueError("stable subordinator index must lie in (0, 1)")
        if self.kind == "deterministic" and self.rate <= 0.0:
            raise ValueError("deterministic rate must be positive")
        if self.kind == "gamma" and (self.shape <= 0.0 or self.theta <= 0.0):
            raise ValueError("gamma subordinator needs positive shape and rate")

    def laplace_exponent(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self.kind == "stable":
            return (2.0 * lam) ** self.rho
        if self.kind == "deterministic":
            return self.rate * lam
        return self.shape * np.log1p(lam / self.theta)

    @property
    def hits_zero_with_probability_zero(self) -> bool:
        return True


# ---------------------------------------------------------------------------
# symbol specifications
# ---------------------------------------------------------------------------

@dataclass
class SymbolSpec:
    """A characteristic exponent, either closed form or via a custom triplet."""

    family: str
    dimension: int = 1
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown symbol family {self.family!r}")
        if self.dimension not in (1, 2, 3):
            raise ValueError("dimension must be 1, 2 or 3")
        self._validate_params()
        self._lattice_cache: dict = {}
        self._spot_check()

    def _validate_params(self):
        p = self.params
        fam = self.family
        if fam == "brownian":
            d = self.dimension
            Q = np.asarray(p.get("Q", np.eye(d)), dtype=float).reshape(d, d)
            b = np.atleast_1d(np.asarray(p.get("b", np.zeros(d)), dtype=float))
            if len(b) != d:
                raise ValueError("drift has wrong dimension")
            eigs = np.linalg.eigvalsh(0.5 * (Q + Q.T))
            if np.min(eigs) < -TOL_PSD:
                raise ValueError("diffusion matrix must be positive semi-definite")
            p["Q"], p["b"] = Q, b
        elif fam == "isotropic_stable":
            if not 0.0 < p.get("alpha", -1.0) < 2.0:
                raise ValueError("stable index must lie in (0, 2)")
        elif fam == "relativistic":
            if p.get("m", 0.0) <= 0.0:
                raise ValueError("relativistic mass must be positive")
        elif fam == "tempered_stable":
            if not 0.0 < p.get("alpha", -1.0) < 2.0 or p.get("lam", 0.0) <= 0.0:
                raise ValueError("tempered stable needs alpha in (0,2) and lam > 0")
        elif fam == "compound_poisson":
            nu = p.get("nu")
            if not isinstance(nu, LevyMeasureSpec) or nu.dimension != self.dimension:
                raise ValueError("compound_poisson needs a jump measure of matching dimension")
        elif fam == "subordinated_bm":
            sub = p.get("subordinator")
            if not isinstance(sub, SubordinatorSpec):
                raise ValueError("subordinated_bm needs a SubordinatorSpec")
        elif fam == "custom":
            trip = p.get("triplet")
            if not isinstance(trip, LevyTriplet) or trip.dimension != self.dimension:
                raise ValueError("custom symbol needs a LevyTriplet of matching dimension")

    def _spot_check(self):
        d = self.dimension
        rng = np.random.default_rng(20260810)
        probes = rng.uniform(-6.0, 6.0, size=(12, d))
        psi0 = complex(np.asarray(eval_symbol(self, np.zeros(d))).ravel()[0])
        if psi0 != 0:
            raise ValueError(f"symbol does not vanish at the origin: psi(0)={psi0}")
        vals = eval_symbol(self, probes)
        vals_neg = eval_symbol(self, -probes)
        scale = 1.0 + np.max(np.abs(vals))
        if np.max(np.abs(vals_neg - np.conj(vals))) > 1e-10 * scale:
            raise ValueError("symbol violates conjugate symmetry on the probe set")
        if np.min(vals.real) < -1e-9 * scale:
            raise ValueError("symbol has negative real part on the probe set")


def _as_batch(xi, dimension: int) -> tuple[np.ndarray, bool]:
    xi = np.asarray(xi, dtype=float)
    if dimension == 1:
        if xi.ndim == 0:
            return xi.reshape(1, 1), True
        if xi.ndim == 1:
            return xi.reshape(-1, 1), False
        return xi.reshape(-1, 1), False
    if xi.ndim == 1:
        if xi.shape != (dimension,):
            raise ValueError("frequency vector has wrong dimension")
        return xi.reshape(1, -1), True
    if xi.shape[-1] != dimension:
        raise ValueError("frequency batch has wrong trailing dimension")
    return xi.reshape(-1, dimension), False


def eval_symbol(spec: SymbolSpec, xi):
    """Evaluate psi(xi); accepts a single frequency or a batch."""
    pts, squeeze = _as_batch(xi, spec.dimension)
    fam = spec.family
    p = spec.params
    if fam == "brownian":
        val = 1j * (pts @ p["b"]) + 0.5 * np.einsum("md,de,me->m", pts, p["Q"], pts)
        val = val.astype(complex)
    elif fam == "isotropic_stable":
        val = (np.linalg.norm(pts, axis=1) ** p["alpha"]).astype(complex)
    elif fam == "relativistic":
        m = p["m"]
        val = (np.sqrt(np.sum(pts**2, axis=1) + m * m) - m).astype(complex)
    elif fam == "tempered_stable":
        a, lam = p["alpha"], p["lam"]
        val = ((np.sum(pts**2, axis=1) + lam * lam) ** (0.5 * a) - lam**a).astype(complex)
    elif fam == "subordinated_bm":
        sub = p["subordinator"]
        val = sub.laplace_exponent(0.5 * np.sum(pts**2, axis=1)).astype(complex)
    elif fam == "compound_poisson":
        nu = p["nu"]
        b = p.get("_compensator")
        if b is None:
            b = -_measure_inner_first_moment(nu)
            p["_compensator"] = b
        val = 1j * (pts @ b) + _measure_psi(nu, pts)
    else:  # custom
        trip: LevyTriplet = p["triplet"]
        val = 1j * (pts @ trip.b) + 0.5 * np.einsum("md,de,me->m", pts, trip.Q, pts)
        val = val.astype(complex)
        if trip.nu is not None:
            val = val + _measure_psi(trip.nu, pts)
    return complex(val[0]) if squeeze else val


# -- factory helpers --------------------------------------------------------

def brownian(dimension: int = 1, Q=None, b=None) -> SymbolSpec:
    params = {}
    if Q is not None:
        params["Q"] = Q
    if b is not None:
        params["b"] = b
    return SymbolSpec("brownian", dimension, params)


def isotropic_stable(alpha: float, dimension: int = 1) -> SymbolSpec:
    return SymbolSpec("isotropic_stable", dimension, {"alpha": float(alpha)})


def relativistic(m: float, dimension: int = 1) -> SymbolSpec:
    return SymbolSpec("relativistic", dimension, {"m": float(m)})


def tempered_stable(alpha: float, lam: float, dimension: int = 1) -> SymbolSpec:
    return SymbolSpec("tempered_stable", dimension, {"alpha": float(alpha), "lam": float(lam)})


def compound_poisson(nu: LevyMeasureSpec, dimension: int = 1) -> SymbolSpec:
    return SymbolSpec("compound_poisson", dimension, {"nu": nu})


def subordinated_bm(subordinator: SubordinatorSpec, dimension: int = 1) -> SymbolSpec:
    return SymbolSpec("subordinated_bm", dimension, {"subordinator": subordinator})


def custom(triplet: LevyTriplet) -> SymbolSpec:
    return SymbolSpec("custom", triplet.dimension, {"triplet": triplet})


# ---------------------------------------------------------------------------
# calibrated stable triplets
# ---------------------------------------------------------------------------

_STABLE_MEASURES: dict[tuple[float, int], LevyMeasureSpec] = {}


def stable_levy_measure(alpha: float, dimension: int = 1) -> LevyMeasureSpec:
    """Jump measure c |y|^(-d-alpha) dy calibrated so the symbol is |xi|^alpha.

    The constant is computed numerically by matching the compensated integral
    at |xi| = 1; no closed-form normalisation is hard-coded.
    """
    key = (round(float(alpha), 12), dimension)
    nu = _STABLE_MEASURES.get(key)
    if nu is not None:
        return nu
    unit = LevyMeasureSpec(
        kind="radial",
        density_fn=lambda r: r ** (-dimension - alpha),
        singularity_order=alpha,
        dimension=dimension,
    )
    e1 = np.zeros((1, dimension))
    e1[0, 0] = 1.0
    psi1 = float(_measure_psi(unit, e1).real[0])
    c = 1.0 / psi1
    nu = LevyMeasureSpec(
        kind="radial",
        density_fn=lambda r: c * r ** (-dimension - alpha),
        singularity_order=alpha,
        dimension=dimension,
    )
    _STABLE_MEASURES[key] = nu
    return nu


def levy_triplet(spec: SymbolSpec) -> LevyTriplet:
    """The triplet (b, Q, nu) of a symbol, where one is available."""
    d = spec.dimension
    fam = spec.family
    if fam == "brownian":
        return LevyTriplet(spec.params["b"], spec.params["Q"], None)
    if fam == "isotropic_stable":
        return LevyTriplet(np.zeros(d), np.zeros((d, d)), stable_levy_measure(spec.params["alpha"], d))
    if fam == "compound_poisson":
        nu = spec.params["nu"]
        b = -_measure_inner_first_moment(nu)
        return LevyTriplet(b, np.zeros((d, d)), nu)
    if fam == "custom":
        return spec.params["triplet"]
    raise UnsupportedFamily(f"no explicit triplet available for family {fam!r}")


def levy_measure_of(spec: SymbolSpec) -> LevyMeasureSpec | None:
    """Jump measure of a symbol, None when there are no jumps."""
    try:
        return levy_triplet(spec).nu
    except UnsupportedFamily:
        raise


# ---------------------------------------------------------------------------
# moments, growth diagnostics, zero sets
# ---------------------------------------------------------------------------

@dataclass
class MomentReport:
    """Result of integrating |y|^beta against nu over {|y| >= 1}."""

    beta: float
    value: float
    finite: bool
    shells: np.ndarray = field(default_factory=lambda: np.zeros(0))


def levy_measure_moment(nu: LevyMeasureSpec | None, beta: float) -> MomentReport:
    """Adaptive shell quadrature of |y|^beta nu(dy) over {|y| >= 1}.

    Divergence is declared when 8 consecutive outer shells fail the
    ratio-decay test at 0.95; otherwise the geometric tail is extrapolated.
    """
    if beta < 0.0:
        raise ValueError("moment order must be nonnegative")
    if nu is None:
        return MomentReport(beta=beta, value=0.0, finite=True)
    if nu.kind == "atoms":
        radii = np.linalg.norm(nu._atom_locs, axis=1)
        outside = radii >= 1.0
        value = float(np.sum(nu._atom_masses[outside] * radii[outside] ** beta))
        return MomentReport(beta=beta, value=value, finite=True)

    d = nu.dimension
    dirs, ang_w = angular_rule(d)
    r_out = nu.support_radius if nu.support_radius else math.inf
    sums = []
    streak = 0
    j = 0
    while 2.0**j < r_out and j < 200:
        a, b = 2.0**j, min(2.0 ** (j + 1), r_out)
        r, wr = panel_nodes(a, b, 2, 16)
        pts = (r[:, None, None] * dirs[None, :, :]).reshape(-1, d)
        radii = np.repeat(r, len(dirs))
        wts = (wr[:, None] * ang_w[None, :]).reshape(-1)
        dens = nu.density_at(pts, radii)
        sums.append(float(np.sum(wts * radii ** (d - 1 + beta) * dens)))
        if j >= 1 and sums[-2] > 0:
            ratio = sums[-1] / sums[-2]
            streak = streak + 1 if ratio >= MOMENT_DECAY_RATIO else 0
            if streak >= MOMENT_FAIL_STREAK:
                return MomentReport(beta=beta, value=math.inf, finite=False, shells=np.array(sums))
            tail = abs(geometric_tail(sums[-1], sums[-2]))
            if tail < 1e-12 * max(sum(sums), 1e-300):
                return MomentReport(
                    beta=beta, value=sum(sums) + tail, finite=True, shells=np.array(sums)
                )
        j += 1
    if len(sums) >= 2 and sums[-2] > 0 and sums[-1] / sums[-2] < MOMENT_DECAY_RATIO:
        tail = abs(geometric_tail(sums[-1], sums[-2]))
        return MomentReport(beta=beta, value=sum(sums) + tail, finite=True, shells=np.array(sums))
    if 2.0 ** (j - 1) >= r_out:  # truncated support, plain finite sum
        return MomentReport(beta=beta, value=sum(sums), finite=True, shells=np.array(sums))
    return MomentReport(beta=beta, value=math.inf, finite=False, shells=np.array(sums))


def hartman_wintner_diagnostic(spec: SymbolSpec, probe_radii: Sequence[float]) -> dict:
    """Growth table of min_{|xi|=R} Re psi(xi) / log R with a heuristic verdict.

    The verdict only inspects monotone growth of the ratios; it is labeled a
    heuristic in the returned report.
    """
    radii = np.asarray(list(probe_radii), dtype=float)
    if len(radii) < 2 or np.any(np.diff(radii) <= 0):
        raise ValueError("probe radii must be strictly increasing")
    if radii[0] < math.e * (1.0 - 1e-12):
        raise ValueError("probe radii must be at least e")
    d = spec.dimension
    if d == 1:
        dirs = np.array([[1.0], [-1.0]])
    else:
        rng = np.random.default_rng(314159)
        raw = rng.normal(size=(32, d))
        dirs = raw / np.linalg.norm(raw, axis=1, keepdims=True)
        dirs = np.vstack([dirs, np.eye(d)])
    ratios = []
    for r in radii:
        vals = eval_symbol(spec, r * dirs).real
        ratios.append(float(np.min(vals)) / math.log(r))
    ratios = np.array(ratios)
    growth = ratios[1:] / np.maximum(ratios[:-1], 1e-300)
    if np.all(growth >= 1.2):
        verdict = "diverges"
    elif np.all(growth <= 0.8):
        verdict = "fails"
    else:
        verdict = "inconclusive"
    return {
        "radii": radii,
        "ratios": ratios,
        "verdict": verdict,
        "heuristic": True,
    }


def symbol_zero_set(spec: SymbolSpec, grid) -> dict:
    """Lattice points where |psi| falls below a scale-relative threshold.

    The zero set of an admissible symbol should be {0}; any other hit raises
    a NonLiouvilleWarning and is flagged for downstream reports.
    """
    pts, _ = _as_batch(grid, spec.dimension)
    radii = np.linalg.norm(pts, axis=1)
    if not np.any(radii == 0.0):
        raise ValueError("frequency lattice must contain the origin")
    vals = eval_symbol(spec, pts)
    tol = 1e-10 * (1.0 + float(np.max(np.abs(vals))))
    mask = np.abs(vals) <= tol
    zeros = pts[mask]
    nontrivial = int(np.sum(mask & (radii > 0.0)))
    if nontrivial:
        warnings.warn(
            f"symbol vanishes at {nontrivial} nonzero lattice points",
            NonLiouvilleWarning,
            stacklevel=2,
        )
    return {
        "zeros": zeros,
        "tolerance": tol,
        "liouville_ok": nontrivial == 0,
    }
