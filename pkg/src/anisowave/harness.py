"""Measurement harness: decay-exponent fits, space-time norm sweeps, energy bounds.

These experiments quantify the dispersive statements that are measurable
at desk scale: the sup-norm decay exponent of frequency-localized
charge-free data (1/2 for fully anisotropic materials versus 1 for the
isotropic control), the boundedness of dyadic space-time norm ratios for
admissible Lebesgue pairs, and the exponential-in-time energy bound for
time-dependent coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .materials import DiagonalMaterial
from .spectral import (
    ConstantPropagator,
    FieldState,
    GridSpec,
    SpectralError,
    annulus_resolved,
    divergence_charges,
    energy,
    lp_multiplier,
    make_initial_data,
    propagate_variable,
)


class HarnessError(ValueError):
    pass


def derivative_loss(p: float, q: float) -> float:
    """Scaling loss 3 (1/2 - 1/q) - 1/p for the space-time pair (p, q)."""
    inv_q = 0.0 if np.isinf(q) else 1.0 / q
    inv_p = 0.0 if np.isinf(p) else 1.0 / p
    return 3.0 * (0.5 - inv_q) - inv_p


def is_admissible(p: float, q: float) -> bool:
    """Two-dimensional wave admissibility 2/p + 1/q <= 1/2."""
    inv_q = 0.0 if np.isinf(q) else 1.0 / q
    inv_p = 0.0 if np.isinf(p) else 1.0 / p
    return 2.0 * inv_p + inv_q <= 0.5 + 1e-12


def _sup_norm(values: np.ndarray) -> float:
    return float(np.sqrt(np.sum(values ** 2, axis=0)).max())


def _lq_norm(values: np.ndarray, grid: GridSpec, q: float) -> float:
    mag = np.sqrt(np.sum(values ** 2, axis=0))
    if np.isinf(q):
        return float(mag.max())
    return float((np.sum(mag ** q) * grid.cell_volume) ** (1.0 / q))


def _lp_time(norms: np.ndarray, times: np.ndarray, p: float) -> float:
    if np.isinf(p):
        return float(norms.max())
    return float(np.trapezoid(norms ** p, times) ** (1.0 / p))


@dataclass
class DecayFitResult:
    times: np.ndarray
    sup_norms: np.ndarray
    exponent: float
    residual: float
    window: tuple[float, float]
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "exponent": float(self.exponent),
            "residual": float(self.residual),
            "window": [float(self.window[0]), float(self.window[1])],
            "times": [float(t) for t in self.times],
            "sup_norms": [float(v) for v in self.sup_norms],
            "meta": self.meta,
        }


def conical_axes(m: DiagonalMaterial) -> np.ndarray:
    """Axis directions of the conical characteristic points (unit vectors).

    Falls back to a fixed direction pair when the material has no
    separated ratios (there are no special directions to probe then).
    """
    from .fresnel import singular_points

    if m.is_fully_anisotropic():
        pts = singular_points(m).points[:2]
        return pts / np.linalg.norm(pts, axis=1, keepdims=True)
    return np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])


def decay_fit(
    m: DiagonalMaterial,
    grid: GridSpec,
    lam: float = 1.0,
    seed: int = 0,
    n_times: int = 36,
    t_min: float = 2.0,
    data: str = "conical-packet",
    focus_dirs: np.ndarray | None = None,
    focus_width: float = 0.25,
) -> DecayFitResult:
    """Fit the sup-norm decay exponent of band-localized charge-free data.

    The default data is the band kernel of a point source focused on the
    conical axis directions, where the slow sup-norm channel lives; a
    control material should be probed with the *same* directions (pass
    ``focus_dirs``).  The fit is log ||u(t)||_inf against log(1 + t) by
    least squares over [t_min, 0.4 L / v_max]; the upper end keeps the
    light cone inside the periodic box.  ``data='gradient-charge'``
    measures the stationary control instead (exponent 0).
    """
    v_max = m.v_max
    t_max = grid.wraparound_time(v_max)
    if (1.0 + t_max) / (1.0 + t_min) < 10.0:
        raise HarnessError(
            f"insufficient decay window: [{t_min}, {t_max:.2f}] spans less than one decade"
        )
    params = {"lam": lam}
    if data == "conical-packet":
        params["dirs"] = conical_axes(m) if focus_dirs is None else focus_dirs
        params["width2"] = focus_width
    u0 = make_initial_data(data, m, grid, seed=seed, **params)
    charges = divergence_charges(u0, m)
    if data != "gradient-charge":
        rel = charges.max_abs() / max(np.max(np.abs(u0.values)), 1e-300)
        if rel > 1e-8:
            raise HarnessError(f"initial data is not charge free (relative {rel:.2e})")
    l1 = float(np.sum(np.sqrt(np.sum(u0.values ** 2, axis=0))) * grid.cell_volume)
    u0 = u0.copy(values=u0.values / l1)

    kx, ky, kz = grid.k_grids()
    band = lp_multiplier(np.sqrt(kx ** 2 + ky ** 2 + kz ** 2), lam) > 1e-13
    mask = band if data != "gradient-charge" else None
    prop = ConstantPropagator(m, grid, mask)

    times = np.geomspace(t_min, t_max, n_times)
    sups: list[float] = []
    prop.snapshots(u0, times, lambda t, state: sups.append(_sup_norm(state.values)))
    sups_arr = np.array(sups)

    x = np.log1p(times)
    y = np.log(sups_arr)
    coef = np.polynomial.polynomial.polyfit(x, y, 1)
    fit = coef[0] + coef[1] * x
    resid = float(np.sqrt(np.mean((y - fit) ** 2)))
    return DecayFitResult(
        times,
        sups_arr,
        float(-coef[1]),
        resid,
        (t_min, t_max),
        {"material": {"eps": m.eps, "mu": m.mu}, "lam": lam, "seed": seed, "data": data},
    )


@dataclass
class StrichartzProbe:
    p: float
    q: float
    loss: float
    lams: list[float]
    ratios: list[float]
    admissible: bool
    skipped: list[float] = field(default_factory=list)

    @property
    def spread(self) -> float:
        return max(self.ratios) / min(self.ratios)

    def to_dict(self) -> dict:
        return {
            "p": self.p if not np.isinf(self.p) else "inf",
            "q": self.q if not np.isinf(self.q) else "inf",
            "loss": float(self.loss),
            "lams": [float(l) for l in self.lams],
            "ratios": [float(r) for r in self.ratios],
            "admissible": bool(self.admissible),
            "skipped": [float(l) for l in self.skipped],
            "spread": float(self.spread) if self.ratios else None,
        }


def strichartz_ratio(
    m: DiagonalMaterial,
    p: float,
    q: float,
    lams,
    grid: GridSpec,
    seed: int = 0,
    t_window: float = 1.0,
    snapshots_per_unit: int = 64,
) -> StrichartzProbe:
    """Per-band ratio ||<D'>^{-loss} u||_{L^p_t L^q_x} / ||u0||_{L^2}.

    Data is charge-free white noise localized to each dyadic band; the
    early transient (time scale 1/lam) is sampled densely on top of the
    uniform snapshot rate so the time quadrature resolves the initial
    spread.  Bands whose support exceeds the Nyquist ball are skipped
    with a warning entry.
    """
    loss = derivative_loss(p, q)
    probe = StrichartzProbe(p, q, loss, [], [], is_admissible(p, q))
    kxg, kyg, kzg = grid.k_grids()
    kabs = np.sqrt(kxg ** 2 + kyg ** 2 + kzg ** 2)
    weight = (1.0 + kabs ** 2) ** (-loss / 2.0)
    for lam in lams:
        if not annulus_resolved(grid, lam):
            probe.skipped.append(float(lam))
            continue
        u0 = make_initial_data("lp-annulus", m, grid, seed=seed, lam=lam)
        l2 = float(np.sqrt(np.sum(u0.values ** 2) * grid.cell_volume))
        u0 = u0.copy(values=u0.values / l2)
        mask = lp_multiplier(kabs, lam) > 1e-13
        prop = ConstantPropagator(m, grid, mask)

        coarse = np.linspace(0.0, t_window, int(snapshots_per_unit * t_window) + 1)
        fine = np.linspace(0.0, min(4.0 / lam, t_window), 33)
        times = np.unique(np.concatenate([coarse, fine]))
        norms: list[float] = []

        def observe(t, state):
            spec = np.fft.rfftn(state.values, axes=(-3, -2, -1))
            spec *= weight
            vals = np.fft.irfftn(spec, s=grid.ns, axes=(-3, -2, -1))
            norms.append(_lq_norm(vals, grid, q))

        prop.snapshots(u0, times, observe)
        probe.lams.append(float(lam))
        probe.ratios.append(_lp_time(np.array(norms), times, p))
    return probe


@dataclass
class GronwallReport:
    times: np.ndarray
    energies: np.ndarray
    modulus_integral: np.ndarray
    c_allowed: float
    c_empirical: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "c_allowed": float(self.c_allowed),
            "c_empirical": float(self.c_empirical),
            "pass": bool(self.passed),
            "energy_ratio_final": float(self.energies[-1] / self.energies[0]),
        }


def gronwall_check(
    material_fn,
    deriv_sup_fn,
    u0: FieldState,
    tspan: tuple[float, float],
    dt: float,
    band: tuple[float, float],
    snapshot_every: int = 10,
) -> GronwallReport:
    """Verify the energy bound E(t) <= E(0) exp(C int ||d/dt (eps, mu)||).

    ``material_fn(t)`` returns spatially constant (eps, mu) diagonals and
    ``deriv_sup_fn(t)`` the sup norm of their time derivative.  The
    allowed constant is 1/lambda_band: the energy density obeys
    |d/dt E| <= ||d/dt(eps, mu)|| / lambda * E pointwise.  The check is
    one sided; no sharpness is claimed.
    """
    t0, t1 = tspan
    final, traj = propagate_variable(
        material_fn, u0, tspan, dt, band=band, snapshot_every=snapshot_every,
        ellipticity_check_every=snapshot_every,
    )
    states = [(t0, u0)] + traj
    if states[-1][0] < t1:
        states.append((t1, final))
    times = np.array([t for t, _ in states])
    energies = []
    for t, st in states:
        eps, mu = material_fn(t)
        mat = DiagonalMaterial(tuple(np.atleast_1d(eps) * np.ones(3)), tuple(np.atleast_1d(mu) * np.ones(3)), band=band)
        energies.append(energy(st, mat))
    energies = np.array(energies)

    fine = np.linspace(t0, t1, 40 * len(times))
    mod = np.array([deriv_sup_fn(t) for t in fine])
    cumulative = np.concatenate([[0.0], np.cumsum(0.5 * (mod[1:] + mod[:-1]) * np.diff(fine))])
    integral = np.interp(times, fine, cumulative)

    c_allowed = 1.0 / band[0]
    ratios = np.log(energies / energies[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        c_emp = np.where(integral > 1e-12, ratios / np.where(integral > 1e-12, integral, 1.0), -np.inf)
    c_empirical = float(np.max(c_emp))
    return GronwallReport(times, energies, integral, c_allowed, c_empirical, c_empirical <= c_allowed)
