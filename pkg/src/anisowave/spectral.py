"""Pseudo-spectral Maxwell evolution and frequency-space tooling on a periodic box.

The constant-coefficient propagator is exact per Fourier mode: the
symbol is conjugated to a real symmetric matrix in the material inner
product and exponentiated through its spectral decomposition, so the
evolution is unitary in that inner product and exactly time reversible.
Variable coefficients evolve the divergence-form variables (D, B) with
classical RK4 and spectral curls.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .materials import DiagonalMaterial, MaterialError, MaterialField

DEFAULT_C_CFL = 0.5


class SpectralError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Periodic box discretization.

    ``lengths`` are the box sides, ``ns`` the per-axis point counts
    (powers of two), ``dt``/``tmax`` default stepping data for
    variable-coefficient runs.
    """

    lengths: tuple[float, float, float]
    ns: tuple[int, int, int]
    dt: float = 0.0
    tmax: float = 0.0

    def __post_init__(self):
        for n in self.ns:
            if n < 2 or (n & (n - 1)) != 0:
                raise SpectralError(f"grid sizes must be powers of two, got {self.ns}")
        if any(l <= 0 for l in self.lengths):
            raise SpectralError("box lengths must be positive")

    @classmethod
    def cubic(cls, length: float, n: int, dt: float = 0.0, tmax: float = 0.0) -> "GridSpec":
        return cls((length,) * 3, (n,) * 3, dt, tmax)

    @property
    def dx_min(self) -> float:
        return min(l / n for l, n in zip(self.lengths, self.ns))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.lengths) / np.prod(self.ns))

    def axes(self) -> tuple[np.ndarray, ...]:
        return tuple(
            np.arange(n) * (l / n) for l, n in zip(self.lengths, self.ns)
        )

    def wavenumbers(self, real_last: bool = True) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Angular wavenumber arrays (kx, ky, kz), rfft layout on the last axis."""
        l1, l2, l3 = self.lengths
        n1, n2, n3 = self.ns
        kx = 2.0 * np.pi * np.fft.fftfreq(n1, l1 / n1)
        ky = 2.0 * np.pi * np.fft.fftfreq(n2, l2 / n2)
        kzf = np.fft.rfftfreq if real_last else np.fft.fftfreq
        kz = 2.0 * np.pi * kzf(n3, l3 / n3)
        return kx, ky, kz

    def deriv_wavenumbers(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Wavenumbers for odd-order derivatives: Nyquist entries zeroed.

        An aliased Nyquist cosine has a sine derivative that vanishes on
        the grid, so the consistent first-derivative multiplier there is
        zero; this keeps div/grad/curl compositions exact for arbitrary
        real grid data.
        """
        kx, ky, kz = (a.copy() for a in self.wavenumbers())
        kx[self.ns[0] // 2] = 0.0
        ky[self.ns[1] // 2] = 0.0
        kz[-1] = 0.0
        return kx, ky, kz

    def k_grids(self, deriv: bool = False) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        kx, ky, kz = self.deriv_wavenumbers() if deriv else self.wavenumbers()
        return np.meshgrid(kx, ky, kz, indexing="ij")

    def resolved_mask(self) -> np.ndarray:
        """Modes below every Nyquist plane (the band the propagator evolves)."""
        n1, n2, n3 = self.ns
        mx = np.ones(n1, dtype=bool)
        mx[n1 // 2] = False
        my = np.ones(n2, dtype=bool)
        my[n2 // 2] = False
        mz = np.ones(n3 // 2 + 1, dtype=bool)
        mz[-1] = False
        return mx[:, None, None] & my[None, :, None] & mz[None, None, :]

    @property
    def k_nyquist(self) -> float:
        return float(min(np.pi * n / l for l, n in zip(self.lengths, self.ns)))

    @property
    def k_radius(self) -> float:
        """Largest |k| on the grid (the spectral corner radius)."""
        return float(np.sqrt(sum((np.pi * n / l) ** 2 for l, n in zip(self.lengths, self.ns))))

    def check_cfl(self, dt: float, v_max: float, c_cfl: float = DEFAULT_C_CFL) -> None:
        bound = c_cfl * self.dx_min / v_max
        if dt > bound:
            raise SpectralError(f"CFL violation: dt={dt} exceeds {bound:.3e}")

    def wraparound_time(self, v_max: float) -> float:
        """Largest time for which decay measurements are not wrapped, 0.4 L / v."""
        return 0.4 * min(self.lengths) / v_max


@dataclass
class FieldState:
    """Six real scalar fields on the grid, tagged (E, H) or (D, B)."""

    values: np.ndarray  # (6, n1, n2, n3)
    grid: GridSpec
    kind: str = "EH"
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (6, *self.grid.ns):
            raise SpectralError(f"field shape {self.values.shape} does not match grid {self.grid.ns}")
        if self.kind not in ("EH", "DB"):
            raise SpectralError("kind must be 'EH' or 'DB'")
        if not np.all(np.isfinite(self.values)):
            raise SpectralError("non-finite field values")

    @property
    def first(self) -> np.ndarray:
        return self.values[:3]

    @property
    def second(self) -> np.ndarray:
        return self.values[3:]

    def copy(self, **kw) -> "FieldState":
        d = {"values": self.values.copy(), "grid": self.grid, "kind": self.kind, "time": self.time}
        d.update(kw)
        return FieldState(**d)


@dataclass
class ChargePair:
    rho_e: np.ndarray
    rho_m: np.ndarray

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(self.rho_e)), np.max(np.abs(self.rho_m))))

    def require_zero_mean(self, tol: float = 1e-10) -> None:
        scale = max(self.max_abs(), 1.0)
        if abs(self.rho_e.mean()) > tol * scale or abs(self.rho_m.mean()) > tol * scale:
            raise SpectralError("charges must have zero mean on the torus")


def l2_norm(values: np.ndarray, grid: GridSpec) -> float:
    return float(np.sqrt(np.sum(values ** 2) * grid.cell_volume))


def energy(u: FieldState, m: DiagonalMaterial) -> float:
    """Material inner product <u, diag(eps, mu) u> (conserved exactly)."""
    e, mu = m.eps_arr, m.mu_arr
    if u.kind == "EH":
        dens = np.einsum("i,ixyz->xyz", e, u.first ** 2) + np.einsum("i,ixyz->xyz", mu, u.second ** 2)
    else:
        dens = np.einsum("i,ixyz->xyz", 1.0 / e, u.first ** 2) + np.einsum(
            "i,ixyz->xyz", 1.0 / mu, u.second ** 2
        )
    return float(dens.sum() * u.grid.cell_volume)


# ---------------------------------------------------------------------------
# Littlewood-Paley projectors


def smooth_step(x: np.ndarray) -> np.ndarray:
    """C-infinity join rising from 0 at x<=0 to 1 at x>=1 (exp(-1/x) type)."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(x > 0, np.exp(-1.0 / np.maximum(x, 1e-300)), 0.0)
        b = np.where(1 - x > 0, np.exp(-1.0 / np.maximum(1 - x, 1e-300)), 0.0)
    return a / (a + b)


def lp_chi(r: np.ndarray) -> np.ndarray:
    """Radially decreasing cutoff: 1 on [0, 1], 0 on [2, inf), smooth join."""
    r = np.abs(np.asarray(r, dtype=float))
    return smooth_step(2.0 - r)


def lp_multiplier(r: np.ndarray, lam: float) -> np.ndarray:
    """Dyadic band multiplier chi(r / 2 lam) - chi(r / lam).

    Nonnegative, equal to 1 at r = 2 lam, supported in (lam, 4 lam); the
    family telescopes with the low-pass chi(r) to an exact partition of
    unity.
    """
    return lp_chi(r / (2.0 * lam)) - lp_chi(r / lam)


def lp_project(values: np.ndarray, lam, grid: GridSpec, mode: str = "spatial", dt: float | None = None):
    """Apply the dyadic band projector at lam (or the low pass for lam='low').

    ``values`` holds real fields with the three spatial axes last.  For
    ``mode='spacetime'`` a leading time axis is transformed as well (its
    sample spacing ``dt`` sets the frequency scale).
    """
    values = np.asarray(values, dtype=float)
    if mode not in ("spatial", "spacetime"):
        raise SpectralError("mode must be 'spatial' or 'spacetime'")
    if mode == "spacetime":
        if dt is None or values.ndim < 4:
            raise SpectralError("spacetime mode needs a time axis and dt")
        axes = tuple(range(values.ndim - 4, values.ndim))
        omega = 2.0 * np.pi * np.fft.fftfreq(values.shape[-4], dt)
        kx, ky, kz = grid.wavenumbers()
        r = np.sqrt(
            omega[:, None, None, None] ** 2
            + kx[None, :, None, None] ** 2
            + ky[None, None, :, None] ** 2
            + kz[None, None, None, :] ** 2
        )
    else:
        axes = tuple(range(values.ndim - 3, values.ndim))
        kx, ky, kz = grid.wavenumbers()
        r = np.sqrt(kx[:, None, None] ** 2 + ky[None, :, None] ** 2 + kz[None, None, :] ** 2)

    if lam == "low":
        mult = lp_chi(r)
    else:
        lam = float(lam)
        if lam <= 0 or lam >= grid.k_radius:
            raise SpectralError(f"dyadic annulus at lam={lam} carries no grid frequencies")
        mult = lp_multiplier(r, lam)
    spec = np.fft.rfftn(values, axes=axes)
    spec *= mult
    return np.fft.irfftn(spec, s=values.shape[values.ndim - len(axes):], axes=axes)


def lp_bands(grid: GridSpec) -> list[float]:
    """Dyadic frequencies 1, 2, 4, ... up to the grid spectral radius."""
    out = []
    lam = 1.0
    while lam < grid.k_radius:
        out.append(lam)
        lam *= 2.0
    return out


def annulus_resolved(grid: GridSpec, lam: float) -> bool:
    """Whether the full band support (lam, 4 lam) sits inside the Nyquist ball."""
    return 4.0 * lam <= grid.k_nyquist


def lp_partition_defect(values: np.ndarray, grid: GridSpec) -> float:
    """Relative defect of S_low + sum of dyadic bands against the identity.

    The top band reaches beyond the grid spectral radius, so the
    telescoping sum is exact up to rounding.
    """
    total = lp_project(values, "low", grid)
    for lam in lp_bands(grid):
        total = total + lp_project(values, lam, grid)
    return float(np.max(np.abs(total - values)) / max(np.max(np.abs(values)), 1e-300))


# ---------------------------------------------------------------------------
# Exact constant-coefficient propagator


def _curl_entries(kx, ky, kz):
    """Entries of the antisymmetric curl symbol C(k) on broadcast grids."""
    zero = np.zeros(np.broadcast_shapes(kx.shape, ky.shape, kz.shape))
    return [
        [zero, -kz + zero, ky + zero],
        [kz + zero, zero, -kx + zero],
        [-ky + zero, kx + zero, zero],
    ]


class ConstantPropagator:
    """Exact per-mode evolution for constant diagonal materials.

    The (E, H) symbol is conjugated with diag(sqrt(eps), sqrt(mu)) to the
    real symmetric matrix [[0, B], [B^T, 0]] per mode, whose eigenbasis
    is computed once (optionally only on a mode mask) and reused for all
    evaluation times.
    """

    def __init__(self, m: DiagonalMaterial, grid: GridSpec, mask: np.ndarray | None = None):
        self.m = m
        self.grid = grid
        kxg, kyg, kzg = grid.k_grids()
        if mask is None:
            mask = np.ones(kxg.shape, dtype=bool)
        self.mask = mask & grid.resolved_mask()
        kx, ky, kz = kxg[self.mask], kyg[self.mask], kzg[self.mask]
        n = kx.size
        se = np.sqrt(m.eps_arr)
        smu = np.sqrt(m.mu_arr)
        c = _curl_entries(kx, ky, kz)
        h = np.zeros((n, 6, 6))
        for i in range(3):
            for j in range(3):
                h[:, i, 3 + j] = c[i][j] / (se[i] * smu[j])
                h[:, 3 + j, i] = h[:, i, 3 + j]
        self.freqs, self.basis = np.linalg.eigh(h)
        self._scale = np.concatenate([se, smu])

    def _to_modes(self, u: FieldState) -> np.ndarray:
        w = u.values * self._scale[:, None, None, None]
        spec = np.fft.rfftn(w, axes=(-3, -2, -1))
        return np.moveaxis(spec[:, self.mask], 0, -1)  # (n_modes, 6)

    def _from_modes(self, coeffs: np.ndarray, template: FieldState, t: float) -> FieldState:
        spec = np.zeros((6, *self.mask.shape), dtype=complex)
        spec[:, self.mask] = np.moveaxis(coeffs, -1, 0)
        w = np.fft.irfftn(spec, s=self.grid.ns, axes=(-3, -2, -1))
        vals = w / self._scale[:, None, None, None]
        return FieldState(vals, self.grid, "EH", t)

    def propagate(self, u: FieldState, t: float) -> FieldState:
        if u.kind != "EH":
            raise SpectralError("constant propagator expects an (E, H) state")
        coeffs = self._to_modes(u)
        amps = np.einsum("mji,mj->mi", self.basis, coeffs)
        amps = amps * np.exp(1j * self.freqs * t)
        coeffs = np.einsum("mij,mj->mi", self.basis, amps)
        return self._from_modes(coeffs, u, u.time + t)

    def snapshots(self, u: FieldState, times, observer) -> None:
        """Call ``observer(t, state)`` at each time, reusing the eigenbasis."""
        coeffs = self._to_modes(u)
        amps0 = np.einsum("mji,mj->mi", self.basis, coeffs)
        for t in times:
            amps = amps0 * np.exp(1j * self.freqs * (t - u.time))
            coeffs_t = np.einsum("mij,mj->mi", self.basis, amps)
            observer(t, self._from_modes(coeffs_t, u, t))


def propagate_const(m: DiagonalMaterial, u0: FieldState, t: float) -> FieldState:
    return ConstantPropagator(m, u0.grid).propagate(u0, t)


def mode_eigensystem(m: DiagonalMaterial, xi_spatial):
    """Eigenfrequencies (+-w1, +-w2, 0, 0) and (E, H) polarization vectors.

    The nonzero frequencies are roots of the dispersion quartic at this
    spatial frequency; vectors are orthonormal in the material inner
    product.
    """
    xi = np.asarray(xi_spatial, dtype=float)
    if np.allclose(xi, 0.0):
        raise SpectralError("mode eigensystem undefined at xi = 0")
    se = np.sqrt(m.eps_arr)
    smu = np.sqrt(m.mu_arr)
    c = _curl_entries(*[np.asarray(v) for v in xi])
    h = np.zeros((6, 6))
    for i in range(3):
        for j in range(3):
            h[i, 3 + j] = c[i][j] / (se[i] * smu[j])
            h[3 + j, i] = h[i, 3 + j]
    w, v = np.linalg.eigh(h)
    vectors = v / np.concatenate([se, smu])[:, None]
    return w, vectors


# ---------------------------------------------------------------------------
# Charges, potentials, stationary/dispersive split


def _spectral_div(w: np.ndarray, grid: GridSpec) -> np.ndarray:
    kx, ky, kz = grid.k_grids(deriv=True)
    spec = np.fft.rfftn(w, axes=(-3, -2, -1))
    div = 1j * (kx * spec[0] + ky * spec[1] + kz * spec[2])
    return np.fft.irfftn(div, s=grid.ns)


def _spectral_grad(phi_spec: np.ndarray, grid: GridSpec) -> np.ndarray:
    kx, ky, kz = grid.k_grids(deriv=True)
    out = np.empty((3, *grid.ns))
    for i, k in enumerate((kx, ky, kz)):
        out[i] = np.fft.irfftn(1j * k * phi_spec, s=grid.ns)
    return out


def divergence_charges(u: FieldState, m: DiagonalMaterial) -> ChargePair:
    """Spectral (div(eps E), div(mu H)); for a (D, B) state simply (div D, div B)."""
    if u.kind == "EH":
        d = u.first * m.eps_arr[:, None, None, None]
        b = u.second * m.mu_arr[:, None, None, None]
    else:
        d, b = u.first, u.second
    return ChargePair(_spectral_div(d, u.grid), _spectral_div(b, u.grid))


def solve_charges(m: DiagonalMaterial, rho: ChargePair, grid: GridSpec):
    """Potentials of div(eps grad phi1) = rho_e, div(mu grad phi2) = rho_m.

    Returns ``(phi1, phi2, u_stat)`` where the stationary state
    u_stat = (grad phi1, grad phi2) carries exactly the given charges and
    is a fixed point of the constant-coefficient evolution.
    """
    rho.require_zero_mean()
    kx, ky, kz = grid.k_grids(deriv=True)
    pots = []
    grads = []
    for dens, diag in ((rho.rho_e, m.eps_arr), (rho.rho_m, m.mu_arr)):
        quad = diag[0] * kx ** 2 + diag[1] * ky ** 2 + diag[2] * kz ** 2
        spec = np.fft.rfftn(dens)
        with np.errstate(divide="ignore", invalid="ignore"):
            phi_spec = np.where(quad > 0, -spec / np.where(quad > 0, quad, 1.0), 0.0)
        pots.append(np.fft.irfftn(phi_spec, s=grid.ns))
        grads.append(_spectral_grad(phi_spec, grid))
    u_stat = FieldState(np.concatenate(grads, axis=0), grid, "EH", 0.0)
    return pots[0], pots[1], u_stat


def split_stationary_dispersive(m: DiagonalMaterial, u0: FieldState, rho: ChargePair | None = None):
    """Split u0 = u_stat + u_disp with charge-free dispersive part.

    If ``rho`` is supplied it must match the divergence charges of u0 to
    discretization tolerance.
    """
    own = divergence_charges(u0, m)
    if rho is not None:
        scale = max(own.max_abs(), rho.max_abs(), 1.0)
        if (
            np.max(np.abs(own.rho_e - rho.rho_e)) > 1e-8 * scale
            or np.max(np.abs(own.rho_m - rho.rho_m)) > 1e-8 * scale
        ):
            raise SpectralError("provided charges are inconsistent with the state")
        own = rho
    _, _, u_stat = solve_charges(m, own, u0.grid)
    u_disp = u0.copy(values=u0.values - u_stat.values)
    return u_stat, u_disp


# ---------------------------------------------------------------------------
# Variable-coefficient evolution (divergence-form variables)


def _inverse_apply(mat, f: np.ndarray) -> np.ndarray:
    """Apply mat(x)^{-1} pointwise to a (3, n1, n2, n3) field."""
    mat = np.asarray(mat, dtype=float)
    if mat.shape == (3,):
        return f / mat[:, None, None, None]
    if mat.shape == (3, 3):
        return np.einsum("ij,jxyz->ixyz", np.linalg.inv(mat), f)
    inv = np.linalg.inv(mat)  # grid + (3, 3)
    return np.einsum("xyzij,jxyz->ixyz", inv, f)


def _material_at(material, t: float):
    if callable(material):
        return material(t)
    if isinstance(material, MaterialField):
        return material.eps, material.mu
    if isinstance(material, DiagonalMaterial):
        return material.eps_arr, material.mu_arr
    raise SpectralError("unsupported material description")


def _min_eig(mat) -> float:
    mat = np.asarray(mat, dtype=float)
    if mat.shape == (3,):
        return float(mat.min())
    if mat.shape == (3, 3):
        return float(np.linalg.eigvalsh(mat).min())
    return float(np.linalg.eigvalsh(mat.reshape(-1, 3, 3)).min())


def _curl(f: np.ndarray, grid: GridSpec) -> np.ndarray:
    kx, ky, kz = grid.k_grids(deriv=True)
    spec = np.fft.rfftn(f, axes=(-3, -2, -1))
    out = np.empty_like(spec)
    out[0] = 1j * (ky * spec[2] - kz * spec[1])
    out[1] = 1j * (kz * spec[0] - kx * spec[2])
    out[2] = 1j * (kx * spec[1] - ky * spec[0])
    return np.fft.irfftn(out, s=grid.ns, axes=(-3, -2, -1))


def propagate_variable(
    material,
    u0: FieldState,
    tspan: tuple[float, float],
    dt: float,
    band: tuple[float, float] | None = None,
    c_cfl: float = DEFAULT_C_CFL,
    snapshot_every: int = 0,
    ellipticity_check_every: int = 0,
):
    """RK4 evolution of d/dt (D, B) = (curl H, -curl E) with E = eps^{-1} D.

    ``material`` is a :class:`MaterialField`, a constant material, or a
    callable ``t -> (eps, mu)`` (entries of shape (3,), (3, 3) or
    grid + (3, 3)).  Curls are spectral, products pointwise.  Returns
    ``(final_state, trajectory)`` where trajectory holds the optional
    snapshots as (time, FieldState) pairs.
    """
    if u0.kind != "DB":
        raise SpectralError("variable-coefficient evolution expects a (D, B) state")
    grid = u0.grid
    t0, t1 = tspan
    if band is None:
        band = material.band if hasattr(material, "band") else (1.0, 1.0)
    v_max = 1.0 / band[0]
    grid.check_cfl(dt, v_max, c_cfl)
    n_steps = int(round((t1 - t0) / dt))
    if abs(n_steps * dt - (t1 - t0)) > 1e-9 * max(1.0, abs(t1 - t0)):
        raise SpectralError("tspan must be an integer number of steps")

    def rhs(t, y):
        eps, mu = _material_at(material, t)
        e_fld = _inverse_apply(eps, y[:3])
        h_fld = _inverse_apply(mu, y[3:])
        out = np.empty_like(y)
        out[:3] = _curl(h_fld, grid)
        out[3:] = -_curl(e_fld, grid)
        return out

    y = u0.values.copy()
    t = t0
    traj: list[tuple[float, FieldState]] = []
    for k in range(n_steps):
        if ellipticity_check_every and k % ellipticity_check_every == 0:
            eps, mu = _material_at(material, t)
            if _min_eig(eps) < band[0] or _min_eig(mu) < band[0]:
                raise SpectralError(f"ellipticity failure at t={t:.6f}")
        k1 = rhs(t, y)
        k2 = rhs(t + dt / 2, y + dt / 2 * k1)
        k3 = rhs(t + dt / 2, y + dt / 2 * k2)
        k4 = rhs(t + dt, y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t0 + (k + 1) * dt
        if snapshot_every and (k + 1) % snapshot_every == 0:
            traj.append((t, FieldState(y.copy(), grid, "DB", t)))
    return FieldState(y, grid, "DB", t), traj


# ---------------------------------------------------------------------------
# Initial-data recipes


def project_charge_free(u: FieldState, m: DiagonalMaterial) -> FieldState:
    """Remove the charged (gradient) part per mode: xi . (eps E)^ becomes 0."""
    kx, ky, kz = grid_k = u.grid.k_grids(deriv=True)
    spec = np.fft.rfftn(u.values, axes=(-3, -2, -1))
    for block, diag in ((slice(0, 3), m.eps_arr), (slice(3, 6), m.mu_arr)):
        quad = diag[0] * kx ** 2 + diag[1] * ky ** 2 + diag[2] * kz ** 2
        sub = spec[block]
        div = sum(grid_k[i] * diag[i] * sub[i] for i in range(3))
        with np.errstate(invalid="ignore", divide="ignore"):
            coef = np.where(quad > 0, div / np.where(quad > 0, quad, 1.0), 0.0)
        for i in range(3):
            sub[i] -= coef * grid_k[i]
    vals = np.fft.irfftn(spec, s=u.grid.ns, axes=(-3, -2, -1))
    return FieldState(vals, u.grid, u.kind, u.time)


def _seeded_noise(grid: GridSpec, seed: int, n_comp: int = 6) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n_comp, *grid.ns))


def make_initial_data(name: str, m: DiagonalMaterial, grid: GridSpec, seed: int = 0, **params) -> FieldState:
    """Named (E, H) initial states.

    planewave        cosine mode along x with (E, H) = (y, z) polarization;
                     params: k (integer wavenumber index), amplitude.
    gaussian-packet  modulated Gaussian with fixed polarization, made
                     charge free; params: k0 (3-vector), width, center.
    lp-annulus       seeded white noise band-limited to the dyadic band at
                     ``lam`` and projected charge free.
    gradient-charge  stationary gradient state carrying a seeded smooth
                     charge; params: lam (charge band).
    """
    axes = grid.axes()
    if name == "planewave":
        k = int(params.get("k", 1))
        amp = float(params.get("amplitude", 1.0))
        phase = np.cos(2.0 * np.pi * k * axes[0] / grid.lengths[0])
        vals = np.zeros((6, *grid.ns))
        vals[1] = amp * phase[:, None, None]
        vals[5] = amp * phase[:, None, None]
        return FieldState(vals, grid, "EH")
    if name == "gaussian-packet":
        k0 = np.asarray(params.get("k0", (2.0, 0.0, 0.0)), dtype=float)
        width = float(params.get("width", min(grid.lengths) / 8.0))
        center = np.asarray(params.get("center", [l / 2 for l in grid.lengths]))
        xg = np.meshgrid(*axes, indexing="ij")
        r2 = sum((xg[i] - center[i]) ** 2 for i in range(3))
        osc = np.cos(sum(k0[i] * xg[i] for i in range(3)))
        bump = np.exp(-r2 / (2.0 * width ** 2)) * osc
        vals = np.zeros((6, *grid.ns))
        vals[1] = bump
        vals[5] = bump
        u = FieldState(vals, grid, "EH")
        return project_charge_free(u, m) if params.get("charge_free", True) else u
    if name == "lp-annulus":
        # band kernel of a point source: the packet that saturates the
        # L^1 -> L^infty dispersive estimates (box-filling noise does not
        # decay in sup norm at all)
        lam = float(params.get("lam", 1.0))
        rng = np.random.default_rng(seed)
        weights = rng.standard_normal(6)
        vals = np.zeros((6, *grid.ns))
        center = tuple(n // 2 for n in grid.ns)
        vals[(slice(None), *center)] = weights
        vals = lp_project(vals, lam, grid)
        u = FieldState(vals, grid, "EH")
        return project_charge_free(u, m)  # per-mode projection, band support kept
    if name == "conical-packet":
        # band kernel focused on the given axis directions; used to probe
        # the slow-decay channel of conical characteristic points, where
        # the sharp sup-norm rate lives
        lam = float(params.get("lam", 1.0))
        width2 = float(params.get("width2", 0.25))
        dirs = np.atleast_2d(np.asarray(params["dirs"], dtype=float))
        u = make_initial_data("lp-annulus", m, grid, seed=seed, lam=lam)
        kx, ky, kz = grid.k_grids()
        kabs = np.sqrt(kx ** 2 + ky ** 2 + kz ** 2)
        kabs[kabs == 0] = 1.0
        window = np.zeros_like(kabs)
        for d in dirs:
            d = d / np.linalg.norm(d)
            cos2 = ((kx * d[0] + ky * d[1] + kz * d[2]) / kabs) ** 2
            window += np.exp(-(1.0 - cos2) / width2)
        spec = np.fft.rfftn(u.values, axes=(-3, -2, -1)) * window
        vals = np.fft.irfftn(spec, s=grid.ns, axes=(-3, -2, -1))
        return FieldState(vals, grid, "EH")  # window is per mode: still charge free
    if name == "gradient-charge":
        lam = float(params.get("lam", 1.0))
        noise = _seeded_noise(grid, seed, 2)
        rho_e = lp_project(noise[0], lam, grid)
        rho_m = lp_project(noise[1], lam, grid)
        rho = ChargePair(rho_e - rho_e.mean(), rho_m - rho_m.mean())
        _, _, u_stat = solve_charges(m, rho, grid)
        return u_stat
    raise SpectralError(f"unknown initial-data recipe {name!r}")


# ---------------------------------------------------------------------------
# Orthogonal field transformation


def _as_matrix_field(mat, grid: GridSpec) -> np.ndarray:
    """Broadcast a (3,), (3, 3) or grid+(3, 3) material entry to grid+(3, 3)."""
    mat = np.asarray(mat, dtype=float)
    if mat.shape == (3,):
        mat = np.diag(mat)
    if mat.shape == (3, 3):
        return np.broadcast_to(mat, (*grid.ns, 3, 3))
    if mat.shape != (*grid.ns, 3, 3):
        raise SpectralError(f"material sample shape {mat.shape} does not match grid")
    return mat


def transform_fields(phi: np.ndarray, u: FieldState, m, ortho_tol: float = 1e-10):
    """Rotate fields into the frame, rebuild charges in divergence form.

    ``phi`` holds per-node orthogonal matrices, shape grid + (3, 3) (an
    :class:`~anisowave.eigenfield.EigenFrameField` works via its
    ``frames``).  The transformed state is (phi^T E, phi^T H); the
    transformed charge applies the rotated divergence
    sum_j d_j(phi_kj . ) to the diagonalized material times the rotated
    field, which must reproduce the original charges up to discretization
    error.  Returns ``(u_tilde, charges_tilde, report)``.
    """
    frames = getattr(phi, "frames", phi)
    frames = np.asarray(frames, dtype=float)
    grid = u.grid
    if frames.shape == (3, 3):
        frames = np.broadcast_to(frames, (*grid.ns, 3, 3))
    if frames.shape != (*grid.ns, 3, 3):
        raise SpectralError(f"frame field shape {frames.shape} does not match grid")
    gram = np.einsum("xyzji,xyzjk->xyzik", frames, frames)
    dev = np.max(np.abs(gram - np.eye(3)))
    if dev > ortho_tol:
        raise SpectralError(f"frame field is not orthogonal (deviation {dev:.3e})")
    if u.kind != "EH":
        raise SpectralError("field transformation expects an (E, H) state")

    eps, mu = _material_at(m, u.time)
    eps = _as_matrix_field(eps, grid)
    mu = _as_matrix_field(mu, grid)
    eps_d = np.einsum("xyzji,xyzjk,xyzkl->xyzil", frames, eps, frames)
    mu_d = np.einsum("xyzji,xyzjk,xyzkl->xyzil", frames, mu, frames)

    e_t = np.einsum("xyzji,jxyz->ixyz", frames, u.first)
    h_t = np.einsum("xyzji,jxyz->ixyz", frames, u.second)
    u_t = FieldState(np.concatenate([e_t, h_t]), grid, "EH", u.time)

    def rotated_div(diag_mat, comp):
        scaled = np.einsum("xyzik,kxyz->ixyz", diag_mat, comp)
        w = np.einsum("xyzki,ixyz->kxyz", frames, scaled)  # sum_k phi_k (eps^d u)_k
        return _spectral_div(w, grid)

    rho_t = ChargePair(rotated_div(eps_d, e_t), rotated_div(mu_d, h_t))
    # reference charges from the untransformed fields
    d_fld = np.einsum("xyzjk,kxyz->jxyz", eps, u.first)
    b_fld = np.einsum("xyzjk,kxyz->jxyz", mu, u.second)
    rho = ChargePair(_spectral_div(d_fld, grid), _spectral_div(b_fld, grid))
    scale = max(rho.max_abs(), 1e-300)
    report = {
        "rho_e_dev": float(np.max(np.abs(rho_t.rho_e - rho.rho_e)) / scale),
        "rho_m_dev": float(np.max(np.abs(rho_t.rho_m - rho.rho_m)) / scale),
        "orthogonality": float(dev),
    }
    return u_t, rho_t, report
