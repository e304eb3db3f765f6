"""Symbol algebra and Fresnel-surface geometry for diagonal Maxwell systems.

Everything here is closed form: the 6x6 principal symbol and its
symmetrizer, the reduced 3x3 symbols, the quartic/sextic characteristic
polynomials, the adjugate tables, singular points, the (s, t) surface
parametrization with Gaussian/mean curvature, region labels and the
hyperbolicity check.  Spatial frequency is ``xi`` (3-vector), time
frequency is ``xi0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .materials import DiagonalMaterial, MaterialError, cyc, reduce_to_standard_form

DEFAULT_R_SING = 0.15
DEFAULT_KAPPA_MIN = 1e-3


class SurfaceError(ValueError):
    """Raised when a frequency does not satisfy the assumed surface relation."""


@dataclass(frozen=True)
class Covector:
    """Space-time frequency (xi0, xi')."""

    xi0: float
    xi: tuple[float, float, float]

    def __post_init__(self):
        x = np.asarray(self.xi, dtype=float)
        if x.shape != (3,) or not np.all(np.isfinite(x)) or not np.isfinite(self.xi0):
            raise ValueError("covector entries must be three finite reals plus xi0")
        object.__setattr__(self, "xi", tuple(float(v) for v in x))

    @property
    def xi_arr(self) -> np.ndarray:
        return np.asarray(self.xi)


@dataclass(frozen=True)
class CharacteristicData:
    """Values of the dispersion polynomials at one covector.

    ``quartic`` is xi0^4 - xi0^2 q0 + q1; ``sextic`` is -xi0^2 * quartic
    and coincides with det(M_E - xi0^2) = det(M_H - xi0^2).
    """

    q0: float
    q1: float
    quartic: float
    sextic: float


def curl_matrix(xi) -> np.ndarray:
    """Matrix C with C @ v == xi x v (antisymmetric, C @ xi == 0)."""
    x1, x2, x3 = np.asarray(xi, dtype=float)
    return np.array([[0.0, -x3, x2], [x3, 0.0, -x1], [-x2, x1, 0.0]])


def q0_q1(m: DiagonalMaterial, xi) -> tuple[float, float]:
    """Quadratic and quartic coefficients of the dispersion polynomial."""
    e, mu = m.eps_arr, m.mu_arr
    x2 = np.asarray(xi, dtype=float) ** 2
    c = np.array(
        [1.0 / (e[cyc(i + 1)] * mu[cyc(i + 2)]) + 1.0 / (mu[cyc(i + 1)] * e[cyc(i + 2)]) for i in range(3)]
    )
    q0 = float(c @ x2)
    q1 = float((e @ x2) * (mu @ x2) / (np.prod(e) * np.prod(mu)))
    return q0, q1


def characteristic(m: DiagonalMaterial, cov: Covector) -> CharacteristicData:
    """Evaluate the quartic and sextic characteristic polynomials."""
    q0, q1 = q0_q1(m, cov.xi_arr)
    t2 = cov.xi0 ** 2
    quartic = t2 * t2 - t2 * q0 + q1
    return CharacteristicData(q0, q1, float(quartic), float(-t2 * quartic))


def dquartic_dxi0(m: DiagonalMaterial, cov: Covector) -> float:
    """xi0-derivative 4 xi0^3 - 2 xi0 q0 of the quartic."""
    q0, _ = q0_q1(m, cov.xi_arr)
    return float(4.0 * cov.xi0 ** 3 - 2.0 * cov.xi0 * q0)


def grad_quartic_xi(m: DiagonalMaterial, cov: Covector) -> np.ndarray:
    """Spatial gradient of the quartic at fixed xi0."""
    e, mu = m.eps_arr, m.mu_arr
    x = cov.xi_arr
    c = np.array(
        [1.0 / (e[cyc(i + 1)] * mu[cyc(i + 2)]) + 1.0 / (mu[cyc(i + 1)] * e[cyc(i + 2)]) for i in range(3)]
    )
    u, v = float(e @ x ** 2), float(mu @ x ** 2)
    dq0 = 2.0 * c * x
    dq1 = (2.0 * e * x * v + u * 2.0 * mu * x) / (np.prod(e) * np.prod(mu))
    return -cov.xi0 ** 2 * dq0 + dq1


def hess_quartic_xi(m: DiagonalMaterial, cov: Covector) -> np.ndarray:
    """Spatial Hessian of the quartic at fixed xi0."""
    e, mu = m.eps_arr, m.mu_arr
    x = cov.xi_arr
    c = np.array(
        [1.0 / (e[cyc(i + 1)] * mu[cyc(i + 2)]) + 1.0 / (mu[cyc(i + 1)] * e[cyc(i + 2)]) for i in range(3)]
    )
    u, v = float(e @ x ** 2), float(mu @ x ** 2)
    du, dv = 2.0 * e * x, 2.0 * mu * x
    h1 = np.outer(du, dv) + np.outer(dv, du) + np.diag(2.0 * e * v + 2.0 * mu * u)
    return -cov.xi0 ** 2 * np.diag(2.0 * c) + h1 / (np.prod(e) * np.prod(mu))


def maxwell_symbol(m: DiagonalMaterial, cov: Covector):
    """Principal symbol p, its symmetrizer, and their block-diagonal product.

    Returns ``(p, sigma, product)`` with product equal to
    blockdiag(M_E - xi0^2, M_H - xi0^2) up to rounding.
    """
    e, mu = m.eps_arr, m.mu_arr
    if np.any(e == 0) or np.any(mu == 0):
        raise MaterialError("singular permittivity or permeability")
    C = curl_matrix(cov.xi_arr)
    E, M = np.diag(e), np.diag(mu)
    Ei, Mi = np.diag(1.0 / e), np.diag(1.0 / mu)
    t = cov.xi0
    p = np.block([[-1j * t * E, 1j * C], [1j * C, 1j * t * M]])
    sigma = np.block([[-1j * t * Ei, 1j * Ei @ C @ Mi], [1j * Mi @ C @ Ei, 1j * t * Mi]])
    return p, sigma, sigma @ p


def me_mh(m: DiagonalMaterial, xi) -> tuple[np.ndarray, np.ndarray]:
    """Reduced second-order symbols M_E and M_H."""
    e, mu = m.eps_arr, m.mu_arr
    if np.any(e == 0) or np.any(mu == 0):
        raise MaterialError("singular permittivity or permeability")
    C = curl_matrix(xi)
    Ei, Mi = np.diag(1.0 / e), np.diag(1.0 / mu)
    return -Ei @ C @ Mi @ C, -Mi @ C @ Ei @ C


def adjugate_tables(m: DiagonalMaterial, cov: Covector):
    """Entrywise cofactor tables (Z, Z_eff, Z_tilde_eff).

    ``Z @ diag(eps) / (eps1 eps2 eps3)`` equals adj(M_E - xi0^2);
    ``Z_eff`` agrees with Z on vectors orthogonal to xi' and factors as
    xi0^2 * Z_tilde_eff exactly.
    """
    e = m.eps_arr / m.mu_arr  # ratio enters every xi0^2 term
    eps, mu = m.eps_arr, m.mu_arr
    x = cov.xi_arr
    t2 = cov.xi0 ** 2
    g = sum(x[i] ** 2 / (mu[cyc(i + 1)] * mu[cyc(i + 2)]) for i in range(3))

    zt = np.empty((3, 3))
    for i in range(3):
        j, k = cyc(i + 1), cyc(i + 2)
        zt[i, i] = -(
            (e[j] + e[k]) * x[i] ** 2
            + (eps[j] / mu[i]) * x[j] ** 2
            + (eps[k] / mu[i]) * x[k] ** 2
        ) + t2 * eps[j] * eps[k]
        zt[i, j] = zt[j, i] = -x[i] * x[j] * e[k]
    z_eff = t2 * zt
    z = z_eff + g * np.outer(x, x)
    return z, z_eff, zt


def adjugate_oracle(a: np.ndarray) -> np.ndarray:
    """Adjugate by explicit 2x2 cofactors (independent of det/inverse)."""
    a = np.asarray(a, dtype=float)
    cof = np.empty_like(a)
    for i in range(3):
        for j in range(3):
            minor = np.delete(np.delete(a, i, axis=0), j, axis=1)
            cof[i, j] = (-1) ** (i + j) * (minor[0, 0] * minor[1, 1] - minor[0, 1] * minor[1, 0])
    return cof.T


def identity_suite(n_samples: int = 10_000, seed: int = 0, band=(0.5, 4.0)) -> dict:
    """Randomized verification of the closed-form symbol identities.

    Draws (material, covector) samples and records the worst deviations
    of: the symmetrizer block-diagonalization (absolute, entrywise), the
    sextic determinant identity (relative), the adjugate table against a
    cofactor oracle (relative), and the Z vs Z_eff agreement on vectors
    orthogonal to xi' (relative).
    """
    rng = np.random.default_rng(seed)
    worst = {"block_offdiag": 0.0, "det_identity": 0.0, "adjugate": 0.0, "zeff": 0.0}
    eye = np.eye(3)
    for _ in range(n_samples):
        m = DiagonalMaterial(tuple(rng.uniform(*band, 3)), tuple(rng.uniform(*band, 3)), band=band, c_sep=0.0)
        cov = Covector(float(rng.uniform(-2, 2)), tuple(rng.uniform(-2, 2, 3)))
        _, _, prod = maxwell_symbol(m, cov)
        me, mh = me_mh(m, cov.xi_arr)
        a_e = me - cov.xi0 ** 2 * eye
        a_h = mh - cov.xi0 ** 2 * eye
        expect = np.zeros((6, 6), dtype=complex)
        expect[:3, :3] = a_e
        expect[3:, 3:] = a_h
        worst["block_offdiag"] = max(worst["block_offdiag"], float(np.abs(prod - expect).max()))
        ch = characteristic(m, cov)
        scale = max(1.0, abs(ch.sextic))
        worst["det_identity"] = max(
            worst["det_identity"],
            abs(np.linalg.det(a_e) - ch.sextic) / scale,
            abs(np.linalg.det(a_h) - ch.sextic) / scale,
        )
        z, z_eff, _ = adjugate_tables(m, cov)
        adj = adjugate_oracle(a_e)
        lhs = z @ np.diag(m.eps_arr) / np.prod(m.eps_arr)
        worst["adjugate"] = max(
            worst["adjugate"], float(np.abs(lhs - adj).max()) / max(1.0, float(np.abs(adj).max()))
        )
        x = cov.xi_arr
        if x @ x > 1e-12:
            v = rng.standard_normal(3)
            v -= (v @ x) / (x @ x) * x
            dv = float(np.abs((z - z_eff) @ v).max())
            worst["zeff"] = max(
                worst["zeff"], dv / max(1e-300, float(np.abs(z).max()) * float(np.linalg.norm(v)))
            )
    worst["n_samples"] = n_samples
    worst["seed"] = seed
    return worst


@dataclass(frozen=True)
class SingularPointSet:
    """The four conical points of the standard-form surface at xi0 = 1."""

    points: np.ndarray  # (4, 3) standard-form coordinates
    branch: int  # axis j with eps*_{j+1} between eps*_j and eps*_{j+2}
    eps_eff: tuple[float, float, float]

    def closest_distance(self, lam: np.ndarray) -> np.ndarray:
        """Distance of standard-form points (..., 3) to the nearest singular point."""
        lam = np.asarray(lam, dtype=float)
        d = np.linalg.norm(lam[..., None, :] - self.points, axis=-1)
        return d.min(axis=-1)


def singular_points(m: DiagonalMaterial) -> SingularPointSet:
    """Closed-form conical points of the standard-form surface.

    Requires the fully anisotropic separation; the unique cyclic branch j
    with eps*_{j+1} between eps*_j and eps*_{j+2} carries the four points
    (+-lam_j, 0, +-lam_{j+2}) placed on the axes j and j+2.
    """
    if not m.is_fully_anisotropic():
        raise MaterialError("singular-point formula requires uniformly separated ratios")
    e = m.ratios
    branch = None
    for j in range(3):
        lo, hi = sorted((e[j], e[cyc(j + 2)]))
        if lo <= e[cyc(j + 1)] <= hi:
            branch = j
            break
    if branch is None:  # separation guarantees one branch; defensive
        raise MaterialError("no admissible singular branch found")
    j, k = branch, cyc(branch + 2)
    lj = np.sqrt(e[k] * (e[j] - e[cyc(j + 1)]) / (e[j] - e[k]))
    lk = np.sqrt(e[j] * (e[k] - e[cyc(j + 1)]) / (e[k] - e[j]))
    pts = np.zeros((4, 3))
    for n, (sj, sk) in enumerate([(1, 1), (1, -1), (-1, 1), (-1, -1)]):
        pts[n, j] = sj * lj
        pts[n, k] = sk * lk
    return SingularPointSet(pts, branch, tuple(e))


def surface_param(m: DiagonalMaterial, s: float, t: float):
    """Auxiliary quantity alpha(s, t) of the surface parametrization.

    Returns ``(alpha, diagnostic)`` where the diagnostic reports |s - t|,
    the distance to the degenerate (conical) limit.  Uses the effective
    ratios, i.e. the standard form of ``m``.
    """
    e = m.ratios
    e1, e2, e3 = e
    den = s * s * t - (e1 + e2 + e3) * s * t + (e1 * e2 + e1 * e3 + e2 * e3) * t - e1 * e2 * e3
    scale = max(abs(s), abs(t), 1.0) ** 3
    if abs(den) <= 1e-12 * scale:
        raise SurfaceError("parametrization degenerate: alpha denominator vanishes")
    alpha = (t - s) * e1 * e2 * e3 / den
    return float(alpha), {"s_minus_t": float(abs(s - t))}


def _st_of_point(eps_eff: np.ndarray, lam: np.ndarray) -> tuple[float, float]:
    s = float(lam @ lam)
    u = float(eps_eff @ lam ** 2)
    if u == 0.0:
        raise SurfaceError("t undefined at lam = 0")
    return s, float(np.prod(eps_eff) / u)


def curvature_closed_form(m: DiagonalMaterial, lam) -> tuple[float, float]:
    """Gaussian and mean curvature from the (s, t) parametrization."""
    e = m.ratios
    lam = np.asarray(lam, dtype=float)
    s, t = _st_of_point(e, lam)
    alpha, _ = surface_param(m, s, t)
    num = np.prod(alpha - e)
    den = alpha * np.prod(s - e)
    if den == 0.0:
        raise SurfaceError("closed-form curvature degenerate: s equals an effective ratio")
    K = num / den
    if alpha <= 0:
        raise SurfaceError("closed-form mean curvature needs alpha > 0")
    pair = 0.0
    for i in range(3):
        j, k = cyc(i + 1), cyc(i + 2)
        pair += (alpha - e[j]) * (alpha - e[k]) / ((s - e[j]) * (s - e[k]))
    Km = -0.5 * (s / np.sqrt(alpha) * K - pair / np.sqrt(alpha))
    return float(K), float(Km)


def std_surface_value(eps_eff: np.ndarray, lam: np.ndarray):
    """Standard-form quartic 1 - q0*(lam) + q1*(lam) with gradient and Hessian."""
    e = np.asarray(eps_eff, dtype=float)
    lam = np.asarray(lam, dtype=float)
    c = np.array([1.0 / e[cyc(i + 1)] + 1.0 / e[cyc(i + 2)] for i in range(3)])
    u = float(e @ lam ** 2)
    v = float(lam @ lam)
    pe = float(np.prod(e))
    F = 1.0 - c @ lam ** 2 + u * v / pe
    du, dv = 2.0 * e * lam, 2.0 * lam
    grad = -2.0 * c * lam + (du * v + u * dv) / pe
    hess = (
        -np.diag(2.0 * c)
        + (np.outer(du, dv) + np.outer(dv, du) + np.diag(2.0 * e * v + 2.0 * u * np.ones(3))) / pe
    )
    return float(F), grad, hess


def curvature_implicit(eps_eff, lam, grad_tol: float = 1e-8):
    """Curvatures of the zero set from the gradient and Hessian.

    Uses the standard implicit-surface formulas with normal grad/|grad|.
    Where the quartic degenerates to a double sheet (isotropic material:
    the gradient vanishes on the whole surface) the computation falls
    back to the single-sheet function q0*/2 - 1, which is only valid when
    the sheet discriminant vanishes identically.
    """
    e = np.asarray(eps_eff, dtype=float)
    lam = np.asarray(lam, dtype=float)
    _, grad, hess = std_surface_value(e, lam)
    if np.linalg.norm(grad) < grad_tol:
        c = np.array([1.0 / e[cyc(i + 1)] + 1.0 / e[cyc(i + 2)] for i in range(3)])
        u, v = float(e @ lam ** 2), float(lam @ lam)
        pe = float(np.prod(e))
        disc = (c @ lam ** 2 / 2.0) ** 2 - u * v / pe
        if abs(disc) > 1e-10 * max(1.0, v * v):
            raise SurfaceError("vanishing surface gradient at a non-degenerate point")
        grad = c * lam  # gradient of q0*/2
        hess = np.diag(c)
    g2 = float(grad @ grad)
    K = float(grad @ adjugate_oracle(hess) @ grad) / g2 ** 2
    Km = (float(grad @ hess @ grad) - g2 * float(np.trace(hess))) / (2.0 * g2 ** 1.5)
    return float(K), float(Km)


@dataclass
class CurvatureResult:
    K_closed: float
    Km_closed: float
    K_implicit: float
    Km_implicit: float
    principal: tuple[float, float]
    s: float
    t: float


def curvatures(
    m: DiagonalMaterial,
    lam,
    surface_tol: float = 1e-8,
    exclusion_radius: float = DEFAULT_R_SING,
) -> CurvatureResult:
    """Both curvature routes at a standard-form surface point.

    The closed form comes from the (s, t) parametrization; the implicit
    route differentiates the defining quartic.  Both are returned for
    cross validation; signs depend on orientation conventions, so
    comparisons should use absolute values.
    """
    e = np.asarray(m.ratios)
    lam = np.asarray(lam, dtype=float)
    F, grad, _ = std_surface_value(e, lam)
    if abs(F) > surface_tol * max(1.0, float(lam @ lam) ** 2):
        raise SurfaceError("point does not satisfy the surface equation")
    if m.is_fully_anisotropic():
        if float(singular_points(m).closest_distance(lam)) < exclusion_radius:
            raise SurfaceError("point too close to a singular point")
    K_i, Km_i = curvature_implicit(e, lam)
    s, t = _st_of_point(e, lam)
    try:
        K_c, Km_c = curvature_closed_form(m, lam)
    except SurfaceError:
        K_c, Km_c = np.nan, np.nan  # parametrization pole; implicit values remain
    disc = max(Km_i * Km_i - K_i, 0.0)
    principal = (Km_i - np.sqrt(disc), Km_i + np.sqrt(disc))
    return CurvatureResult(K_c, Km_c, K_i, Km_i, principal, s, t)


def fibonacci_directions(n: int) -> np.ndarray:
    """Deterministic quasi-uniform unit vectors on the sphere."""
    i = np.arange(n, dtype=float) + 0.5
    phi = np.pi * (np.sqrt(5.0) - 1.0) * i
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def _radii_for_directions(eps_eff: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """Radial coordinates of both sheets per direction, bisection refined.

    Returns (n, 2) radii, inner sheet first.  The closed-form quadratic
    root seeds a bracketing bisection on the quartic (driven to relative
    width 1e-12, well below every downstream tolerance).
    """
    e = np.asarray(eps_eff, dtype=float)
    c = np.array([1.0 / e[cyc(i + 1)] + 1.0 / e[cyc(i + 2)] for i in range(3)])
    a = dirs ** 2 @ c
    b = (dirs ** 2 @ e) * 1.0 / np.prod(e) * np.sum(dirs ** 2, axis=1)
    disc = np.maximum(a * a - 4.0 * b, 0.0)
    y = np.stack([(a - np.sqrt(disc)) / (2.0 * b), (a + np.sqrt(disc)) / (2.0 * b)], axis=1)
    r = np.sqrt(y)

    def quartic(rr):
        return 1.0 - a[:, None] * rr ** 2 + b[:, None] * rr ** 4

    lo, hi = r * (1.0 - 1e-6), r * (1.0 + 1e-6)
    flo = quartic(lo)
    for _ in range(60):  # bisection; brackets are tight by construction
        mid = 0.5 * (lo + hi)
        fm = quartic(mid)
        same = np.sign(fm) == np.sign(flo)
        lo = np.where(same, mid, lo)
        flo = np.where(same, fm, flo)
        hi = np.where(same, hi, mid)
        if np.max(hi - lo) < 1e-13 * np.max(r):
            break
    return 0.5 * (lo + hi)


def surface_mesh(m: DiagonalMaterial, n_dirs: int = 2000) -> dict:
    """Sample both sheets of the standard-form surface at xi0 = 1.

    Returns arrays keyed by ``lam`` (points), ``s``, ``t``, ``alpha``,
    ``K``/``Km`` (closed form, NaN at parametrization poles),
    ``K_impl``/``Km_impl`` and ``sheet``.
    """
    e = np.asarray(m.ratios)
    dirs = fibonacci_directions(n_dirs)
    radii = _radii_for_directions(e, dirs)
    lam = np.concatenate([dirs * radii[:, :1], dirs * radii[:, 1:2]], axis=0)
    sheet = np.concatenate([np.zeros(n_dirs, dtype=int), np.ones(n_dirs, dtype=int)])

    s = np.einsum("ij,ij->i", lam, lam)
    u = lam ** 2 @ e
    t = np.prod(e) / u
    e1, e2, e3 = e
    den = s * s * t - e.sum() * s * t + (e1 * e2 + e1 * e3 + e2 * e3) * t - np.prod(e)
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = (t - s) * np.prod(e) / den
        K = (alpha - e1) * (alpha - e2) * (alpha - e3) / (alpha * (s - e1) * (s - e2) * (s - e3))
        pair = sum(
            (alpha - e[cyc(i + 1)]) * (alpha - e[cyc(i + 2)])
            / ((s - e[cyc(i + 1)]) * (s - e[cyc(i + 2)]))
            for i in range(3)
        )
        Km = -0.5 * (s / np.sqrt(alpha) * K - pair / np.sqrt(alpha))

    K_i = np.empty_like(s)
    Km_i = np.empty_like(s)
    for n in range(lam.shape[0]):
        try:
            K_i[n], Km_i[n] = curvature_implicit(e, lam[n])
        except SurfaceError:
            K_i[n], Km_i[n] = np.nan, np.nan
    return {
        "lam": lam,
        "s": s,
        "t": t,
        "alpha": alpha,
        "K": K,
        "Km": Km,
        "K_impl": K_i,
        "Km_impl": Km_i,
        "sheet": sheet,
    }


def classify_regions(
    m: DiagonalMaterial,
    mesh: dict,
    r_sing: float = DEFAULT_R_SING,
    kappa_min: float = DEFAULT_KAPPA_MIN,
):
    """Label mesh points S3 (near conical points), S2 (flat spots), S1 (rest).

    Returns ``(labels, info)`` with labels in {1, 2, 3}.  For materials
    failing the separation condition there are no conical points and the
    classification is trivially all-S1 with a warning.
    """
    lam = np.asarray(mesh["lam"], dtype=float)
    if lam.size == 0:
        raise SurfaceError("empty mesh")
    labels = np.ones(lam.shape[0], dtype=int)
    info: dict = {"warning": None, "min_abs_principal_S1": None}
    if not m.is_fully_anisotropic():
        info["warning"] = "separation fails: no conical points, classification trivial"
        return labels, info
    sp = singular_points(m)
    near = sp.closest_distance(lam) < r_sing
    K = np.asarray(mesh["K_impl"], dtype=float)
    Km = np.asarray(mesh["Km_impl"], dtype=float)
    flat = (np.abs(K) < kappa_min) & ~near
    labels[flat] = 2
    labels[near] = 3
    s1 = labels == 1
    if np.any(s1):
        disc = np.sqrt(np.maximum(Km[s1] ** 2 - K[s1], 0.0))
        kmin = np.minimum(np.abs(Km[s1] - disc), np.abs(Km[s1] + disc))
        info["min_abs_principal_S1"] = float(np.min(kmin))
    return labels, info


def check_hyperbolicity(
    m: DiagonalMaterial,
    cov: Covector,
    surface_tol: float = 1e-8,
    degenerate_tol: float = 1e-6,
) -> dict:
    """Evaluate d(quartic)/d(xi0) on the surface and classify the point.

    Degenerate points (vanishing xi0-derivative) coincide with s == t in
    the standard-form parametrization; both diagnostics are returned.
    """
    ch = characteristic(m, cov)
    scale = max(1.0, np.linalg.norm([cov.xi0, *cov.xi]) ** 4)
    if abs(ch.quartic) > surface_tol * scale:
        raise SurfaceError("covector is not on the characteristic surface")
    d = dquartic_dxi0(m, cov)
    result = {
        "dq_dxi0": float(d),
        "classification": "hyperbolic" if abs(d) >= degenerate_tol * scale else "degenerate",
        "warning": None,
    }
    if not m.is_fully_anisotropic():
        result["warning"] = "separation fails: surface is a degenerate double cone"
    if cov.xi0 != 0.0:
        sf = reduce_to_standard_form(m, cov.xi0)
        lam = sf.apply(cov.xi_arr)
        try:
            s, t = _st_of_point(np.asarray(sf.eps_eff), lam)
            result["b"] = float(s / t)
            result["s_equals_t"] = bool(abs(s / t - 1.0) < degenerate_tol)
        except SurfaceError:
            result["b"] = float("nan")
            result["s_equals_t"] = False
    return result


def find_flat_point(m: DiagonalMaterial, sheet: int = 1, azimuth: float = 0.7) -> np.ndarray:
    """Locate a surface point with vanishing Gaussian curvature.

    The parabolic circles of the surface ring the conical points, so the
    search walks away from one singular direction on the given sheet,
    brackets the K sign change, and bisects.  Returns the standard-form
    point.
    """
    e = np.asarray(m.ratios)
    sp = singular_points(m)
    ds = sp.points[0] / np.linalg.norm(sp.points[0])
    a = np.array([0.0, 1.0, 0.0])
    b = np.cross(ds, a)
    b /= np.linalg.norm(b)
    tang = np.cos(azimuth) * a + np.sin(azimuth) * b

    def point_at(delta: float) -> np.ndarray:
        d = np.cos(delta) * ds + np.sin(delta) * tang
        d /= np.linalg.norm(d)
        r = _radii_for_directions(e, d[None, :])[0, sheet]
        return d * r

    def k_at(delta: float) -> float:
        return curvature_implicit(e, point_at(delta))[0]

    deltas = np.linspace(0.02, 1.2, 240)
    ks = np.array([k_at(d) for d in deltas])
    idx = np.flatnonzero(np.sign(ks[:-1]) * np.sign(ks[1:]) < 0)
    if idx.size == 0:
        raise SurfaceError("no curvature sign change found around the conical point")
    lo, hi = deltas[idx[0]], deltas[idx[0] + 1]
    klo = k_at(lo)
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        km = k_at(mid)
        if km == 0.0 or hi - lo < 1e-15:
            lo = hi = mid
            break
        if np.sign(km) == np.sign(klo):
            lo, klo = mid, km
        else:
            hi = mid
    return point_at(0.5 * (lo + hi))
