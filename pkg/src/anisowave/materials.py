"""Material laws: constant diagonal tensors, sampled tensor fields, validation.

Conventions used throughout the package:

* permittivity ``eps`` and permeability ``mu`` are symmetric positive
  definite 3x3 tensors; the constant case stores the three eigenvalues,
* indices are cyclic, i.e. index 4 means 1 and index 5 means 2,
* a material is "fully anisotropic" when the three ratios eps_i/mu_i are
  pairwise separated by at least ``c_sep``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

DEFAULT_BAND = (1e-3, 1e3)
DEFAULT_C_SEP = 0.1  # no canonical value exists; declared engineering default


def cyc(i: int) -> int:
    """Cyclic axis index: cyc(3) == 0, cyc(4) == 1."""
    return i % 3


class MaterialError(ValueError):
    """Raised for ill-formed or inadmissible material data."""


@dataclass(frozen=True)
class DiagonalMaterial:
    """Constant diagonal permittivity/permeability pair.

    Parameters
    ----------
    eps, mu : array_like
        Three positive reals each (tensor eigenvalues along the axes).
    band : tuple
        Declared ellipticity band ``(lam, Lam)`` that all six entries
        must lie in.
    c_sep : float
        Declared pairwise separation of the ratios eps_i/mu_i required
        for the "fully anisotropic" analysis paths.
    """

    eps: tuple[float, float, float]
    mu: tuple[float, float, float]
    band: tuple[float, float] = DEFAULT_BAND
    c_sep: float = DEFAULT_C_SEP

    def __post_init__(self):
        e = np.asarray(self.eps, dtype=float)
        m = np.asarray(self.mu, dtype=float)
        if e.shape != (3,) or m.shape != (3,):
            raise MaterialError("eps and mu must each have three entries")
        if not (np.all(np.isfinite(e)) and np.all(np.isfinite(m))):
            raise MaterialError("non-finite material entry")
        if np.any(e <= 0) or np.any(m <= 0):
            raise MaterialError("material entries must be positive")
        object.__setattr__(self, "eps", tuple(float(x) for x in e))
        object.__setattr__(self, "mu", tuple(float(x) for x in m))

    @property
    def eps_arr(self) -> np.ndarray:
        return np.asarray(self.eps)

    @property
    def mu_arr(self) -> np.ndarray:
        return np.asarray(self.mu)

    @property
    def ratios(self) -> np.ndarray:
        """The three ratios eps_i/mu_i controlling the surface geometry."""
        return self.eps_arr / self.mu_arr

    def min_ratio_gap(self) -> float:
        r = self.ratios
        return float(min(abs(r[i] - r[cyc(i + 1)]) for i in range(3)))

    def is_fully_anisotropic(self, c_sep: float | None = None) -> bool:
        c = self.c_sep if c_sep is None else c_sep
        return self.min_ratio_gap() >= c

    def eps_matrix(self) -> np.ndarray:
        return np.diag(self.eps_arr)

    def mu_matrix(self) -> np.ndarray:
        return np.diag(self.mu_arr)

    @property
    def v_max(self) -> float:
        """Upper bound on signal speed, 1/sqrt(lam^2) from the band."""
        return 1.0 / self.band[0]


@dataclass
class MaterialField:
    """Symmetric 3x3 eps/mu samples on a grid.

    ``eps`` and ``mu`` have shape ``grid_shape + (3, 3)``.  The
    regularity tag is metadata only (Hoelder exponent in (0, 1] or the
    string "lipschitz").
    """

    eps: np.ndarray
    mu: np.ndarray
    regularity: float | str = "lipschitz"
    band: tuple[float, float] = DEFAULT_BAND
    c_sep: float = DEFAULT_C_SEP

    def __post_init__(self):
        self.eps = np.asarray(self.eps, dtype=float)
        self.mu = np.asarray(self.mu, dtype=float)
        for name, a in (("eps", self.eps), ("mu", self.mu)):
            if a.ndim < 2 or a.shape[-2:] != (3, 3):
                raise MaterialError(f"{name} samples must be 3x3 matrices")
        if self.eps.shape != self.mu.shape:
            raise MaterialError("eps and mu sample grids differ")

    @property
    def grid_shape(self) -> tuple[int, ...]:
        return self.eps.shape[:-2]

    def samples(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened (n, 3, 3) views of the eps and mu samples."""
        return (self.eps.reshape(-1, 3, 3), self.mu.reshape(-1, 3, 3))


@dataclass(frozen=True)
class StandardForm:
    """Substitution data mapping a diagonal material to unit permeability.

    ``lam_i = xi_i * scale[i]`` maps the original surface
    ``{q(xi0, xi') = 0}`` onto ``{1 - q0*(lam) + q1*(lam) = 0}`` where the
    starred polynomials use ``eps_eff`` and mu = 1.
    """

    eps_eff: tuple[float, float, float]
    scale: tuple[float, float, float]
    xi0: float

    def apply(self, xi_spatial: np.ndarray) -> np.ndarray:
        """Map spatial frequencies to standard-form coordinates."""
        return np.asarray(xi_spatial, dtype=float) * np.asarray(self.scale)

    def invert(self, lam: np.ndarray) -> np.ndarray:
        return np.asarray(lam, dtype=float) / np.asarray(self.scale)

    def material(self) -> DiagonalMaterial:
        """Unit-permeability material carrying the effective ratios."""
        lo = min(min(self.eps_eff), 1.0)
        hi = max(max(self.eps_eff), 1.0)
        return DiagonalMaterial(self.eps_eff, (1.0, 1.0, 1.0), band=(0.5 * lo, 2.0 * hi))


@dataclass
class ValidationReport:
    passed: bool
    min_gap: float
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "pass": bool(self.passed),
            "min_gap": float(self.min_gap),
            "violations": list(self.violations),
            "notes": list(self.notes),
        }


def validate_material(m, band=None, c_sep=None) -> ValidationReport:
    """Check ellipticity and ratio separation of a material.

    Works on :class:`DiagonalMaterial` (entrywise band check, ratio
    gaps) and :class:`MaterialField` (symmetry of each sample, sample
    eigenvalues inside the band).  Returns a report listing every
    violation; ``passed`` is True iff there are none.
    """
    violations: list = []
    notes: list = []
    if isinstance(m, DiagonalMaterial):
        band = m.band if band is None else band
        c_sep = m.c_sep if c_sep is None else c_sep
        _check_band_args(band, c_sep)
        entries = np.concatenate([m.eps_arr, m.mu_arr])
        labels = [f"eps[{i}]" for i in range(3)] + [f"mu[{i}]" for i in range(3)]
        for lab, v in zip(labels, entries):
            if not (band[0] <= v <= band[1]):
                violations.append({"kind": "ellipticity", "where": lab, "value": float(v)})
        min_gap = m.min_ratio_gap()
        if min_gap < c_sep:
            violations.append({"kind": "separation", "where": "ratios", "value": min_gap})
        return ValidationReport(not violations, min_gap, violations, notes)

    if isinstance(m, MaterialField):
        band = m.band if band is None else band
        c_sep = m.c_sep if c_sep is None else c_sep
        _check_band_args(band, c_sep)
        eps_s, mu_s = m.samples()
        min_gap = np.inf
        for name, arr in (("eps", eps_s), ("mu", mu_s)):
            if not np.all(np.isfinite(arr)):
                bad = int(np.flatnonzero(~np.isfinite(arr).all(axis=(1, 2)))[0])
                raise MaterialError(f"non-finite {name} sample at flat index {bad}")
            asym = np.max(np.abs(arr - np.swapaxes(arr, -1, -2)), axis=(1, 2))
            scale = np.maximum(np.max(np.abs(arr), axis=(1, 2)), 1.0)
            bad = np.flatnonzero(asym > 1e-12 * scale)
            if bad.size:
                raise MaterialError(
                    f"non-symmetric {name} sample at flat index {int(bad[0])}"
                )
            ev = np.linalg.eigvalsh(arr)
            low = np.flatnonzero(ev[:, 0] < band[0])
            high = np.flatnonzero(ev[:, -1] > band[1])
            for idx in low[:16]:
                violations.append(
                    {"kind": "ellipticity", "where": f"{name}@{int(idx)}", "value": float(ev[idx, 0])}
                )
            for idx in high[:16]:
                violations.append(
                    {"kind": "ellipticity", "where": f"{name}@{int(idx)}", "value": float(ev[idx, -1])}
                )
        gap = _ratio_separation(eps_s, mu_s, notes)
        if gap is not None:
            min_gap = gap
            if min_gap < c_sep:
                violations.append({"kind": "separation", "where": "ratios", "value": float(min_gap)})
        else:
            min_gap = float("nan")
        return ValidationReport(not violations, min_gap, violations, notes)

    raise MaterialError(f"unsupported material type {type(m).__name__}")


def _check_band_args(band, c_sep):
    if not (0 < band[0] <= band[1]):
        raise MaterialError("band must be a positive interval")
    if c_sep < 0:
        raise MaterialError("c_sep must be nonnegative")


def _ratio_separation(eps_s, mu_s, notes):
    """Per-sample min gap of eps_i/mu_i where that notion is defined."""
    off_e = np.max(np.abs(eps_s - eps_s * np.eye(3)))
    off_m = np.max(np.abs(mu_s - mu_s * np.eye(3)))
    if off_e < 1e-12 and off_m < 1e-12:
        ratios = np.diagonal(eps_s, axis1=1, axis2=2) / np.diagonal(mu_s, axis1=1, axis2=2)
    elif np.max(np.abs(mu_s - np.eye(3))) < 1e-12:
        ratios = np.linalg.eigvalsh(eps_s)
        notes.append("mu == identity: separation measured on eps eigenvalues")
    else:
        notes.append("separation undefined for noncommuting general eps/mu samples; skipped")
        return None
    gaps = np.stack(
        [np.abs(ratios[:, i] - ratios[:, cyc(i + 1)]) for i in range(3)], axis=1
    )
    return float(gaps.min())


def reduce_to_standard_form(m: DiagonalMaterial, xi0: float) -> StandardForm:
    """Rescale axes so that mu == 1 and the surface sits in the xi0 = 1 slice.

    The substitution is ``lam_i = xi_i / (xi0 * sqrt(mu_{i+1} mu_{i+2}))``
    with cyclic indices; the effective permittivities are eps_i/mu_i.
    """
    if xi0 == 0:
        raise MaterialError("standard-form reduction undefined at zero time frequency")
    mu = m.mu_arr
    scale = np.array(
        [1.0 / (xi0 * np.sqrt(mu[cyc(i + 1)] * mu[cyc(i + 2)])) for i in range(3)]
    )
    return StandardForm(tuple(m.ratios), tuple(scale), float(xi0))


def material_from_json(doc) -> DiagonalMaterial | MaterialField:
    """Build a material from a JSON document or path.

    Accepts ``{"eps": [e1,e2,e3], "mu": [m1,m2,m3]}`` for the constant
    case or ``{"field": {"grid": [...], "eps": [...], "mu": [...]}}`` with
    flattened row-major 3x3 samples for the field case.  Optional keys:
    ``band`` and ``c_sep``.
    """
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    band = tuple(doc.get("band", DEFAULT_BAND))
    c_sep = float(doc.get("c_sep", DEFAULT_C_SEP))
    if "field" in doc:
        f = doc["field"]
        shape = tuple(int(n) for n in f["grid"])
        eps = np.asarray(f["eps"], dtype=float).reshape(shape + (3, 3))
        mu = np.asarray(f["mu"], dtype=float).reshape(shape + (3, 3))
        return MaterialField(eps, mu, f.get("regularity", "lipschitz"), band, c_sep)
    if "eps" not in doc or "mu" not in doc:
        raise MaterialError("material document needs 'eps' and 'mu' (or 'field')")
    return DiagonalMaterial(tuple(doc["eps"]), tuple(doc["mu"]), band, c_sep)
