"""Symmetrizer algebra for quasilinear Maxwell material laws E = psi(D) D.

The conservative form of the evolution has flux matrices built from psi
and its derivatives; a block symmetrizer diag(C1, I) exists iff the
cyclic moment condition ``levi(i,j,k) d(psi_{kl})/dD_j D_l = 0`` holds.
This module evaluates that condition, constructs C1, assembles the flux
matrices entrywise and checks the symmetrizing identity, and inverts
componentwise diagonal laws D = eps(E) E for small fields.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LEVI = np.zeros((3, 3, 3))
for _i, _j, _k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
    LEVI[_i, _j, _k] = 1.0
    LEVI[_i, _k, _j] = -1.0

# constant curl blocks: (A1^j)_{mn} = -levi(j, m, n)
A1 = np.array([-LEVI[0], -LEVI[1], -LEVI[2]])


class SymmetrizerError(ValueError):
    pass


@dataclass
class NonlinearLaw:
    """Small-field material map D -> psi(D) with optional derivatives.

    ``psi`` maps a 3-vector to a symmetric 3x3 matrix.  ``dpsi``, when
    given, maps D to the stacked derivatives (3, 3, 3) with
    ``dpsi(D)[m]`` = d psi / d D_m; otherwise central differences with
    step ``1e-6 * max(1, |D|)`` are used.  ``delta`` is the declared
    small-field radius.
    """

    psi: callable
    dpsi: callable | None = None
    delta: float = 0.25
    name: str = "law"

    def psi_at(self, D) -> np.ndarray:
        m = np.asarray(self.psi(np.asarray(D, dtype=float)), dtype=float)
        if m.shape != (3, 3):
            raise SymmetrizerError("psi must return a 3x3 matrix")
        return m

    def dpsi_at(self, D) -> np.ndarray:
        D = np.asarray(D, dtype=float)
        if self.dpsi is not None:
            d = np.asarray(self.dpsi(D), dtype=float)
            if d.shape != (3, 3, 3):
                raise SymmetrizerError("dpsi must return shape (3, 3, 3)")
            return d
        h = 1e-6 * max(1.0, float(np.linalg.norm(D)))
        out = np.empty((3, 3, 3))
        for m in range(3):
            e = np.zeros(3)
            e[m] = h
            out[m] = (self.psi_at(D + e) - self.psi_at(D - e)) / (2.0 * h)
        return out


def quadratic_law(eps0, alpha) -> NonlinearLaw:
    """Law psi_{ij} = eps0_{ij} + alpha_{ij} D_i D_j with analytic derivatives.

    The symmetrizer condition holds iff both coefficient matrices are
    symmetric; asymmetric ``alpha`` yields the canonical counterexample.
    """
    eps0 = np.asarray(eps0, dtype=float)
    alpha = np.asarray(alpha, dtype=float)

    def psi(D):
        return eps0 + alpha * np.outer(D, D)

    def dpsi(D):
        out = np.zeros((3, 3, 3))
        for m in range(3):
            for i in range(3):
                for j in range(3):
                    out[m, i, j] = alpha[i, j] * ((i == m) * D[j] + D[i] * (j == m))
        return out

    amax = max(float(np.max(np.abs(alpha))), 1e-12)
    return NonlinearLaw(psi, dpsi, delta=0.25 / amax, name="quadratic")


def kerr_diagonal_law(eps0, alpha) -> NonlinearLaw:
    """Componentwise law E_i = psi_i(D_i) D_i induced by eps_i = eps0_i + alpha_i E_i^2.

    psi is obtained by inverting the scalar cubic eps0_i E + alpha_i E^3 = D
    per component (Newton from E = D/eps0_i).
    """
    eps0 = np.asarray(eps0, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    if eps0.shape != (3,) or alpha.shape != (3,):
        raise SymmetrizerError("kerr-diagonal law needs three eps0 and alpha entries")

    def efield(D):
        D = np.asarray(D, dtype=float)
        E = D / eps0
        for _ in range(60):
            f = eps0 * E + alpha * E ** 3 - D
            df = eps0 + 3.0 * alpha * E ** 2
            step = f / df
            E = E - step
            if np.max(np.abs(step)) < 1e-15 * max(1.0, float(np.max(np.abs(E)))):
                break
        return E

    def psi_scalar(D):
        D = np.asarray(D, dtype=float)
        E = efield(D)
        small = np.abs(D) < 1e-9
        ratio = np.where(small, 1.0 / eps0, E / np.where(small, 1.0, D))
        return ratio

    def psi(D):
        return np.diag(psi_scalar(D))

    def dpsi(D):
        D = np.asarray(D, dtype=float)
        E = efield(D)
        dE = 1.0 / (eps0 + 3.0 * alpha * E ** 2)  # implicit function theorem
        out = np.zeros((3, 3, 3))
        for i in range(3):
            if abs(D[i]) < 1e-9:
                # psi_i(D) = 1/eps0_i - (alpha_i/eps0_i^4) D_i^2 + O(D^4)
                out[i, i, i] = -2.0 * alpha[i] / eps0[i] ** 4 * D[i]
            else:
                out[i, i, i] = (dE[i] * D[i] - E[i]) / D[i] ** 2
        return out

    amax = max(float(np.max(np.abs(alpha))), 1e-12)
    return NonlinearLaw(psi, dpsi, delta=0.25 / amax, name="kerr-diag")


def isotropic_coupling_law(eps0, alpha) -> NonlinearLaw:
    """Law induced by eps(E) = diag(eps0) + diag(alpha) |E|^2.

    Inverts D = eps(E) E by a full Newton iteration; for unequal alpha_i
    the induced psi violates the symmetrizer condition at generic D.
    """
    eps0 = np.asarray(eps0, dtype=float)
    alpha = np.asarray(alpha, dtype=float)

    def efield(D):
        D = np.asarray(D, dtype=float)
        E = D / eps0
        for _ in range(80):
            n2 = float(E @ E)
            f = (eps0 + alpha * n2) * E - D
            J = np.diag(eps0 + alpha * n2) + 2.0 * np.outer(alpha * E, E)
            step = np.linalg.solve(J, f)
            E = E - step
            if np.max(np.abs(step)) < 1e-15 * max(1.0, float(np.max(np.abs(E)))):
                break
        return E

    def psi(D):
        E = efield(D)
        return np.diag(1.0 / (eps0 + alpha * float(E @ E)))

    amax = max(float(np.max(np.abs(alpha))), 1e-12)
    return NonlinearLaw(psi, None, delta=0.25 / amax, name="isotropic-coupling")


def law_from_json(doc) -> NonlinearLaw:
    """Laws from {"kind": "quadratic", ...} or {"kind": "kerr-diag", ...}."""
    import json

    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    kind = doc.get("kind")
    if kind == "quadratic":
        return quadratic_law(doc["eps0"], doc["alpha"])
    if kind == "kerr-diag":
        return kerr_diagonal_law(doc["eps0"], doc["alpha"])
    if kind == "isotropic-coupling":
        return isotropic_coupling_law(doc["eps0"], doc["alpha"])
    raise SymmetrizerError(f"unknown law kind {kind!r}")


def condition_residual(law: NonlinearLaw, D) -> np.ndarray:
    """Cyclic moment vector r_i = levi(i,j,k) d(psi_{kl})/dD_j D_l.

    Zero (to tolerance) iff the blockdiag(C1, I) symmetrizer exists.
    """
    D = np.asarray(D, dtype=float)
    if np.linalg.norm(D) > law.delta:
        raise SymmetrizerError(f"|D| exceeds the declared small-field radius {law.delta}")
    dpsi = law.dpsi_at(D)  # dpsi[j, k, l]
    return np.einsum("ijk,jkl,l->i", LEVI, dpsi, D)


def build_symmetrizer(law: NonlinearLaw, D, tol: float = 1e-10) -> np.ndarray:
    """Upper symmetrizer block C1_{km} = psi_{km} + d(psi_{kl})/dD_m D_l.

    Requires a vanishing condition residual; C1 must come out symmetric
    and positive definite on the declared small-field ball.
    """
    D = np.asarray(D, dtype=float)
    r = condition_residual(law, D)
    if np.max(np.abs(r)) > tol:
        raise SymmetrizerError(
            f"no symmetrizer of ansatz form: condition residual {np.max(np.abs(r)):.3e}"
        )
    dpsi = law.dpsi_at(D)
    c1 = law.psi_at(D) + np.einsum("mkl,l->km", dpsi, D)
    if np.max(np.abs(c1 - c1.T)) > tol * max(1.0, float(np.max(np.abs(c1)))):
        raise SymmetrizerError("constructed C1 is not symmetric")
    ev = np.linalg.eigvalsh(0.5 * (c1 + c1.T))
    if ev[0] <= 0:
        raise SymmetrizerError(f"C1 not positive definite (smallest eigenvalue {ev[0]:.3e})")
    return c1


def full_symmetrizer(law: NonlinearLaw, D) -> np.ndarray:
    """The 6x6 blockdiag(C1, I) symmetrizer."""
    C = np.eye(6)
    C[:3, :3] = build_symmetrizer(law, D)
    return C


@dataclass
class FluxMatrices:
    """Flux blocks of the conservative form and the identity check."""

    B: np.ndarray  # (3, 3, 3): B[j] = -levi(i,j,k) psi_{km}
    Cc: np.ndarray  # (3, 3, 3): Cc[j] = -levi(i,j,k) dpsi_{kl}/dD_m D_l
    A2: np.ndarray  # B + Cc
    identity_residual: float
    worst: tuple | None

    @property
    def ok(self) -> bool:
        return self.worst is None


def flux_matrices(law: NonlinearLaw, D, tol: float = 1e-10) -> FluxMatrices:
    """Assemble B^j, Cc^j, A2^j and verify (A1^j)^t C1 = A2^j entrywise.

    C1 here is the symmetric part of the entrywise construction (a valid
    symmetrizer must be symmetric, and for laws passing the condition the
    construction is already symmetric).  The full 6x6 identity
    (A^j)^t C = C A^j with C = blockdiag(C1, I) is checked as well.  On
    violation the worst entry (j, row, col) is recorded in the result
    rather than raised, so failing laws can be inspected.
    """
    D = np.asarray(D, dtype=float)
    psi = law.psi_at(D)
    dpsi = law.dpsi_at(D)
    B = np.einsum("ijk,km->jim", -LEVI, psi)
    Cc = np.einsum("ijk,mkl,l->jim", -LEVI, dpsi, D)
    A2 = B + Cc

    c1_raw = psi + np.einsum("mkl,l->km", dpsi, D)
    c1 = 0.5 * (c1_raw + c1_raw.T)
    resid = np.einsum("jmi,mk->jik", A1, c1) - A2  # (A1^j)^t C1 - A2^j
    scale = max(1.0, float(np.max(np.abs(A2))))
    worst_val = float(np.abs(resid).max())
    worst = None
    if worst_val > tol * scale:
        j, r, c = np.unravel_index(int(np.argmax(np.abs(resid))), resid.shape)
        worst = ((int(j), int(r), int(c)), worst_val)

    if worst is None:
        C = np.eye(6)
        C[:3, :3] = c1
        for j in range(3):
            Aj = np.zeros((6, 6))
            Aj[:3, 3:] = A1[j]
            Aj[3:, :3] = A2[j]
            full = Aj.T @ C - C @ Aj
            fv = float(np.max(np.abs(full)))
            if fv > tol * scale:
                r, c = np.unravel_index(int(np.argmax(np.abs(full))), full.shape)
                worst = ((int(j), int(r), int(c)), fv)
                worst_val = max(worst_val, fv)
                break
    return FluxMatrices(B, Cc, A2, worst_val, worst)


def invert_material(eps_nl, D, eps0=None, max_iter: int = 50, tol: float = 1e-13):
    """Solve eps(E) E = D for componentwise diagonal eps(E).

    ``eps_nl`` maps a 3-vector E to the three diagonal entries.  Newton
    starts from eps(0)^{-1} D; the Jacobian is formed by central
    differences on the diagonal map.  Raises if 50 iterations do not
    reach |eps(E)E - D| < 1e-12.
    """
    D = np.asarray(D, dtype=float)
    e0 = np.asarray(eps_nl(np.zeros(3)), dtype=float) if eps0 is None else np.asarray(eps0, float)
    if np.any(e0 <= 0):
        raise SymmetrizerError("eps(0) must be positive definite")
    E = D / e0
    for _ in range(max_iter):
        f = np.asarray(eps_nl(E), dtype=float) * E - D
        if np.max(np.abs(f)) < tol * max(1.0, float(np.max(np.abs(D)))):
            return E
        J = np.empty((3, 3))
        h = 1e-7 * max(1.0, float(np.max(np.abs(E))))
        for m in range(3):
            dE = np.zeros(3)
            dE[m] = h
            J[:, m] = (
                np.asarray(eps_nl(E + dE), float) * (E + dE)
                - np.asarray(eps_nl(E - dE), float) * (E - dE)
            ) / (2.0 * h)
        E = E - np.linalg.solve(J, f)
    raise SymmetrizerError("field outside small-field ball: Newton did not converge")
