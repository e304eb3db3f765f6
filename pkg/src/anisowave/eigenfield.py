"""Eigenpairs of parameter-dependent symmetric matrices and their globalization.

A normalized eigenvector of a simple eigenvalue is determined up to sign,
so continuation along paths picks the sheet by overlap with the previous
sample.  On simply connected grids a spanning-tree sweep plus an
all-edge consistency check produces a global orthogonal frame; around
non-contractible loops the continuation can return the antipodal vector,
which is detected as holonomy -1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .materials import MaterialField, MaterialError

OVERLAP_MIN = 0.5  # guarantees the correct sheet of the antipodal pair


class EigenfieldError(RuntimeError):
    pass


@dataclass
class ParamMatrixField:
    """Symmetric matrix family x -> A(x) with simplicity metadata."""

    evaluator: callable
    gap_min: float | None = None
    smoothness: int = 1

    def __call__(self, x):
        a = np.asarray(self.evaluator(x), dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise EigenfieldError("matrix samples must be square")
        if np.max(np.abs(a - a.T)) > 1e-12 * max(1.0, np.max(np.abs(a))):
            raise EigenfieldError(f"non-symmetric matrix sample at x={x}")
        return a


def _as_field(A) -> ParamMatrixField:
    if isinstance(A, ParamMatrixField):
        return A
    return ParamMatrixField(A)


def canonical_sign(v: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Flip so the first component exceeding tol in magnitude is positive."""
    idx = np.flatnonzero(np.abs(v) > tol)
    if idx.size and v[idx[0]] < 0:
        return -v
    return v


def _gap_min_for(a: np.ndarray, gap_min: float | None) -> float:
    if gap_min is not None:
        return gap_min
    return 1e-6 * max(1.0, float(np.linalg.norm(a, 2)))


def local_eigenpair(A, x, lambda_hint: float, gap_min: float | None = None):
    """Eigenpair with eigenvalue nearest the hint, canonical sign.

    Raises if the chosen eigenvalue is not simple with a gap of at least
    ``gap_min`` (default 1e-6 * ||A(x)||).
    """
    A = _as_field(A)
    a = A(x)
    w, V = np.linalg.eigh(a)
    k = int(np.argmin(np.abs(w - lambda_hint)))
    gap = np.min(np.abs(np.delete(w, k) - w[k])) if w.size > 1 else np.inf
    if gap < _gap_min_for(a, gap_min if gap_min is not None else A.gap_min):
        raise EigenfieldError(f"eigenvalue not simple at x={x} (gap {gap:.3e})")
    return float(w[k]), canonical_sign(V[:, k])


def _aligned_step(a, v_prev, gap_min):
    """Eigenpair of ``a`` on the sheet of ``v_prev``; returns (lam, v, overlap)."""
    w, V = np.linalg.eigh(a)
    overlaps = V.T @ v_prev
    k = int(np.argmax(np.abs(overlaps)))
    gap = np.min(np.abs(np.delete(w, k) - w[k])) if w.size > 1 else np.inf
    if gap < gap_min:
        raise EigenfieldError(f"eigenvalue gap collapsed to {gap:.3e}")
    v = V[:, k] * np.sign(overlaps[k]) if overlaps[k] != 0 else V[:, k]
    return float(w[k]), v, float(abs(overlaps[k]))


def continue_along_path(A, xs, v_start, gap_min: float | None = None, max_refine: int = 12):
    """Continue a simple eigenvector along discrete path samples.

    Consecutive raw eigenvectors must overlap by more than 0.5 in
    magnitude; below that the step is bisected (linear interpolation
    between samples, adequate for straight segments or finely sampled
    paths) up to ``max_refine`` levels before failing.

    Returns ``(vectors, eigenvalues)`` with ``vectors[k+1]`` sign-aligned
    to ``vectors[k]``.
    """
    A = _as_field(A)
    xs = [np.asarray(x, dtype=float) for x in xs]
    v = np.asarray(v_start, dtype=float)
    v = v / np.linalg.norm(v)
    a0 = A(xs[0])
    gm = _gap_min_for(a0, gap_min if gap_min is not None else A.gap_min)
    vectors = [v]
    lams = [float(v @ a0 @ v)]
    for k in range(1, len(xs)):
        v = _continue_segment(A, xs[k - 1], xs[k], v, gm, max_refine)
        a = A(xs[k])
        vectors.append(v)
        lams.append(float(v @ a @ v))
    return np.array(vectors), np.array(lams)


def _continue_segment(A, x0, x1, v, gm, depth):
    lam, v_new, overlap = _aligned_step(A(x1), v, gm)
    if overlap > OVERLAP_MIN:
        return v_new
    if depth <= 0:
        raise EigenfieldError(
            f"path resolution insufficient between {x0} and {x1} (overlap {overlap:.3f})"
        )
    mid = 0.5 * (np.asarray(x0) + np.asarray(x1))
    v_mid = _continue_segment(A, x0, mid, v, gm, depth - 1)
    return _continue_segment(A, mid, x1, v_mid, gm, depth - 1)


@dataclass
class HolonomyReport:
    loop: str
    signs: list[int]
    obstructed: bool

    def to_dict(self) -> dict:
        return {"loop": self.loop, "signs": list(self.signs), "obstructed": bool(self.obstructed)}


def detect_holonomy(A, loop_xs, gap_min: float | None = None) -> HolonomyReport:
    """Continue every simple eigenbranch once around a closed loop.

    The loop is closed automatically if the last sample differs from the
    first.  A sign of -1 for any branch obstructs a continuous global
    eigenvector field on any domain containing the loop.
    """
    A = _as_field(A)
    xs = [np.asarray(x, dtype=float) for x in loop_xs]
    if np.linalg.norm(xs[0] - xs[-1]) > 0:
        xs = xs + [xs[0]]
    a0 = A(xs[0])
    w0, V0 = np.linalg.eigh(a0)
    signs = []
    for b in range(w0.size):
        v0 = canonical_sign(V0[:, b])
        vectors, _ = continue_along_path(A, xs, v0, gap_min=gap_min)
        signs.append(int(np.sign(vectors[0] @ vectors[-1])))
    return HolonomyReport(f"{len(xs) - 1} samples", signs, any(s < 0 for s in signs))


@dataclass
class EigenFrameField:
    """Orthogonal frames diagonalizing a matrix field on a grid.

    ``frames`` has shape ``grid_shape + (n, n)`` with eigenvector columns
    ordered by ascending eigenvalue; ``eigenvalues`` has shape
    ``grid_shape + (n,)``.  ``certificate`` records the worst alignment
    over all grid edges (including the non-tree ones).
    """

    frames: np.ndarray
    eigenvalues: np.ndarray
    certificate: dict = field(default_factory=dict)

    @property
    def grid_shape(self) -> tuple[int, ...]:
        return self.frames.shape[:-2]

    def orthonormality_residual(self) -> float:
        n = self.frames.shape[-1]
        g = np.einsum("...ij,...ik->...jk", self.frames, self.frames)
        return float(np.max(np.abs(g - np.eye(n))))

    def diagonalization_residual(self, mats: np.ndarray) -> float:
        d = np.einsum("...ji,...jk,...kl->...il", self.frames, mats, self.frames)
        off = d - self.eigenvalues[..., None, :] * np.eye(d.shape[-1])
        return float(np.max(np.abs(off)))


def globalize_matrices(mats: np.ndarray, gap_min: float | None = None) -> EigenFrameField:
    """Build a globally consistent eigenframe field over a grid of matrices.

    Continuation runs along a spanning tree from the first grid node;
    afterwards every grid edge is checked for positive alignment of all
    matched columns.  Any negative edge means the domain is not simply
    connected at this resolution (or the sampling is too coarse) and is a
    hard error.
    """
    mats = np.asarray(mats, dtype=float)
    n = mats.shape[-1]
    shape = mats.shape[:-2]
    if np.max(np.abs(mats - np.swapaxes(mats, -1, -2))) > 1e-12 * max(1.0, np.max(np.abs(mats))):
        raise EigenfieldError("non-symmetric matrix sample in grid")
    w, V = np.linalg.eigh(mats.reshape(-1, n, n))
    gaps = np.diff(w, axis=1)
    gm = _gap_min_for(mats.reshape(-1, n, n)[0], gap_min)
    if np.min(gaps) < gm:
        bad = np.unravel_index(int(np.argmin(gaps.min(axis=1))), shape)
        raise EigenfieldError(
            f"eigenvalue not simple at grid node {bad} (gap {float(np.min(gaps)):.3e})"
        )
    V = V.reshape(shape + (n, n))
    w = w.reshape(shape + (n,))

    nodes = list(product(*[range(s) for s in shape]))
    root = nodes[0]
    V[root] = np.stack([canonical_sign(V[root][:, i]) for i in range(n)], axis=1)
    seen = {root}
    stack = [root]
    order = {root: 0}
    while stack:  # DFS spanning tree; children sign-aligned to parent
        node = stack.pop()
        for axis in range(len(shape)):
            for step in (-1, 1):
                nb = list(node)
                nb[axis] += step
                nb = tuple(nb)
                if not all(0 <= nb[d] < shape[d] for d in range(len(shape))) or nb in seen:
                    continue
                ov = np.einsum("ij,ij->j", V[node], V[nb])
                if np.min(np.abs(ov)) <= OVERLAP_MIN:
                    raise EigenfieldError(
                        f"path resolution insufficient at grid edge {node}->{nb}"
                    )
                V[nb] = V[nb] * np.sign(ov)
                seen.add(nb)
                order[nb] = order[node] + 1
                stack.append(nb)

    worst = 1.0
    worst_edge = None
    for node in nodes:  # all-edge verification, non-tree edges included
        for axis in range(len(shape)):
            nb = list(node)
            nb[axis] += 1
            nb = tuple(nb)
            if nb[axis] >= shape[axis]:
                continue
            ov = np.einsum("ij,ij->j", V[node], V[nb])
            m = float(np.min(ov))
            if m < worst:
                worst, worst_edge = m, (node, nb)
            if m <= 0:
                raise EigenfieldError(
                    "inconsistent global frame (domain not simply connected "
                    f"or resolution too coarse) at edge {node}->{nb}"
                )
    cert = {"min_edge_alignment": worst, "worst_edge": worst_edge, "all_edges_positive": True}
    return EigenFrameField(V, w, cert)


def globalize_on_grid(A, axes, gap_min: float | None = None) -> EigenFrameField:
    """Evaluate A on the tensor grid spanned by ``axes`` and globalize."""
    A = _as_field(A)
    pts = np.meshgrid(*axes, indexing="ij")
    shape = pts[0].shape
    first = A(np.array([p.flat[0] for p in pts]))
    n = first.shape[0]
    mats = np.empty(shape + (n, n))
    for idx in np.ndindex(shape):
        mats[idx] = A(np.array([p[idx] for p in pts]))
    return globalize_matrices(mats, gap_min=gap_min if gap_min is not None else A.gap_min)


def diagonalize_material(field_: MaterialField, gap_min: float | None = None):
    """Frame field diagonalizing a permittivity field with unit permeability.

    Returns ``(EigenFrameField, eps_diag)`` where ``eps_diag`` collects
    the ascending eigenvalues per node.  Requires mu == identity, since
    only then does a single orthogonal transformation diagonalize the
    material pair.
    """
    if np.max(np.abs(field_.mu - np.eye(3))) > 1e-12:
        raise MaterialError("diagonalize_material requires mu == identity")
    frame = globalize_matrices(field_.eps, gap_min=gap_min)
    return frame, frame.eigenvalues
