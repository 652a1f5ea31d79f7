"""Transform-domain solvers for the restoration system.

The image update of the alternating-minimization loop solves

    (H'H + ratio * D'D) u = rhs

where the composite operator is, per boundary model, diagonalized by:

* ``periodic``        2-D real FFT: eigenvalues |fft(kernel)|^2 + ratio * fft(laplacian);
* ``reflective``      2-D DCT-II (quadrantally symmetric kernels only);
* ``antireflective``  a decoupled solve: the four corner unknowns satisfy
  scalar equations with coefficient (kernel mass)^2, each frame edge
  satisfies a closed 1-D problem in the axis-collapsed stencil (solved by a
  linear-ramp lift plus a 1-D DST-I), and the interior satisfies a 2-D DST-I
  system once the known frame values are moved to the right-hand side;
* ``zero``            no fast transform exists; the plan falls back to
  conjugate gradients on the literal normal equations, applied matrix-free.

Plans are immutable and deterministic; eigenvalue magnitudes below 1e-14
are clamped (never silently: the count is recorded on the plan and logged).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as _fft
from scipy.sparse.linalg import LinearOperator, cg

from .dense import (LAPLACIAN_CENTER, LAPLACIAN_STENCIL, autocorrelation,
                    combine_stencils)
from .errors import (ConvergenceError, DataError, ShapeError, SingularPlanError,
                     SymmetryError, UnsupportedError)
from .grid import Psf, check_boundary_model
from .operators import (apply_blur, apply_correlation, apply_stencil, gradient,
                        transpose_adjoint_gradient)

logger = logging.getLogger(__name__)

EIG_FLOOR = 1e-14


# --- transform primitives (orthonormal) ---

def dct2(x: np.ndarray) -> np.ndarray:
    return _fft.dctn(x, type=2, norm="ortho")


def idct2(x: np.ndarray) -> np.ndarray:
    return _fft.idctn(x, type=2, norm="ortho")


def dst1(x: np.ndarray, axes=None) -> np.ndarray:
    """Orthonormal DST-I over the given axes; self-inverse."""
    if x.size == 0:
        raise ShapeError("DST-I needs a non-empty interior (image dims >= 3)")
    return _fft.dstn(x, type=1, norm="ortho", axes=axes)


def fft2_real(x: np.ndarray) -> np.ndarray:
    return _fft.rfft2(x)


def ifft2_real(spectrum: np.ndarray, shape) -> np.ndarray:
    return _fft.irfft2(spectrum, s=shape)


# --- plan machinery ---

def _embed_wrapped(weights, center, shape) -> np.ndarray:
    """Place stencil weights on the torus at their offsets modulo the shape."""
    out = np.zeros(shape)
    cr, cc = center
    for a in range(weights.shape[0]):
        for b in range(weights.shape[1]):
            out[(a - cr) % shape[0], (b - cc) % shape[1]] += weights[a, b]
    return out


def _cos_symbol(weights, center, theta_r, theta_c) -> np.ndarray:
    """sum_st w[s,t] cos(s*theta_r) cos(t*theta_c), sampled on the grid.

    Exact transform-basis eigenvalues for quadrantally symmetric stencils.
    """
    s = np.arange(weights.shape[0]) - center[0]
    t = np.arange(weights.shape[1]) - center[1]
    cr = np.cos(np.outer(np.atleast_1d(theta_r), s))
    cc = np.cos(np.outer(np.atleast_1d(theta_c), t))
    return cr @ weights @ cc.T


def _clamp(values):
    """Clamp magnitudes below EIG_FLOOR, preserving sign; report count and min."""
    v = np.atleast_1d(np.asarray(values, dtype=float))
    mags = np.abs(v)
    count = int(np.count_nonzero(mags < EIG_FLOOR))
    if count:
        sign = np.where(v < 0, -1.0, 1.0)
        v = np.where(mags < EIG_FLOOR, sign * EIG_FLOOR, v)
    return v, count, float(mags.min()) if mags.size else None


@dataclass(frozen=True)
class SpectralPlan:
    """Prepared solve for one (kernel, shape, boundary model, ratio) tuple.

    ``eigenvalues`` holds the system eigenvalues in the matching transform
    basis (half-spectrum for periodic, full grid for reflective, interior
    grid for antireflective, absent for the zero model's CG fallback).
    """

    bc: str
    shape: tuple[int, int]
    ratio: float
    eigenvalues: np.ndarray | None
    min_modulus: float | None
    clamp_count: int
    # antireflective boundary data
    edge_row: np.ndarray | None = None
    edge_col: np.ndarray | None = None
    corner: float | None = None
    stencil: tuple | None = None
    # zero-model fallback data
    psf: Psf | None = field(default=None, repr=False)


class SystemPlanner:
    """Caches the ratio-independent spectral pieces of the system operator.

    The continuation loop rebuilds the plan once per penalty value; only the
    linear combination blur-part + ratio * laplacian-part changes, so the
    kernel transforms are computed a single time here.
    """

    def __init__(self, psf: Psf, shape, bc: str):
        check_boundary_model(bc)
        self.psf = psf
        self.shape = (int(shape[0]), int(shape[1]))
        if min(self.shape) < 2:
            raise ShapeError(f"image dims must be at least 2x2, got {self.shape}")
        self.bc = bc
        if psf.mass ** 2 < EIG_FLOOR:
            raise SingularPlanError(
                f"kernel mass {psf.mass:.3e} makes the zero-frequency mode numerically singular")
        if bc in ("reflective", "antireflective") and not psf.quadrantally_symmetric:
            raise SymmetryError(
                f"{bc} solves require a quadrantally symmetric kernel; "
                "use the enlarged-domain path for nonsymmetric kernels")
        if bc == "zero":
            if psf.rows > self.shape[0] or psf.cols > self.shape[1]:
                raise UnsupportedError(
                    f"kernel support {(psf.rows, psf.cols)} exceeds image dims {self.shape}")
            return
        acorr, acorr_center = autocorrelation(psf)
        self._acorr = (acorr, acorr_center)
        if bc == "periodic":
            if psf.rows > self.shape[0] or psf.cols > self.shape[1]:
                raise UnsupportedError(
                    f"kernel support {(psf.rows, psf.cols)} exceeds image dims {self.shape}")
            spectrum = fft2_real(_embed_wrapped(psf.weights, psf.center, self.shape))
            self._blur_eig = np.abs(spectrum) ** 2
            self._lap_eig = fft2_real(
                _embed_wrapped(LAPLACIAN_STENCIL, LAPLACIAN_CENTER, self.shape)).real
        elif bc == "reflective":
            self._check_ghost_depth(acorr, acorr_center, cap=min(self.shape))
            impulse = np.zeros(self.shape)
            impulse[0, 0] = 1.0
            denom = dct2(impulse)
            if np.abs(denom).min() < EIG_FLOOR:
                raise SingularPlanError("degenerate DCT basis sample")
            self._blur_eig = dct2(apply_stencil(impulse, acorr, acorr_center, bc)) / denom
            self._lap_eig = dct2(
                apply_stencil(impulse, LAPLACIAN_STENCIL, LAPLACIAN_CENTER, bc)) / denom
        else:  # antireflective
            self._check_ghost_depth(acorr, acorr_center, cap=min(self.shape) - 1)
            R, C = self.shape
            theta_r = np.arange(1, R - 1) * np.pi / (R - 1)
            theta_c = np.arange(1, C - 1) * np.pi / (C - 1)
            self._blur_int = _cos_symbol(acorr, acorr_center, theta_r, theta_c)
            self._lap_int = _cos_symbol(LAPLACIAN_STENCIL, LAPLACIAN_CENTER, theta_r, theta_c)
            # frame edges see the stencil collapsed along the perpendicular axis
            self._blur_edge_row = _cos_symbol(acorr.sum(axis=1)[:, None],
                                              (acorr_center[0], 0), theta_r, [0.0])[:, 0]
            self._blur_edge_col = _cos_symbol(acorr.sum(axis=0)[None, :],
                                              (0, acorr_center[1]), [0.0], theta_c)[0, :]
            self._lap_edge_row = _cos_symbol(np.array([[-1.0], [2.0], [-1.0]]), (1, 0),
                                             theta_r, [0.0])[:, 0]
            self._lap_edge_col = _cos_symbol(np.array([[-1.0, 2.0, -1.0]]), (0, 1),
                                             [0.0], theta_c)[0, :]
            self._blur_corner = float(acorr.sum())

    @staticmethod
    def _check_ghost_depth(weights, center, cap):
        depth = max(weights.shape[0] - 1 - center[0], center[0],
                    weights.shape[1] - 1 - center[1], center[1])
        if depth > cap:
            raise UnsupportedError(
                f"composite stencil ghost depth {depth} exceeds the extension cap {cap}")

    def plan(self, ratio: float) -> SpectralPlan:
        if not (np.isfinite(ratio) and ratio >= 0):
            raise DataError(f"ratio must be finite and non-negative, got {ratio}")
        bc = self.bc
        if bc == "zero":
            return SpectralPlan(bc, self.shape, float(ratio), eigenvalues=None,
                                min_modulus=None, clamp_count=0, psf=self.psf)
        if bc in ("periodic", "reflective"):
            eig, count, mn = _clamp(self._blur_eig + ratio * self._lap_eig)
            if count:
                logger.warning("%s plan: clamped %d eigenvalue(s) below %g", bc, count, EIG_FLOOR)
            return SpectralPlan(bc, self.shape, float(ratio), eigenvalues=eig,
                                min_modulus=mn, clamp_count=count, psf=self.psf)
        # antireflective
        interior, c_int, mn_int = _clamp(self._blur_int + ratio * self._lap_int)
        edge_row, c_er, mn_er = _clamp(self._blur_edge_row + ratio * self._lap_edge_row)
        edge_col, c_ec, mn_ec = _clamp(self._blur_edge_col + ratio * self._lap_edge_col)
        corner, c_co, mn_co = _clamp(self._blur_corner)  # laplacian mass is zero
        count = c_int + c_er + c_ec + c_co
        if count:
            logger.warning("antireflective plan: clamped %d eigenvalue(s) below %g",
                           count, EIG_FLOOR)
        mins = [m for m in (mn_int, mn_er, mn_ec, mn_co) if m is not None]
        acorr, acorr_center = self._acorr
        stencil = combine_stencils(acorr, acorr_center,
                                   LAPLACIAN_STENCIL, LAPLACIAN_CENTER, ratio)
        return SpectralPlan(bc, self.shape, float(ratio), eigenvalues=interior,
                            min_modulus=min(mins) if mins else None, clamp_count=count,
                            edge_row=edge_row, edge_col=edge_col,
                            corner=float(corner[0]), stencil=stencil, psf=self.psf)


def plan_system(psf: Psf, shape, bc: str, ratio: float) -> SpectralPlan:
    """Build the transform-domain plan for H'H + ratio * D'D on this grid."""
    return SystemPlanner(psf, shape, bc).plan(ratio)


def _solve_zero(plan: SpectralPlan, rhs: np.ndarray) -> np.ndarray:
    """CG on the literal normal equations; exact transposes, matrix-free."""
    psf, ratio = plan.psf, plan.ratio
    shape = rhs.shape

    def matvec(v):
        u = v.reshape(shape)
        out = apply_correlation(apply_blur(u, psf, "zero"), psf, "zero")
        out = out + ratio * transpose_adjoint_gradient(gradient(u, "zero"), "zero")
        return out.ravel()

    op = LinearOperator((rhs.size, rhs.size), matvec=matvec, dtype=float)
    x, info = cg(op, rhs.ravel(), rtol=1e-12, atol=0.0, maxiter=20 * rhs.size)
    if info != 0:
        raise ConvergenceError(f"zero-boundary CG did not converge (info={info})")
    return x.reshape(shape)


def _edge_solve_1d(b: np.ndarray, end0: float, end1: float, eig: np.ndarray,
                   corner: float) -> np.ndarray:
    """Interior of a frame edge: lift a linear ramp through the known ends,
    then a DST-I solve for the remainder, which vanishes at both ends."""
    m = b.size
    ramp = end0 + (end1 - end0) * np.arange(1, m + 1) / (m + 1)
    w = _fft.dst(_fft.dst(b - corner * ramp, type=1, norm="ortho") / eig,
                 type=1, norm="ortho")
    return ramp + w


def solve_system(plan: SpectralPlan, rhs: np.ndarray) -> np.ndarray:
    """Solve (H'H + ratio * D'D) u = rhs in the plan's transform basis."""
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != plan.shape:
        raise ShapeError(f"rhs shape {rhs.shape} does not match plan {plan.shape}")
    if plan.bc == "periodic":
        return ifft2_real(fft2_real(rhs) / plan.eigenvalues, plan.shape)
    if plan.bc == "reflective":
        return idct2(dct2(rhs) / plan.eigenvalues)
    if plan.bc == "zero":
        return _solve_zero(plan, rhs)
    # antireflective: corners, then frame edges, then the interior
    R, C = plan.shape
    u = np.zeros((R, C))
    for i, j in ((0, 0), (0, C - 1), (R - 1, 0), (R - 1, C - 1)):
        u[i, j] = rhs[i, j] / plan.corner
    if C > 2:
        u[0, 1:-1] = _edge_solve_1d(rhs[0, 1:-1], u[0, 0], u[0, -1],
                                    plan.edge_col, plan.corner)
        u[-1, 1:-1] = _edge_solve_1d(rhs[-1, 1:-1], u[-1, 0], u[-1, -1],
                                     plan.edge_col, plan.corner)
    if R > 2:
        u[1:-1, 0] = _edge_solve_1d(rhs[1:-1, 0], u[0, 0], u[-1, 0],
                                    plan.edge_row, plan.corner)
        u[1:-1, -1] = _edge_solve_1d(rhs[1:-1, -1], u[0, -1], u[-1, -1],
                                     plan.edge_row, plan.corner)
    if R > 2 and C > 2:
        weights, center = plan.stencil
        frame_load = apply_stencil(u, weights, center, "antireflective")
        w = dst1(dst1(rhs[1:-1, 1:-1] - frame_load[1:-1, 1:-1]) / plan.eigenvalues)
        u[1:-1, 1:-1] = w
    return u
