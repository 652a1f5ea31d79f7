"""Matrix-free image operators under the four boundary models.

Ghost pixels outside the frame are filled by the active boundary rule:

* ``zero``            u(-j) = 0
* ``periodic``        u(-j) = u(n-j)
* ``reflective``      u(-j) = u(j-1)          (mirror about the frame edge)
* ``antireflective``  u(-j) = 2 u(0) - u(j)   (point reflection about the
                      first sample, preserving linear trends)

Blur applies the kernel as a convolution over the extended image;
correlation applies the doubly-flipped kernel under the same rule, which is
the adjoint for zero and periodic models and the "reblurred" companion
operator otherwise. All functions are pure and safe for concurrent use.
"""

from __future__ import annotations

import numpy as np
from dataclasses import dataclass
from scipy.signal import convolve2d

from .errors import PreconditionError, ShapeError, UnsupportedError
from .grid import GradientField, Psf, as_image, check_boundary_model

_PAD_KW = {
    "zero": dict(mode="constant"),
    "periodic": dict(mode="wrap"),
    "reflective": dict(mode="symmetric"),
    "antireflective": dict(mode="reflect", reflect_type="odd"),
}


def extend_array(u: np.ndarray, pads, extension: str) -> np.ndarray:
    """Pad ``u`` by ``pads = ((top, bottom), (left, right))`` per the rule."""
    check_boundary_model(extension)
    (pt, pb), (pl, pr) = pads
    if min(pt, pb, pl, pr) < 0:
        raise PreconditionError(f"negative padding {pads}")
    rows, cols = u.shape
    # One application of the mirror rules reaches at most one image length.
    if extension == "reflective" and (max(pt, pb) > rows or max(pl, pr) > cols):
        raise UnsupportedError(f"reflective padding {pads} exceeds image dims {u.shape}")
    if extension == "antireflective" and (max(pt, pb) >= rows or max(pl, pr) >= cols):
        raise UnsupportedError(f"antireflective padding {pads} must stay below image dims {u.shape}")
    if max(pt, pb, pl, pr) == 0:
        return u.copy()
    return np.pad(u, ((pt, pb), (pl, pr)), **_PAD_KW[extension])


@dataclass(frozen=True)
class PaddedDomain:
    """Geometry of an enlarged domain: original dims, per-side pads, fill rule."""

    rows: int
    cols: int
    pad_rows: int
    pad_cols: int
    extension: str

    def __post_init__(self):
        check_boundary_model(self.extension)
        if self.rows < 2 or self.cols < 2:
            raise ShapeError(f"original dims must be at least 2x2, got {(self.rows, self.cols)}")
        if self.pad_rows < 0 or self.pad_cols < 0:
            raise PreconditionError("padding must be non-negative")

    @property
    def padded_shape(self) -> tuple[int, int]:
        return (self.rows + 2 * self.pad_rows, self.cols + 2 * self.pad_cols)

    def require_support(self, psf: Psf) -> None:
        """Deblurring on the enlarged domain needs pad >= half the kernel extent."""
        need = -(-max(psf.rows, psf.cols) // 2)
        if min(self.pad_rows, self.pad_cols) < need:
            raise PreconditionError(
                f"padding {(self.pad_rows, self.pad_cols)} too small for a "
                f"{psf.rows}x{psf.cols} kernel; need at least {need} per side")


def extend(f: np.ndarray, dom: PaddedDomain) -> np.ndarray:
    """Embed ``f`` into the enlarged domain, filling margins per the rule."""
    f = as_image(f)
    if f.shape != (dom.rows, dom.cols):
        raise ShapeError(f"image shape {f.shape} does not match domain {(dom.rows, dom.cols)}")
    return extend_array(f, ((dom.pad_rows, dom.pad_rows), (dom.pad_cols, dom.pad_cols)),
                        dom.extension)


def crop(u: np.ndarray, dom: PaddedDomain) -> np.ndarray:
    """Extract the original interior from an enlarged-domain image."""
    u = as_image(u)
    if u.shape != dom.padded_shape:
        raise ShapeError(f"image shape {u.shape} does not match padded domain {dom.padded_shape}")
    pr, pc = dom.pad_rows, dom.pad_cols
    return u[pr:pr + dom.rows, pc:pc + dom.cols].copy()


def _check_support(shape, weights, what="kernel"):
    if weights.shape[0] > shape[0] or weights.shape[1] > shape[1]:
        raise UnsupportedError(
            f"{what} support {weights.shape} exceeds image dims {shape}")


def stencil_pads(weights: np.ndarray, center):
    """Ghost depths ((top, bottom), (left, right)) a stencil apply needs."""
    pr, pc = weights.shape
    cr, cc = center
    return ((pr - 1 - cr, cr), (pc - 1 - cc, cc))


def apply_stencil(u: np.ndarray, weights: np.ndarray, center, bc: str) -> np.ndarray:
    """out[i,j] = sum_ab w[a,b] * u_ext[i - (a - cr), j - (b - cc)].

    Core primitive behind blur, correlation and the composite system
    operators; ``weights`` need not be a valid Psf (e.g. zero-mass stencils).
    The extension caps bound the admissible ghost depth, so composite
    stencils wider than the image are fine as long as their half-extent is.
    """
    up = extend_array(u, stencil_pads(weights, center), bc)
    return convolve2d(up, weights, mode="valid")


def apply_blur(u: np.ndarray, psf: Psf, bc: str) -> np.ndarray:
    """Blur ``u`` by the kernel under the given boundary model."""
    u = as_image(u)
    check_boundary_model(bc)
    _check_support(u.shape, psf.weights)
    return apply_stencil(u, psf.weights, psf.center, bc)


def apply_correlation(u: np.ndarray, psf: Psf, bc: str) -> np.ndarray:
    """Apply the doubly-flipped kernel under the same boundary model.

    Equals the transpose of :func:`apply_blur` for zero and periodic models;
    for reflective/antireflective it is the reblurred companion used in the
    restoration system.
    """
    u = as_image(u)
    check_boundary_model(bc)
    _check_support(u.shape, psf.weights)
    flipped = psf.flipped()
    return apply_stencil(u, flipped.weights, flipped.center, bc)


def gradient(u: np.ndarray, bc: str) -> GradientField:
    """Forward differences with the boundary rule closing the last sample.

    The closing difference is: ``-u_last`` (zero), ``u_first - u_last``
    (periodic), ``0`` (reflective) and a copy of the preceding interior
    difference (antireflective, linear extrapolation).
    """
    u = as_image(u)
    check_boundary_model(bc)
    z1 = np.empty_like(u)
    z2 = np.empty_like(u)
    z1[:, :-1] = u[:, 1:] - u[:, :-1]
    z2[:-1, :] = u[1:, :] - u[:-1, :]
    if bc == "zero":
        z1[:, -1] = -u[:, -1]
        z2[-1, :] = -u[-1, :]
    elif bc == "periodic":
        z1[:, -1] = u[:, 0] - u[:, -1]
        z2[-1, :] = u[0, :] - u[-1, :]
    elif bc == "reflective":
        z1[:, -1] = 0.0
        z2[-1, :] = 0.0
    else:  # antireflective
        z1[:, -1] = u[:, -1] - u[:, -2]
        z2[-1, :] = u[-1, :] - u[-2, :]
    return GradientField(z1, z2)


def adjoint_gradient(z: GradientField, bc: str) -> np.ndarray:
    """Discrete analogue of the negative divergence (reblurred closure).

    Applies the flipped difference stencil under the same boundary rule,
    so constants are annihilated for every non-zero model and
    ``adjoint_gradient(gradient(u))`` is the positive-semidefinite
    boundary-closed Laplacian for the periodic model, where this operator
    equals the exact transpose of :func:`gradient`.
    """
    check_boundary_model(bc)
    z1, z2 = z.z1, z.z2
    o1 = np.empty_like(z1)
    o2 = np.empty_like(z2)
    o1[:, 1:] = z1[:, :-1] - z1[:, 1:]
    o2[1:, :] = z2[:-1, :] - z2[1:, :]
    if bc == "zero":
        o1[:, 0] = -z1[:, 0]
        o2[0, :] = -z2[0, :]
    elif bc == "periodic":
        o1[:, 0] = z1[:, -1] - z1[:, 0]
        o2[0, :] = z2[-1, :] - z2[0, :]
    elif bc == "reflective":
        o1[:, 0] = 0.0
        o2[0, :] = 0.0
    else:  # antireflective: ghost z(-1) = 2 z(0) - z(1)
        o1[:, 0] = z1[:, 0] - z1[:, 1]
        o2[0, :] = z2[0, :] - z2[1, :]
    return o1 + o2


def transpose_adjoint_gradient(z: GradientField, bc: str) -> np.ndarray:
    """Exact algebraic transpose of :func:`gradient` for every boundary model.

    Satisfies <grad(u), z> == <u, transpose_adjoint_gradient(z)> identically.
    This is the pairing the reflective-model restoration system uses, making
    its image update the exact partial minimizer of the discrete objective.
    """
    check_boundary_model(bc)
    z1, z2 = z.z1, z.z2
    o1 = np.empty_like(z1)
    o2 = np.empty_like(z2)
    o1[:, 1:] = z1[:, :-1] - z1[:, 1:]
    o2[1:, :] = z2[:-1, :] - z2[1:, :]
    o1[:, 0] = -z1[:, 0]
    o2[0, :] = -z2[0, :]
    if bc == "periodic":
        o1[:, 0] += z1[:, -1]
        o2[0, :] += z2[-1, :]
    elif bc == "reflective":
        o1[:, -1] += z1[:, -1]
        o2[-1, :] += z2[-1, :]
    elif bc == "antireflective":
        o1[:, -2] -= z1[:, -1]
        o1[:, -1] += 2.0 * z1[:, -1]
        o2[-2, :] -= z2[-1, :]
        o2[-1, :] += 2.0 * z2[-1, :]
    return o1 + o2
