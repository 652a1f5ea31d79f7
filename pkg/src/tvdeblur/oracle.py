"""Equivalence suite: fast matrix-free paths against the dense oracle.

Used by the ``oracle-check`` CLI command and the acceptance tests. Each
entry compares one operator under one boundary model, reporting the largest
max-abs deviation over a set of standard kernels (delta, two Gaussians, and
a nonsymmetric 3x2 kernel where the model admits it) applied to a fixed
pseudorandom image.
"""

from __future__ import annotations

import numpy as np

from . import dense
from .grid import BOUNDARY_MODELS, GradientField, Psf
from .harness import gaussian_psf
from .operators import adjoint_gradient, apply_blur, apply_correlation, gradient
from .transforms import plan_system, solve_system

TOLERANCE = 1e-8


def standard_kernels():
    nonsym = Psf(np.array([[0.50, 0.10],
                           [0.20, 0.10],
                           [0.05, 0.05]]), (1, 0))
    return [
        ("delta", Psf.delta(), BOUNDARY_MODELS),
        ("gauss3", gaussian_psf(3, 1.0), BOUNDARY_MODELS),
        ("gauss5", gaussian_psf(5, 1.0), BOUNDARY_MODELS),
        ("nonsym3x2", nonsym, ("zero", "periodic")),
    ]


def oracle_deviations(n: int, ratio: float = 2.0, bcs=BOUNDARY_MODELS, seed: int = 0):
    """Max-abs deviations keyed by (operator, bc), over the standard kernels."""
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((n, n))
    z = GradientField(rng.standard_normal((n, n)), rng.standard_normal((n, n)))
    devs = {}

    def note(op, bc, value):
        key = (op, bc)
        devs[key] = max(devs.get(key, 0.0), float(value))

    for bc in bcs:
        d1 = dense.build_grad(n, 1, bc)
        d2 = dense.build_grad(n, 2, bc)
        g = gradient(u, bc)
        note("grad1", bc, np.abs(d1.apply(u) - g.z1).max())
        note("grad2", bc, np.abs(d2.apply(u) - g.z2).max())
        a1 = dense.build_adjgrad(n, 1, bc)
        a2 = dense.build_adjgrad(n, 2, bc)
        note("adjgrad", bc,
             np.abs(a1.apply(z.z1) + a2.apply(z.z2) - adjoint_gradient(z, bc)).max())
        for name, psf, models in standard_kernels():
            if bc not in models:
                continue
            H = dense.build_blur(psf, n, bc)
            note("blur", bc, np.abs(H.apply(u) - apply_blur(u, psf, bc)).max())
            Hc = dense.build_correlation(psf, n, bc)
            note("correlation", bc,
                 np.abs(Hc.apply(u) - apply_correlation(u, psf, bc)).max())
            system = dense.build_system(psf, n, bc, ratio)
            rhs = system.apply(u)
            plan = plan_system(psf, (n, n), bc, ratio)
            note("solve", bc, np.abs(solve_system(plan, rhs) - u).max())
    return devs


def worst_deviation(devs) -> float:
    return max(devs.values()) if devs else 0.0
