"""Pure-Python cyclic Jacobi kernel for complex Hermitian matrices.

Reference implementation of the sweep loop; the compiled twin in
``_jacobi_ext.pyx`` follows it statement for statement.
"""

import math

import numpy as np


def off_norm(a):
    off = a - np.diag(np.diag(a))
    return math.sqrt(float(np.vdot(off, off).real))


def rotation(app, aqq, apq):
    """Return (c, s, t, phase) for the complex Jacobi rotation annihilating apq.

    The rotation acts on columns (p, q) as
    ``J = [[c, s], [-s * conj(phase), c * conj(phase)]]``.
    """
    mag = abs(apq)
    phase = apq / mag
    theta = (aqq - app) / (2.0 * mag)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    return c, t * c, t, phase


def jacobi_sweeps(a, v, thresh, max_sweeps):
    """Diagonalise ``a`` in place, accumulating rotations into ``v``.

    Returns the number of completed sweeps, or -1 if ``max_sweeps`` was hit
    before the off-diagonal Frobenius norm fell to ``thresh``.
    """
    n = a.shape[0]
    for sweep in range(max_sweeps + 1):
        if off_norm(a) <= thresh:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                c, s, t, phase = rotation(app, aqq, apq)
                cph = phase.conjugate()
                j_qp = -s * cph
                j_qq = c * cph

                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp + j_qp * colq
                a[:, q] = s * colp + j_qq * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp - s * phase * rowq
                a[q, :] = s * rowp + c * phase * rowq

                mag = abs(apq)
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * mag
                a[q, q] = aqq + t * mag

                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp + j_qp * vq
                v[:, q] = s * vp + j_qq * vq
    return -1

