"""Pure-Python cyclic Jacobi eigensolver for complex Hermitian matrices.

Reference implementation of the kernel in ``_jacobi_ext.pyx``; both follow
the same rotation sequence so their results agree to rounding.
"""
import math

import numpy as np


def jacobi_eigh(a, max_sweeps=64):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Parameters
    ----------
    a : ndarray of shape (n, n)
        Hermitian matrix. Only copied, never modified.
    max_sweeps : int
        Upper bound on the number of full sweeps.

    Returns
    -------
    w : ndarray of shape (n,)
        Eigenvalues in ascending order.
    v : ndarray of shape (n, n)
        Unitary matrix whose columns are the matching eigenvectors.
    sweeps : int
        Number of sweeps performed.
    """
    a = np.array(a, dtype=np.complex128, copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = math.sqrt(float(np.sum(a.real ** 2 + a.imag ** 2)))
    if scale == 0.0 or n == 1:
        w = a.diagonal().real.copy()
        return w, v, 0
    threshold = 1e-17 * scale

    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= threshold:
                    continue
                rotated = True
                phase = apq / mag
                cphase = phase.conjugate()
                zeta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if abs(zeta) > 1e150:
                    t = 0.5 / zeta
                else:
                    t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - (s * cphase) * col_q
                a[:, q] = s * col_p + (c * cphase) * col_q

                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - (s * phase) * row_q
                a[q, :] = s * row_p + (c * phase) * row_q

                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - (s * cphase) * vq
                v[:, q] = s * vp + (c * cphase) * vq
        if not rotated:
            break

    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order], sweeps
