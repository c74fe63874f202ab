# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic Jacobi eigensolver for complex Hermitian matrices.

Same rotation sequence as ``submaj._jacobi_py.jacobi_eigh``.
"""
import numpy as np

from libc.math cimport sqrt, fabs, copysign


cdef int _sweep_loop(double complex[:, ::1] a, double complex[:, ::1] v,
                     double threshold, int max_sweeps) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweeps = 0
    cdef int rotated
    cdef double mag, zeta, t, c, s
    cdef double complex apq, phase, cphase, xp, xq
    while sweeps < max_sweeps:
        sweeps += 1
        rotated = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if mag <= threshold:
                    continue
                rotated = 1
                phase = apq / mag
                cphase = phase.conjugate()
                zeta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if fabs(zeta) > 1e150:
                    t = 0.5 / zeta
                else:
                    t = copysign(1.0, zeta) / (fabs(zeta) + sqrt(1.0 + zeta * zeta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    xp = a[k, p]
                    xq = a[k, q]
                    a[k, p] = c * xp - (s * cphase) * xq
                    a[k, q] = s * xp + (c * cphase) * xq
                for k in range(n):
                    xp = a[p, k]
                    xq = a[q, k]
                    a[p, k] = c * xp - (s * phase) * xq
                    a[q, k] = s * xp + (c * phase) * xq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    xp = v[k, p]
                    xq = v[k, q]
                    v[k, p] = c * xp - (s * cphase) * xq
                    v[k, q] = s * xp + (c * cphase) * xq
        if not rotated:
            break
    return sweeps


def jacobi_eigh(a, int max_sweeps=64):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Returns ``(w, v, sweeps)`` with ascending eigenvalues ``w`` and
    eigenvectors in the columns of ``v``.
    """
    cdef double complex[:, ::1] am
    cdef double complex[:, ::1] vm
    cdef double scale, threshold
    cdef int sweeps = 0
    arr = np.array(a, dtype=np.complex128, order="C", copy=True)
    n = arr.shape[0]
    vec = np.eye(n, dtype=np.complex128)
    scale = sqrt(float(np.sum(arr.real ** 2 + arr.imag ** 2)))
    if scale == 0.0 or n == 1:
        return arr.diagonal().real.copy(), vec, 0
    threshold = 1e-17 * scale
    am = arr
    vm = vec
    with nogil:
        sweeps = _sweep_loop(am, vm, threshold, max_sweeps)
    w = arr.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], vec[:, order], sweeps
