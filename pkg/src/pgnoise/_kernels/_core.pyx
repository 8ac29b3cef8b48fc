# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-pixel Poisson sampling kernel.

Single-pass C loop implementing exactly the algorithm documented in
``pgnoise._kernels.numpy_backend`` (mode-anchored inversion below the
threshold, normal approximation above). Compiled with -ffp-contract=off so
that its floating-point results are bit-identical to the numpy fallback.
"""

import numpy as np

from libc.math cimport rint, sqrt
from libc.stdint cimport int64_t

name = "compiled"


def poisson_counts(const double[::1] lam, const double[::1] pmode,
                   const int64_t[::1] kmode, const double[::1] u,
                   const double[::1] gp, double lam_exact_max, long max_steps):
    """Per-pixel counts with mean `lam`; see numpy_backend.poisson_counts."""
    cdef Py_ssize_t n = lam.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef long step
    cdef int resolved
    cdef double lam_i, u_i, s, p_up, p_dn, k_approx
    cdef int64_t k_up, k_dn

    with nogil:
        for i in range(n):
            lam_i = lam[i]
            if lam_i > lam_exact_max:
                k_approx = rint(lam_i + sqrt(lam_i) * gp[i])
                out[i] = k_approx if k_approx > 0.0 else 0.0
            elif lam_i > 0.0:
                u_i = u[i]
                s = pmode[i]
                k_up = kmode[i]
                k_dn = k_up
                if s > u_i:
                    out[i] = <double> k_up
                    continue
                p_up = s
                p_dn = s
                resolved = 0
                for step in range(max_steps):
                    k_up += 1
                    p_up *= lam_i / k_up
                    s += p_up
                    if s > u_i:
                        out[i] = <double> k_up
                        resolved = 1
                        break
                    if k_dn > 0:
                        p_dn *= k_dn / lam_i
                        k_dn -= 1
                        s += p_dn
                        if s > u_i:
                            out[i] = <double> k_dn
                            resolved = 1
                            break
                if not resolved:
                    # u fell in the O(1e-13) accumulation sliver: return the
                    # mode, matching the fallback.
                    out[i] = <double> kmode[i]
            else:
                out[i] = 0.0
    return out_arr
