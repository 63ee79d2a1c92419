"""Pure-Python (numpy) fallback for the cyclic Jacobi kernel."""

import numpy as np

# below this an off-diagonal entry is dropped; dividing by it would overflow
TINY = 1e-290


def jacobi_sweeps(a, v, threshold, max_sweeps):
    """Same contract as the compiled ``jacobi_sweeps``: in-place on ``a`` and ``v``."""
    n = a.shape[0]
    mask = ~np.eye(n, dtype=bool)
    for sweep in range(max_sweeps + 1):
        if np.linalg.norm(a[mask]) <= threshold:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < TINY:
                    a[p, q] = a[q, p] = 0.0
                    continue
                ph = complex(apq.real / r, apq.imag / r)
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                if tau >= 0:
                    t = 1.0 / (tau + np.hypot(1.0, tau))
                else:
                    t = -1.0 / (-tau + np.hypot(1.0, tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * ph.conjugate() * col_q
                a[:, q] = s * col_p + c * ph.conjugate() * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - s * ph * row_q
                a[q, :] = s * row_p + c * ph * row_q
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * ph.conjugate() * vq
                v[:, q] = s * vp + c * ph.conjugate() * vq
    return -1
