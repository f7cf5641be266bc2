# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled sweep kernels; mirrors ``pure.py`` operation-for-operation.

Compiled without -ffast-math on purpose: the pure backend must produce
bit-identical results.
"""

cdef double W_MIN = 1e-6

cdef int PROPOSITION = 0
cdef int AND = 1
cdef int OR = 2
cdef int NOT = 3
cdef int IMPLIES = 4


cdef inline double _clamp01(double v) nogil:
    if v < 0.0:
        return 0.0
    if v > 1.0:
        return 1.0
    return v


def upward_sweep(signed char[::1] kind, unsigned char[::1] asserted,
                 double[::1] beta, double[::1] lower, double[::1] upper,
                 long long[::1] offsets, int[::1] children, double[::1] weights):
    cdef Py_ssize_t n = kind.shape[0]
    cdef double max_change = 0.0
    cdef Py_ssize_t i, e, lo, hi
    cdef int k, a, cc, c
    cdef double s_low, s_up, new_l, new_u, d, w, w_a, w_c
    for i in range(n):
        k = kind[i]
        if k == PROPOSITION or asserted[i]:
            continue
        lo = offsets[i]
        hi = offsets[i + 1]
        if k == AND:
            s_low = 0.0
            s_up = 0.0
            for e in range(lo, hi):
                c = children[e]
                w = weights[e]
                s_low += w * (1.0 - lower[c])
                s_up += w * (1.0 - upper[c])
            new_l = _clamp01(beta[i] - s_low)
            new_u = _clamp01(beta[i] - s_up)
        elif k == OR:
            s_low = 0.0
            s_up = 0.0
            for e in range(lo, hi):
                c = children[e]
                w = weights[e]
                s_low += w * lower[c]
                s_up += w * upper[c]
            new_l = _clamp01(1.0 - beta[i] + s_low)
            new_u = _clamp01(1.0 - beta[i] + s_up)
        elif k == NOT:
            c = children[lo]
            new_l = 1.0 - upper[c]
            new_u = 1.0 - lower[c]
        else:
            a = children[lo]
            cc = children[lo + 1]
            w_a = weights[lo]
            w_c = weights[lo + 1]
            new_l = _clamp01(1.0 - beta[i] + w_a * (1.0 - upper[a]) + w_c * lower[cc])
            new_u = _clamp01(1.0 - beta[i] + w_a * (1.0 - lower[a]) + w_c * upper[cc])
        if new_l > lower[i]:
            d = new_l - lower[i]
            if d > max_change:
                max_change = d
            lower[i] = new_l
        if new_u < upper[i]:
            d = upper[i] - new_u
            if d > max_change:
                max_change = d
            upper[i] = new_u
    return max_change


cdef inline double _raise_lower(double[::1] lower, int c, double cand) nogil:
    cdef double d
    cand = _clamp01(cand)
    if cand > lower[c]:
        d = cand - lower[c]
        lower[c] = cand
        return d
    return 0.0


cdef inline double _drop_upper(double[::1] upper, int c, double cand) nogil:
    cdef double d
    cand = _clamp01(cand)
    if cand < upper[c]:
        d = upper[c] - cand
        upper[c] = cand
        return d
    return 0.0


def downward_sweep(signed char[::1] kind, unsigned char[::1] asserted,
                   double[::1] beta, double[::1] lower, double[::1] upper,
                   long long[::1] offsets, int[::1] children, double[::1] weights):
    cdef Py_ssize_t n = kind.shape[0]
    cdef double max_change = 0.0
    cdef Py_ssize_t i, e, f, lo, hi
    cdef int k, a, cc, c
    cdef double ly, uy, rest, d, w, w_a, w_c, cand
    for i in range(n - 1, -1, -1):
        k = kind[i]
        if k == PROPOSITION:
            continue
        ly = lower[i]
        uy = upper[i]
        lo = offsets[i]
        hi = offsets[i + 1]
        if k == NOT:
            c = children[lo]
            if not asserted[c]:
                d = _raise_lower(lower, c, 1.0 - uy)
                if d > max_change:
                    max_change = d
                d = _drop_upper(upper, c, 1.0 - ly)
                if d > max_change:
                    max_change = d
        elif k == AND:
            for e in range(lo, hi):
                c = children[e]
                w = weights[e]
                if asserted[c] or w < W_MIN:
                    continue
                if ly > 0.0:
                    rest = 0.0
                    for f in range(lo, hi):
                        if f != e:
                            rest += weights[f] * (1.0 - upper[children[f]])
                    d = _raise_lower(lower, c, 1.0 - (beta[i] - ly - rest) / w)
                    if d > max_change:
                        max_change = d
                if uy < 1.0:
                    rest = 0.0
                    for f in range(lo, hi):
                        if f != e:
                            rest += weights[f] * (1.0 - lower[children[f]])
                    d = _drop_upper(upper, c, 1.0 - (beta[i] - uy - rest) / w)
                    if d > max_change:
                        max_change = d
        elif k == OR:
            for e in range(lo, hi):
                c = children[e]
                w = weights[e]
                if asserted[c] or w < W_MIN:
                    continue
                if ly > 0.0:
                    rest = 0.0
                    for f in range(lo, hi):
                        if f != e:
                            rest += weights[f] * upper[children[f]]
                    d = _raise_lower(lower, c, (ly - 1.0 + beta[i] - rest) / w)
                    if d > max_change:
                        max_change = d
                if uy < 1.0:
                    rest = 0.0
                    for f in range(lo, hi):
                        if f != e:
                            rest += weights[f] * lower[children[f]]
                    d = _drop_upper(upper, c, (uy - 1.0 + beta[i] - rest) / w)
                    if d > max_change:
                        max_change = d
        else:
            a = children[lo]
            cc = children[lo + 1]
            w_a = weights[lo]
            w_c = weights[lo + 1]
            if not asserted[a] and w_a >= W_MIN:
                if ly > 0.0:
                    cand = (ly - 1.0 + beta[i] - w_c * upper[cc]) / w_a
                    d = _drop_upper(upper, a, 1.0 - cand)
                    if d > max_change:
                        max_change = d
                if uy < 1.0:
                    cand = (uy - 1.0 + beta[i] - w_c * lower[cc]) / w_a
                    d = _raise_lower(lower, a, 1.0 - cand)
                    if d > max_change:
                        max_change = d
            if not asserted[cc] and w_c >= W_MIN:
                if ly > 0.0:
                    cand = (ly - 1.0 + beta[i] - w_a * (1.0 - lower[a])) / w_c
                    d = _raise_lower(lower, cc, cand)
                    if d > max_change:
                        max_change = d
                if uy < 1.0:
                    cand = (uy - 1.0 + beta[i] - w_a * (1.0 - upper[a])) / w_c
                    d = _drop_upper(upper, cc, cand)
                    if d > max_change:
                        max_change = d
    return max_change


def forward_eval(signed char[::1] kind, double[::1] beta,
                 double[::1] lower, double[::1] upper,
                 long long[::1] offsets, int[::1] children, double[::1] weights,
                 double[::1] out_l, double[::1] out_u):
    cdef Py_ssize_t n = kind.shape[0]
    cdef Py_ssize_t i, e, lo, hi
    cdef int k, a, cc, c
    cdef double s_low, s_up, w, w_a, w_c
    for i in range(n):
        k = kind[i]
        if k == PROPOSITION:
            out_l[i] = lower[i]
            out_u[i] = upper[i]
            continue
        lo = offsets[i]
        hi = offsets[i + 1]
        if k == AND:
            s_low = 0.0
            s_up = 0.0
            for e in range(lo, hi):
                c = children[e]
                w = weights[e]
                s_low += w * (1.0 - out_l[c])
                s_up += w * (1.0 - out_u[c])
            out_l[i] = _clamp01(beta[i] - s_low)
            out_u[i] = _clamp01(beta[i] - s_up)
        elif k == OR:
            s_low = 0.0
            s_up = 0.0
            for e in range(lo, hi):
                c = children[e]
                w = weights[e]
                s_low += w * out_l[c]
                s_up += w * out_u[c]
            out_l[i] = _clamp01(1.0 - beta[i] + s_low)
            out_u[i] = _clamp01(1.0 - beta[i] + s_up)
        elif k == NOT:
            c = children[lo]
            out_l[i] = 1.0 - out_u[c]
            out_u[i] = 1.0 - out_l[c]
        else:
            a = children[lo]
            cc = children[lo + 1]
            w_a = weights[lo]
            w_c = weights[lo + 1]
            out_l[i] = _clamp01(1.0 - beta[i] + w_a * (1.0 - out_u[a]) + w_c * out_l[cc])
            out_u[i] = _clamp01(1.0 - beta[i] + w_a * (1.0 - out_l[a]) + w_c * out_u[cc])


cdef inline bint _pass_grad(double pre) nogil:
    # slope 1 strictly inside (0, 1); exactly-saturated activations freeze
    return 0.0 < pre < 1.0


def backward_eval(signed char[::1] kind, double[::1] beta,
                  long long[::1] offsets, int[::1] children, double[::1] weights,
                  double[::1] out_l, double[::1] out_u,
                  double[::1] d_l, double[::1] d_u,
                  double[::1] grad_beta, double[::1] grad_w):
    cdef Py_ssize_t n = kind.shape[0]
    cdef Py_ssize_t i, e, lo, hi
    cdef int k, a, cc, c
    cdef double gl, gu, s_low, s_up, w, w_a, w_c
    for i in range(n - 1, -1, -1):
        k = kind[i]
        if k == PROPOSITION:
            continue
        gl = d_l[i]
        gu = d_u[i]
        if gl == 0.0 and gu == 0.0:
            continue
        lo = offsets[i]
        hi = offsets[i + 1]
        if k == AND:
            s_low = 0.0
            s_up = 0.0
            for e in range(lo, hi):
                c = children[e]
                w = weights[e]
                s_low += w * (1.0 - out_l[c])
                s_up += w * (1.0 - out_u[c])
            if not _pass_grad(beta[i] - s_low):
                gl = 0.0
            if not _pass_grad(beta[i] - s_up):
                gu = 0.0
            grad_beta[i] += gl + gu
            for e in range(lo, hi):
                c = children[e]
                w = weights[e]
                grad_w[e] += gl * -(1.0 - out_l[c]) + gu * -(1.0 - out_u[c])
                d_l[c] += gl * w
                d_u[c] += gu * w
        elif k == OR:
            s_low = 0.0
            s_up = 0.0
            for e in range(lo, hi):
                c = children[e]
                w = weights[e]
                s_low += w * out_l[c]
                s_up += w * out_u[c]
            if not _pass_grad(1.0 - beta[i] + s_low):
                gl = 0.0
            if not _pass_grad(1.0 - beta[i] + s_up):
                gu = 0.0
            grad_beta[i] += -(gl + gu)
            for e in range(lo, hi):
                c = children[e]
                grad_w[e] += gl * out_l[c] + gu * out_u[c]
                d_l[c] += gl * weights[e]
                d_u[c] += gu * weights[e]
        elif k == NOT:
            c = children[lo]
            d_u[c] += -gl
            d_l[c] += -gu
        else:
            a = children[lo]
            cc = children[lo + 1]
            w_a = weights[lo]
            w_c = weights[lo + 1]
            if not _pass_grad(1.0 - beta[i] + w_a * (1.0 - out_u[a]) + w_c * out_l[cc]):
                gl = 0.0
            if not _pass_grad(1.0 - beta[i] + w_a * (1.0 - out_l[a]) + w_c * out_u[cc]):
                gu = 0.0
            grad_beta[i] += -(gl + gu)
            grad_w[lo] += gl * (1.0 - out_u[a]) + gu * (1.0 - out_l[a])
            grad_w[lo + 1] += gl * out_l[cc] + gu * out_u[cc]
            d_u[a] += gl * -w_a
            d_l[a] += gu * -w_a
            d_l[cc] += gl * w_c
            d_u[cc] += gu * w_c
