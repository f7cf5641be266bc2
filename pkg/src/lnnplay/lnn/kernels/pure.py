"""Pure-Python sweep kernels over the flattened graph arrays.

This is the reference backend. The compiled backend in ``_fast.pyx`` mirrors
these loops operation-for-operation so that both produce bit-identical
float64 results; keep the two files in sync when changing any formula.

Array layout (see ``lnnplay.lnn.core.LnnGraph``):
  kind      int8[n]    0=proposition 1=and 2=or 3=not 4=implies
  asserted  uint8[n]   1 if bounds are externally pinned
  beta      float64[n] gate bias
  lower/upper float64[n] truth bounds
  offsets   int64[n+1] CSR row pointers into children/weights
  children  int32[m]   child node indices (Implies: [antecedent, consequent])
  weights   float64[m] edge weights

Nodes are stored children-first (topological order), so a single forward
loop visits every child before its parent.
"""

from __future__ import annotations

PROPOSITION = 0
AND = 1
OR = 2
NOT = 3
IMPLIES = 4

W_MIN = 1e-6  # weights below this skip downward tightening (division guard)


def _clamp01(v: float) -> float:
    if v < 0.0:
        return 0.0
    if v > 1.0:
        return 1.0
    return v


def upward_sweep(kind, asserted, beta, lower, upper, offsets, children, weights) -> float:
    """One bottom-up sweep; recomputes every non-asserted gate from its
    children and intersects with the stored bounds (bounds only tighten).
    Returns the maximum absolute bound change."""
    n = len(kind)
    max_change = 0.0
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
        else:  # IMPLIES: y = clamp(1 - beta + w_a*(1 - a) + w_c*c)
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


def _raise_lower(lower, c, cand: float):
    cand = _clamp01(cand)
    if cand > lower[c]:
        d = cand - lower[c]
        lower[c] = cand
        return d
    return 0.0


def _drop_upper(upper, c, cand: float):
    cand = _clamp01(cand)
    if cand < upper[c]:
        d = upper[c] - cand
        upper[c] = cand
        return d
    return 0.0


def downward_sweep(kind, asserted, beta, lower, upper, offsets, children, weights) -> float:
    """One top-down sweep; tightens children through the functional inverses
    of the gate activations, applied only where the gate's bound is
    informative (lower > 0 or upper < 1). Asserted children are never
    touched. Returns the maximum absolute bound change."""
    n = len(kind)
    max_change = 0.0
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
        else:  # IMPLIES: an Or over (1 - antecedent) and the consequent
            a = children[lo]
            cc = children[lo + 1]
            w_a = weights[lo]
            w_c = weights[lo + 1]
            if not asserted[a] and w_a >= W_MIN:
                if ly > 0.0:
                    # lower bound on (1 - a) becomes an upper bound on a
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


def forward_eval(kind, beta, lower, upper, offsets, children, weights, out_l, out_u) -> None:
    """Pure one-shot evaluation: propositions copy their stored bounds, every
    gate (asserted or not) is computed from its children. No intersection
    with stored bounds; this is the differentiable forward used by training."""
    n = len(kind)
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
        else:  # IMPLIES
            a = children[lo]
            cc = children[lo + 1]
            w_a = weights[lo]
            w_c = weights[lo + 1]
            out_l[i] = _clamp01(1.0 - beta[i] + w_a * (1.0 - out_u[a]) + w_c * out_l[cc])
            out_u[i] = _clamp01(1.0 - beta[i] + w_a * (1.0 - out_l[a]) + w_c * out_u[cc])


def _pass_grad(pre: float) -> bool:
    # clamp subgradient: slope 1 strictly inside (0, 1), 0 at and beyond
    # the boundaries, so exactly-saturated activations stop all training
    return 0.0 < pre < 1.0


def backward_eval(kind, beta, offsets, children, weights,
                  out_l, out_u, d_l, d_u, grad_beta, grad_w) -> None:
    """Reverse-mode sweep matching ``forward_eval``. ``d_l``/``d_u`` carry the
    adjoints of each node's lower/upper value (seeded by the caller) and are
    consumed top-down; gradients accumulate into ``grad_beta``/``grad_w``."""
    n = len(kind)
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
        else:  # IMPLIES
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
