"""Reference values from trace identities at 50 digits."""
import itertools
from mpmath import mp, mpf, cosh, sinh, acosh, exp, sqrt, matrix, findroot, log

mp.dps = 50


def tr(m):
    return m[0, 0] + m[1, 1]


def length(m):
    t = abs(tr(m))
    return 2 * acosh(t / 2)


def translation_along(x, u):
    """Translation by u along the axis of hyperbolic x (same axis, length u)."""
    lx = length(x)
    # x = P diag(e^{l/2}, e^{-l/2}) P^-1 up to sign
    sgn = 1 if tr(x) > 0 else -1
    y = x * sgn
    # y^s for real s via y = cosh(l/2) I + sinh(l/2) K with K^2 = I
    k = (y - cosh(lx / 2) * mp.eye(2)) / sinh(lx / 2)
    s = u / 2
    return cosh(s) * mp.eye(2) + sinh(s) * k


def torus(l0, l, tau):
    """Perpendicular torus from the Fricke identity, then twisted by tau."""
    c0 = cosh(mpf(l0) / 2)
    a = exp(mpf(l) / 2)
    A = matrix([[a, 0], [0, 1 / a]])
    p = sqrt((cosh(mpf(l)) + c0) / 2) / sinh(mpf(l) / 2)
    # B symmetric-diagonal with trace 2p and tr[A,B] = -2 c0
    # B = [[p, q], [r, p]], det 1 -> qr = p^2 - 1; commutator trace fixes q r
    q = sqrt(p * p - 1)
    B = matrix([[p, q], [q, p]])
    Bt = B * matrix([[exp(mpf(tau) / 2), 0], [0, exp(-mpf(tau) / 2)]])
    comm = A * Bt * A ** -1 * Bt ** -1
    lp = length(Bt)
    # twist of A relative to the new curve Bt: solve for the perpendicular position
    def f(u):
        Y = A * translation_along(Bt, u)
        return tr(Bt * Y) - tr(Bt ** -1 * Y)
    u = findroot(f, mpf(0))
    return lp, u, tr(comm)


def sphere(holes, l, tau):
    """Dual length and |twist| on the four-holed sphere with holes [x, z, w, y]
    (alpha bounds x, y; the dual bounds x, z). Generators A=y, B=x, C=z, D=w
    with ABCD = I; alpha = AB, dual = BC. The twist flow along a curve moves the
    other trace as centre + amplitude * cosh(t) on the trace conic."""
    x_, z_, w_, y_ = holes
    A, B, C, D = [-2 * cosh(mpf(h) / 2) for h in (y_, x_, z_, w_)]
    k = 4 - A * A - B * B - C * C - D * D - A * B * C * D

    def rel(x, y, z):
        return x * x + y * y + z * z + x * y * z - (A * B + C * D) * x - (A * D + B * C) * y - (A * C + B * D) * z - k

    def extremal(fixed, other_coeff, mid_coeff, fixed_is_x):
        # minimise the free trace over the conic with `fixed` held: dF/dz = 0
        def F(v):
            if fixed_is_x:
                z = (mid_coeff - fixed * v) / 2
                return rel(fixed, v, z)
            z = (mid_coeff - fixed * v) / 2
            return rel(v, fixed, z)
        f0, f1, fm = F(mpf(0)), F(mpf(1)), F(mpf(-1))
        qa, qb, qc = (f1 + fm) / 2 - f0, (f1 - fm) / 2, f0
        disc = qb * qb - 4 * qa * qc
        roots = [(-qb + sg * sqrt(disc)) / (2 * qa) for sg in (1, -1)]
        return min([r for r in roots if r < -2], key=lambda r: abs(r))

    x = -2 * cosh(mpf(l) / 2)
    y0 = extremal(x, None, A * C + B * D, True)
    cy = (2 * (A * D + B * C) - x * (A * C + B * D)) / (4 - x * x)
    y = cy + (y0 - cy) * cosh(mpf(tau))
    lp = 2 * acosh(abs(y) / 2)
    x0 = extremal(y, None, A * C + B * D, False)
    cx = (2 * (A * B + C * D) - y * (A * C + B * D)) / (4 - y * y)
    ratio = (x - cx) / (x0 - cx)
    tp = acosh(ratio) if ratio > 1 else mpf(0)
    return lp, tp


if __name__ == "__main__":
    for args in [(0, 1, 0), (0, 1, 0.7), (1, 1, 0.7), (0.5, 0.3, -1.2), (2, 2.5, 1.9)]:
        lp, u, ct = torus(*args)
        print("torus", args, mp.nstr(lp, 20), mp.nstr(u, 20))
    for holes, l, tau in [((0, 0, 0, 0), 1, 0), ((0, 0, 0, 0), 1, 0.5), ((1, 1, 1, 1), 1.2, -0.8),
                          ((0.5, 1.0, 1.5, 2.0), 0.7, 1.3), ((2, 0, 1, 0.3), 2.5, -1.9)]:
        lp, tp = sphere(holes, l, tau)
        print("sphere", holes, l, tau, mp.nstr(lp, 20), mp.nstr(tp, 20))
