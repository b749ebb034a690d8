"""Pure-Python versions of the compiled kernels, with the same inputs,
outputs and floating-point bound arithmetic."""

from __future__ import annotations

import math

BACKEND = "python"

EPS_UNIT = 2.3e-16

# (exponent of x3, exponent of x4, exponent of x5, coefficient)
A1_TERMS = ((2, 2, 0, 1), (2, 1, 1, -1), (2, 1, 0, -1), (1, 1, 1, 2), (0, 2, 1, -1))
A0_TERMS = ((3, 2, 1, -1), (3, 1, 1, 1), (2, 3, 1, 1), (2, 3, 0, -1), (2, 2, 0, 1), (2, 1, 1, -1))
B1_TERMS = (
    (3, 2, 0, -1), (3, 1, 0, 2), (3, 0, 0, -1), (2, 2, 1, 1), (2, 2, 0, -1), (2, 1, 1, -1),
    (2, 0, 1, 1), (2, 0, 0, 1), (1, 2, 1, -1), (1, 2, 0, 1), (1, 1, 0, -1), (1, 0, 1, -1),
    (0, 3, 1, 1), (0, 3, 0, -1), (0, 2, 0, 1),
)
B0_TERMS = ((2, 2, 1, 1), (2, 1, 1, -1), (1, 3, 1, -1), (1, 3, 0, 1), (1, 2, 0, -1), (1, 1, 1, 1))


def triple_coeffs(p3, q3, p4, q4, p5, q5):
    """(a1, a0, b1, b0) for the triple, cleared by q3^3 q4^3 q5 and content-reduced."""
    P3 = [p3**i * q3 ** (3 - i) for i in range(4)]
    P4 = [p4**i * q4 ** (3 - i) for i in range(4)]
    P5 = [q5, p5]
    out = [
        sum(c * P3[i] * P4[j] * P5[k] for i, j, k, c in table)
        for table in (A1_TERMS, A0_TERMS, B1_TERMS, B0_TERMS)
    ]
    g = 0
    for v in out:
        g = math.gcd(g, v)
    if g > 1:
        out = [v // g for v in out]
    return out


def _up(s, mag, n):
    return abs(s) + mag * n * EPS_UNIT


def _det3_up(m):
    t = (
        m[0][0] * m[1][1] * m[2][2],
        -m[0][0] * m[1][2] * m[2][1],
        -m[0][1] * m[1][0] * m[2][2],
        m[0][1] * m[1][2] * m[2][0],
        m[0][2] * m[1][0] * m[2][1],
        -m[0][2] * m[1][1] * m[2][0],
    )
    s = mag = 0.0
    for v in t:
        s += v
        mag += abs(v)
    return _up(s, mag, 12)


def log_k_up(F, G):
    """Upper bound for log of the adjugate constant, in doubles."""
    S = [[F[0], 0.0, G[0], 0.0], [F[1], F[0], G[1], G[0]], [F[2], F[1], G[2], G[1]], [0.0, F[2], 0.0, G[2]]]
    best = 0.0
    for k in (0, 3):
        total = 0.0
        for j in range(4):
            m = [[S[r][c] for c in range(4) if c != j] for r in range(4) if r != k]
            total += _det3_up(m)
        best = max(best, total)
    return math.log(best * (1 + 1e-12))


def hphi_up(F, G):
    """Upper bound for the map height from the gcd-free multiplier forms."""
    a, b, c = F
    d, e, f = G
    t3 = (a*a*f*f, -a*b*e*f, -2*a*c*d*f, a*c*e*e, b*b*d*f, -b*c*d*e, c*c*d*d)
    t2 = (-4*a*a*c*e, -2*a*a*f*f, a*b*b*e, 4*a*b*c*d, -4*a*c*d*f, 2*a*c*e*e, -b*b*b*d,
          2*b*b*d*f, -4*b*c*d*e, -4*b*d*f*f, b*e*e*f, 6*c*c*d*d, 4*c*d*e*f, -c*e*e*e)
    t1 = (4*a*a*a*c, -a*a*b*b, 2*a*a*b*f, -4*a*a*c*e, 10*a*b*c*d, -a*b*e*f, -4*a*c*d*f,
          5*a*c*e*e, 2*a*e*f*f, -2*b*b*b*d, 5*b*b*d*f, -b*b*e*e, -7*b*c*d*e, -4*b*d*f*f,
          12*c*c*d*d, 10*c*d*e*f, -2*c*e*e*e, 4*d*f*f*f, -e*e*f*f)
    best = 0.0
    for ts in (t3, t2, t1):
        s = mag = 0.0
        for v in ts:
            s += v
            mag += abs(v)
        best = max(best, _up(s, mag, 2 * len(ts) + 8))
    return math.log(best * (1 + 1e-12))


def _log_int(n):
    n = abs(n)
    bits = n.bit_length()
    if bits <= 1000:
        return math.log(n)
    shift = bits - 64
    return math.log(n >> shift) + shift * math.log(2.0)


def _step(F, G, a, b):
    aa, ab, bb = a * a, a * b, b * b
    A = F[0] * aa + F[1] * ab + F[2] * bb
    B = G[0] * aa + G[1] * ab + G[2] * bb
    g = math.gcd(A, B)
    if g != 1:
        A //= g
        B //= g
    if B < 0 or (B == 0 and A < 0):
        A, B = -A, -B
    return A, B


def rat_screen(x3, rats, ratio, margin=1e-9):
    p3, q3 = x3
    stats = dict(total=0, degenerate=0, x42=0, preperiodic=0, pruned=0, survivors=0)
    out = []
    n = len(rats)
    for i4 in range(n):
        p4, q4 = rats[i4]
        if p4 == p3 and q4 == q3:
            continue
        for i5 in range(n):
            p5, q5 = rats[i5]
            if i5 == i4 or (p5 == p3 and q5 == q3):
                continue
            stats["total"] += 1
            a1, a0, b1, b0 = triple_coeffs(p3, q3, p4, q4, p5, q5)
            if a1 == 0 or a1 + b1 + b0 == 0 or a0 * a0 - a0 * b1 + a1 * b0 == 0:
                stats["degenerate"] += 1
                continue
            F = (a1, a0 - a1, -a0)
            G = (a1, b1, b0)
            pts = [(1, 0), (1, 1), (0, 1), (p3, q3), (p4, q4), (p5, q5)]
            code = -1
            hup = cup = 0.0
            for i in range(5, 10):
                nxt = _step(F, G, *pts[i])
                if nxt in pts:
                    j = pts.index(nxt)
                    code = 2 if (i + 1 == 6 and j == 4) else 1
                    break
                pts.append(nxt)
                if i + 1 == 7:
                    Fd = tuple(float(v) for v in F)
                    Gd = tuple(float(v) for v in G)
                    hup = hphi_up(Fd, Gd)
                    cup = log_k_up(Fd, Gd)
                if i + 1 in (8, 10):
                    h = _log_int(max(abs(nxt[0]), abs(nxt[1])))
                    if h >= math.ldexp(ratio * hup, i + 1) + cup + margin:
                        code = 3
                        break
            if code < 0:
                code = 0
            if code == 2:
                stats["x42"] += 1
                continue
            if code == 3:
                stats["pruned"] += 1
                continue
            stats["preperiodic" if code == 1 else "survivors"] += 1
            out.append((i4, i5, code))
    return out, stats


def poly_screen(n, N_max, den_prune=True):
    stats = dict(ks=0, xs=0, repeats=0, denoms=0, survivors=0)
    out = []
    n2 = n * n
    kmax = (-3 * n2 - 1) // 4
    for m in range(1, n + 1):
        if math.gcd(m, n) != 1:
            continue
        r = (-m * m) % n
        k = kmax - ((kmax - r) % n)
        while k >= -N_max * n2:
            stats["ks"] += 1
            cbig = k < -2 * n2
            a = m
            while True:
                if not cbig:
                    if a > 2 * n:
                        break
                else:
                    t = 2 * a - n
                    if t > 0 and t * t > n2 - 4 * k:
                        break
                    u = -2 * (a * a + k) - n2
                    if u > 0 and (n2 - 4 * k) * n2 < u * u:
                        a += n
                        continue
                if math.gcd(n, (k + a * a) // n) != 1:
                    a += n
                    continue
                stats["xs"] += 1
                pts = [(a, n)]
                bad = False
                for i in range(1, 5):
                    u, v = pts[-1]
                    A, B = u * u * n2 + k * v * v, v * v * n2
                    g = math.gcd(A, B)
                    A //= g
                    B //= g
                    if (A, B) in pts:
                        stats["repeats"] += 1
                        bad = True
                        break
                    pts.append((A, B))
                    if den_prune and i <= 3 and B > n:
                        stats["denoms"] += 1
                        bad = True
                        break
                if not bad:
                    stats["survivors"] += 1
                    out.append((m, k, a))
                a += n
            k -= n
    return out, stats


def preper_scan(F, G, H, MC, primes, max_iter=50):
    """Same contract as the compiled scan.  Uses a full gcd at each step;
    ``primes`` only enables the no-division escape precheck."""
    gmax = None
    if primes is not None:
        gmax = 1
        for p, e in primes:
            gmax *= p**e
    stats = dict(points=0, pruned=0, found=0, undecided=0, open=0)
    found, undecided = [], []
    for b in range(H + 1):
        if b == 0:
            avals = [1]
        else:
            avals = [a for a in range(-H, H + 1) if math.gcd(a, b) == 1]
        for a in avals:
            stats["points"] += 1
            orbit = [(a, b)]
            status = 0
            while not status:
                ca, cb = orbit[-1]
                aa, ab, bb = ca * ca, ca * cb, cb * cb
                A = F[0] * aa + F[1] * ab + F[2] * bb
                B = G[0] * aa + G[1] * ab + G[2] * bb
                if gmax is not None and max(abs(A), abs(B)) > MC * gmax:
                    status = 2
                    break
                nxt = _step(F, G, ca, cb)
                if max(abs(nxt[0]), abs(nxt[1])) > MC:
                    status = 2
                    break
                if nxt in orbit:
                    status = 1
                    break
                orbit.append(nxt)
                if len(orbit) > max_iter:
                    status = 4
            if status == 1:
                stats["found"] += 1
                found.append((a, b))
            elif status == 2:
                stats["pruned"] += 1
            else:
                stats["open"] += 1
                undecided.append((a, b))
    return found, undecided, stats
