/* Hot loops for the searches.  Called from _ckernels.pyx. */
#ifndef QUADDYN_KERNELS_IMPL_H
#define QUADDYN_KERNELS_IMPL_H

#include <stdint.h>
#include <stdlib.h>
#include <string.h>
#include <math.h>
#include <gmp.h>

typedef __int128 i128;
typedef unsigned __int128 u128;

static inline uint64_t qd_gcd64(uint64_t a, uint64_t b) {
    if (!a) return b;
    if (!b) return a;
    int s = __builtin_ctzll(a | b);
    a >>= __builtin_ctzll(a);
    do {
        b >>= __builtin_ctzll(b);
        if (a > b) { uint64_t t = a; a = b; b = t; }
        b -= a;
    } while (b);
    return a << s;
}

static inline int qd_ctz128(u128 x) {
    uint64_t lo = (uint64_t)x;
    if (lo) return __builtin_ctzll(lo);
    return 64 + __builtin_ctzll((uint64_t)(x >> 64));
}

static inline u128 qd_gcd128(u128 a, u128 b) {
    if (!a) return b;
    if (!b) return a;
    if (!(a >> 64) && !(b >> 64)) return qd_gcd64((uint64_t)a, (uint64_t)b);
    int s = qd_ctz128(a | b);
    a >>= qd_ctz128(a);
    do {
        b >>= qd_ctz128(b);
        if (a > b) { u128 t = a; a = b; b = t; }
        b -= a;
        if (!(a >> 64) && !(b >> 64)) return ((u128)qd_gcd64((uint64_t)a, (uint64_t)b)) << s;
    } while (b);
    return a << s;
}

static inline u128 qd_abs128(i128 x) { return x < 0 ? (u128)(-x) : (u128)x; }

static void qd_mpz_set_i128(mpz_t z, i128 v) {
    u128 u = qd_abs128(v);
    mpz_set_ui(z, (unsigned long)(uint64_t)(u >> 64));
    mpz_mul_2exp(z, z, 64);
    mpz_add_ui(z, z, (unsigned long)(uint64_t)u);
    if (v < 0) mpz_neg(z, z);
}

static inline double qd_mpz_log(const mpz_t z) {
    long e;
    double d = mpz_get_d_2exp(&e, z);
    return log(fabs(d)) + (double)e * M_LN2;
}

/* ------------------------------------------------------------------------
 * Rational-map triple screen.
 *
 * For fixed x3 and every ordered pair (x4, x5) from the rational list, build
 * the normalized map with orbit inf -> 1 -> 0 -> x3 -> x4 -> x5, discard
 * degenerate maps and the X_{4,2} chart (phi(x5) = x4), flag preperiodic
 * orbits detected by a repeat among iterates 6..10, and prune with the
 * conservative step-5 test using upper bounds for h(phi) and C.
 * ---------------------------------------------------------------------- */

typedef struct {
    int64_t total, degenerate, x42, preperiodic, pruned, survivors;
} qd_rat_stats;

/* monomial tables (exponents of x3, x4, x5 and coefficient) */
typedef struct { int e3, e4, e5, c; } qd_mono;

static const qd_mono QD_A1[] = {{2,2,0,1},{2,1,1,-1},{2,1,0,-1},{1,1,1,2},{0,2,1,-1}};
static const qd_mono QD_A0[] = {{3,2,1,-1},{3,1,1,1},{2,3,1,1},{2,3,0,-1},{2,2,0,1},{2,1,1,-1}};
static const qd_mono QD_B1[] = {{3,2,0,-1},{3,1,0,2},{3,0,0,-1},{2,2,1,1},{2,2,0,-1},{2,1,1,-1},
                                {2,0,1,1},{2,0,0,1},{1,2,1,-1},{1,2,0,1},{1,1,0,-1},{1,0,1,-1},
                                {0,3,1,1},{0,3,0,-1},{0,2,0,1}};
static const qd_mono QD_B0[] = {{2,2,1,1},{2,1,1,-1},{1,3,1,-1},{1,3,0,1},{1,2,0,-1},{1,1,1,1}};

static i128 qd_eval_monos(const qd_mono *m, int n, const i128 *P3, const i128 *P4, const i128 *P5) {
    i128 s = 0;
    for (int i = 0; i < n; i++) s += (i128)m[i].c * P3[m[i].e3] * P4[m[i].e4] * P5[m[i].e5];
    return s;
}

/* coefficients (a1, a0, b1, b0) cleared by q3^3 q4^3 q5 and content-reduced */
static void qd_triple_coeffs(int64_t p3, int64_t q3, int64_t p4, int64_t q4, int64_t p5, int64_t q5, i128 *out) {
    i128 P3[4], P4[4], P5[2];
    for (int i = 0; i <= 3; i++) {
        i128 v = 1, w = 1;
        for (int j = 0; j < i; j++) v *= p3;
        for (int j = i; j < 3; j++) v *= q3;
        P3[i] = v;
        for (int j = 0; j < i; j++) w *= p4;
        for (int j = i; j < 3; j++) w *= q4;
        P4[i] = w;
    }
    P5[0] = q5; P5[1] = p5;
    out[0] = qd_eval_monos(QD_A1, 5, P3, P4, P5);
    out[1] = qd_eval_monos(QD_A0, 6, P3, P4, P5);
    out[2] = qd_eval_monos(QD_B1, 15, P3, P4, P5);
    out[3] = qd_eval_monos(QD_B0, 6, P3, P4, P5);
    u128 g = 0;
    for (int i = 0; i < 4; i++) g = qd_gcd128(g, qd_abs128(out[i]));
    if (g > 1)
        for (int i = 0; i < 4; i++) out[i] /= (i128)g;
}

/* |x| upper bound for a double computed from exact integers with n roundings */
static inline double qd_up(double x, double mag, int n) {
    return fabs(x) + mag * (double)n * 2.3e-16;
}

/* 3x3 determinant in doubles with an absolute error bound */
static double qd_det3_up(const double m[3][3]) {
    double t[6];
    t[0] = m[0][0] * m[1][1] * m[2][2];
    t[1] = -m[0][0] * m[1][2] * m[2][1];
    t[2] = -m[0][1] * m[1][0] * m[2][2];
    t[3] = m[0][1] * m[1][2] * m[2][0];
    t[4] = m[0][2] * m[1][0] * m[2][1];
    t[5] = -m[0][2] * m[1][1] * m[2][0];
    double s = 0, mag = 0;
    for (int i = 0; i < 6; i++) { s += t[i]; mag += fabs(t[i]); }
    return qd_up(s, mag, 12);
}

/* upper bound for log K, K the adjugate constant of the Sylvester matrix */
static double qd_log_k_up(const double F[3], const double G[3]) {
    double S[4][4] = {{F[0], 0, G[0], 0}, {F[1], F[0], G[1], G[0]},
                      {F[2], F[1], G[2], G[1]}, {0, F[2], 0, G[2]}};
    double best = 0;
    int rows[2] = {0, 3};
    for (int rk = 0; rk < 2; rk++) {
        int k = rows[rk];
        double sum = 0;
        for (int j = 0; j < 4; j++) {
            double m[3][3];
            int ri = 0;
            for (int r = 0; r < 4; r++) {
                if (r == k) continue;
                int ci = 0;
                for (int c = 0; c < 4; c++) {
                    if (c == j) continue;
                    m[ri][ci++] = S[r][c];
                }
                ri++;
            }
            sum += qd_det3_up(m);
        }
        if (sum > best) best = sum;
    }
    return log(best * (1 + 1e-12));
}

/* upper bound for h(phi) = log max(|c1|,|c2|,|c3|)/gcd from the fixed-point
 * multiplier polynomial coefficients, without the gcd */
static double qd_hphi_up(const double F[3], const double G[3]) {
    double a = F[0], b = F[1], c = F[2], d = G[0], e = G[1], f = G[2];
    double t3[] = {a*a*f*f, -a*b*e*f, -2*a*c*d*f, a*c*e*e, b*b*d*f, -b*c*d*e, c*c*d*d};
    double t2[] = {-4*a*a*c*e, -2*a*a*f*f, a*b*b*e, 4*a*b*c*d, -4*a*c*d*f, 2*a*c*e*e, -b*b*b*d,
                   2*b*b*d*f, -4*b*c*d*e, -4*b*d*f*f, b*e*e*f, 6*c*c*d*d, 4*c*d*e*f, -c*e*e*e};
    double t1[] = {4*a*a*a*c, -a*a*b*b, 2*a*a*b*f, -4*a*a*c*e, 10*a*b*c*d, -a*b*e*f, -4*a*c*d*f,
                   5*a*c*e*e, 2*a*e*f*f, -2*b*b*b*d, 5*b*b*d*f, -b*b*e*e, -7*b*c*d*e, -4*b*d*f*f,
                   12*c*c*d*d, 10*c*d*e*f, -2*c*e*e*e, 4*d*f*f*f, -e*e*f*f};
    double best = 0;
    const double *ts[3] = {t3, t2, t1};
    int ns[3] = {7, 14, 19};
    for (int k = 0; k < 3; k++) {
        double s = 0, mag = 0;
        for (int i = 0; i < ns[k]; i++) { s += ts[k][i]; mag += fabs(ts[k][i]); }
        double u = qd_up(s, mag, 2 * ns[k] + 8);
        if (u > best) best = u;
    }
    return log(best * (1 + 1e-12));
}

typedef struct {
    mpz_t a[11], b[11];
    mpz_t F[3], G[3];
    mpz_t A, B, t, g;
} qd_rat_work;

static void qd_rat_work_init(qd_rat_work *w) {
    for (int i = 0; i < 11; i++) { mpz_init(w->a[i]); mpz_init(w->b[i]); }
    for (int i = 0; i < 3; i++) { mpz_init(w->F[i]); mpz_init(w->G[i]); }
    mpz_init(w->A); mpz_init(w->B); mpz_init(w->t); mpz_init(w->g);
}

static void qd_rat_work_clear(qd_rat_work *w) {
    for (int i = 0; i < 11; i++) { mpz_clear(w->a[i]); mpz_clear(w->b[i]); }
    for (int i = 0; i < 3; i++) { mpz_clear(w->F[i]); mpz_clear(w->G[i]); }
    mpz_clear(w->A); mpz_clear(w->B); mpz_clear(w->t); mpz_clear(w->g);
}

/* point i+1 = phi(point i), reduced with b >= 0 */
static void qd_rat_step(qd_rat_work *w, int i) {
    mpz_t *a = &w->a[i], *b = &w->b[i];
    /* A = F0 a^2 + F1 a b + F2 b^2 via t */
    mpz_mul(w->t, *a, *a);
    mpz_mul(w->A, w->F[0], w->t);
    mpz_mul(w->B, w->G[0], w->t);
    mpz_mul(w->t, *a, *b);
    mpz_addmul(w->A, w->F[1], w->t);
    mpz_addmul(w->B, w->G[1], w->t);
    mpz_mul(w->t, *b, *b);
    mpz_addmul(w->A, w->F[2], w->t);
    mpz_addmul(w->B, w->G[2], w->t);
    mpz_gcd(w->g, w->A, w->B);
    if (mpz_cmp_ui(w->g, 1) != 0) {
        mpz_divexact(w->A, w->A, w->g);
        mpz_divexact(w->B, w->B, w->g);
    }
    int sb = mpz_sgn(w->B);
    if (sb < 0 || (sb == 0 && mpz_sgn(w->A) < 0)) {
        mpz_neg(w->A, w->A);
        mpz_neg(w->B, w->B);
    }
    mpz_set(w->a[i + 1], w->A);
    mpz_set(w->b[i + 1], w->B);
}

static inline double qd_point_height(qd_rat_work *w, int i) {
    int c = mpz_cmpabs(w->a[i], w->b[i]);
    return qd_mpz_log(c >= 0 ? w->a[i] : w->b[i]);
}

/* code: 0 survivor, 1 preperiodic.  Returns number of records written or -1
 * if the output buffer is too small. */
static int64_t qd_rat_screen(int64_t p3, int64_t q3, int64_t n, const int64_t *nums, const int64_t *dens,
                             double ratio, double margin, int32_t *o4, int32_t *o5, int8_t *ocode,
                             int64_t cap, qd_rat_stats *st) {
    qd_rat_work w;
    qd_rat_work_init(&w);
    int64_t len = 0;
    i128 co[4];
    for (int64_t i4 = 0; i4 < n; i4++) {
        int64_t p4 = nums[i4], q4 = dens[i4];
        if (p4 == p3 && q4 == q3) continue;
        for (int64_t i5 = 0; i5 < n; i5++) {
            int64_t p5 = nums[i5], q5 = dens[i5];
            if (i5 == i4 || (p5 == p3 && q5 == q3)) continue;
            st->total++;
            qd_triple_coeffs(p3, q3, p4, q4, p5, q5, co);
            i128 a1 = co[0], a0 = co[1], b1 = co[2], b0 = co[3];
            if (a1 == 0 || a1 + b1 + b0 == 0 || a0 * a0 - a0 * b1 + a1 * b0 == 0) {
                st->degenerate++;
                continue;
            }
            /* F = (a1, a0 - a1, -a0), G = (a1, b1, b0) */
            qd_mpz_set_i128(w.F[0], a1);
            qd_mpz_set_i128(w.F[1], a0 - a1);
            qd_mpz_set_i128(w.F[2], -a0);
            qd_mpz_set_i128(w.G[0], a1);
            qd_mpz_set_i128(w.G[1], b1);
            qd_mpz_set_i128(w.G[2], b0);
            mpz_set_ui(w.a[0], 1); mpz_set_ui(w.b[0], 0);
            mpz_set_ui(w.a[1], 1); mpz_set_ui(w.b[1], 1);
            mpz_set_ui(w.a[2], 0); mpz_set_ui(w.b[2], 1);
            mpz_set_si(w.a[3], p3); mpz_set_si(w.b[3], q3);
            mpz_set_si(w.a[4], p4); mpz_set_si(w.b[4], q4);
            mpz_set_si(w.a[5], p5); mpz_set_si(w.b[5], q5);
            int code = -1;  /* -1 undecided, 0 survivor, 1 preperiodic, 2 x42, 3 pruned */
            double hup = 0, cup = 0;
            for (int i = 5; i < 10 && code < 0; i++) {
                qd_rat_step(&w, i);
                int j;
                for (j = 0; j <= i; j++)
                    if (mpz_cmp(w.a[i + 1], w.a[j]) == 0 && mpz_cmp(w.b[i + 1], w.b[j]) == 0) break;
                if (j <= i) {
                    code = (i + 1 == 6 && j == 4) ? 2 : 1;
                    break;
                }
                if (i + 1 == 7) {
                    double Fd[3] = {(double)a1, (double)(a0 - a1), (double)(-a0)};
                    double Gd[3] = {(double)a1, (double)b1, (double)b0};
                    hup = qd_hphi_up(Fd, Gd);
                    cup = qd_log_k_up(Fd, Gd);
                }
                if (i + 1 == 8 || i + 1 == 10) {
                    double h = qd_point_height(&w, i + 1);
                    if (h >= ldexp(ratio * hup, i + 1) + cup + margin) code = 3;
                }
            }
            if (code < 0) code = 0;
            if (code == 2) { st->x42++; continue; }
            if (code == 3) { st->pruned++; continue; }
            if (code == 1) st->preperiodic++; else st->survivors++;
            if (len >= cap) { qd_rat_work_clear(&w); return -1; }
            o4[len] = (int32_t)i4;
            o5[len] = (int32_t)i5;
            ocode[len] = (int8_t)code;
            len++;
        }
    }
    qd_rat_work_clear(&w);
    return len;
}

/* ------------------------------------------------------------------------
 * Quadratic polynomial screen for a fixed denominator n.
 * Emits (m, k, a) with x = a/n passing: no repeat among iterates 0..4 and,
 * when den_prune is set, denominators of iterates 1..3 at most n.
 * ---------------------------------------------------------------------- */

typedef struct { int64_t ks, xs, repeats, denoms, survivors; } qd_poly_stats;

static inline i128 qd_floor_div(i128 a, i128 b) {
    i128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) q--;
    return q;
}

static inline int64_t qd_gcd_signed(int64_t a, int64_t b) {
    return (int64_t)qd_gcd64(a < 0 ? -(uint64_t)a : (uint64_t)a, b < 0 ? -(uint64_t)b : (uint64_t)b);
}

static int64_t qd_poly_screen(int64_t n, int64_t Nmax, int den_prune, int64_t *om, int64_t *ok, int64_t *oa,
                              int64_t cap, qd_poly_stats *st) {
    int64_t len = 0;
    i128 n2 = (i128)n * n;
    for (int64_t m = 1; m <= n; m++) {
        if (qd_gcd_signed(m, n) != 1) continue;
        /* largest k < -3n^2/4 with k = -m^2 (mod n) */
        i128 kmax = qd_floor_div(-3 * n2 - 1, 4);
        int64_t r = (int64_t)(((-(i128)m * m) % n + n) % n);
        i128 k = kmax - (((kmax - r) % n + n) % n);
        for (; k >= -(i128)Nmax * n2; k -= n) {
            st->ks++;
            int cbig = (k < -2 * n2);  /* c < -2 */
            for (int64_t a = m;; a += n) {
                /* x in (0, 2] when c >= -2, else sqrt(-c-B) <= x <= B */
                if (!cbig) {
                    if ((i128)a > 2 * (i128)n) break;
                } else {
                    i128 t = 2 * (i128)a - n;
                    if (t > 0 && t * t > n2 - 4 * k) break;
                    i128 W = -((i128)a * a + k);
                    i128 u = 2 * W - n2;
                    if (u > 0 && (n2 - 4 * k) * n2 < u * u) continue;
                }
                /* the numerator of phi(x) over n must be prime to n; this
                 * depends on a itself, not only on a mod n */
                i128 q = (k + (i128)a * a) / n;
                if (qd_gcd_signed(n, (int64_t)(q % n)) != 1) continue;
                st->xs++;
                i128 pa[5], pb[5];
                pa[0] = a; pb[0] = n;
                int bad = 0;
                for (int i = 1; i <= 4 && !bad; i++) {
                    i128 u = pa[i - 1], v = pb[i - 1];
                    i128 A = u * u * n2 + k * v * v, B = v * v * n2;
                    u128 g = qd_gcd128(qd_abs128(A), (u128)B);
                    A /= (i128)g; B /= (i128)g;
                    pa[i] = A; pb[i] = B;
                    for (int j = 0; j < i; j++)
                        if (pa[j] == A && pb[j] == B) { bad = 1; st->repeats++; break; }
                    if (!bad && den_prune && i <= 3 && B > n) { bad = 1; st->denoms++; }
                }
                if (bad) continue;
                st->survivors++;
                if (len >= cap) return -1;
                om[len] = m; ok[len] = (int64_t)k; oa[len] = a;
                len++;
            }
        }
    }
    return len;
}

/* ------------------------------------------------------------------------
 * Bounded-height preperiodic scan.
 *
 * Every preperiodic point y satisfies h(y) <= C, so an orbit is abandoned as
 * soon as an iterate exceeds the integer bound MC >= exp(C).  For a coprime
 * pair the gcd of the form values divides R, so it is assembled from the
 * primes of R by exact divisibility tests.  Orbits that would overflow 128-bit
 * arithmetic are returned as undecided for the caller to finish.
 * ---------------------------------------------------------------------- */

typedef struct { int64_t points, pruned, found, undecided, open; } qd_scan_stats;

typedef struct {
    int np;
    uint64_t p[64];
    int e[64];
} qd_primes;

/* odd-prime divisibility by multiplication: x % p == 0 iff x * inv <= lim */
typedef struct {
    int np;
    int twos;  /* exponent cap for p = 2, or -1 if 2 is absent */
    uint64_t p[64], inv[64], lim[64];
    u128 inv2[64], lim2[64];
    int e[64];
    u128 gmax;  /* product of p^e, or 0 when it does not fit */
} qd_divtab;

static void qd_divtab_init(qd_divtab *t, const qd_primes *pr) {
    t->np = 0;
    t->twos = -1;
    t->gmax = 1;
    for (int i = 0; i < pr->np; i++) {
        uint64_t p = pr->p[i];
        for (int v = 0; v < pr->e[i] && t->gmax; v++) {
            if (t->gmax > ((u128)1 << 100) / p) t->gmax = 0;
            else t->gmax *= p;
        }
        if (p == 2) { t->twos = pr->e[i]; continue; }
        uint64_t inv = p;  /* Newton iteration for p^-1 mod 2^64 */
        for (int k = 0; k < 6; k++) inv *= 2 - p * inv;
        t->p[t->np] = p;
        t->inv[t->np] = inv;
        t->lim[t->np] = UINT64_MAX / p;
        u128 inv2 = p;
        for (int k = 0; k < 7; k++) inv2 *= 2 - (u128)p * inv2;
        t->inv2[t->np] = inv2;
        t->lim2[t->np] = ~(u128)0 / p;
        t->e[t->np] = pr->e[i];
        t->np++;
    }
}

static inline void qd_strip64(uint64_t *A, uint64_t *B, const qd_divtab *t) {
    if (t->twos > 0) {
        int z = __builtin_ctzll(*A | *B | ((uint64_t)1 << 63));
        if (z > t->twos) z = t->twos;
        *A >>= z; *B >>= z;
    }
    for (int i = 0; i < t->np; i++) {
        uint64_t inv = t->inv[i], lim = t->lim[i];
        for (int v = 0; v < t->e[i]; v++) {
            uint64_t qa = *A * inv, qb = *B * inv;
            if (qa > lim || qb > lim) break;
            *A = qa; *B = qb;
        }
    }
}

static inline void qd_strip128(u128 *A, u128 *B, const qd_divtab *t) {
    if (t->twos > 0) {
        int z = qd_ctz128(*A | *B | ((u128)1 << 127));
        if (z > t->twos) z = t->twos;
        *A >>= z; *B >>= z;
    }
    for (int i = 0; i < t->np; i++) {
        u128 inv = t->inv2[i], lim = t->lim2[i];
        for (int v = 0; v < t->e[i]; v++) {
            u128 qa = *A * inv, qb = *B * inv;
            if (qa > lim || qb > lim) break;
            *A = qa; *B = qb;
        }
    }
}

/* One step on a coprime pair.  Returns 1 if the image provably has
 * max(|a|,|b|) > MC (then na, nb are not set), else 0. */
static inline int qd_step128(const i128 *F, const i128 *G, i128 a, i128 b, i128 *na, i128 *nb,
                             const qd_divtab *t, int exact_gcd, u128 MC, u128 MCg) {
    i128 A = F[0] * a * a + F[1] * a * b + F[2] * b * b;
    i128 B = G[0] * a * a + G[1] * a * b + G[2] * b * b;
    u128 uA = qd_abs128(A), uB = qd_abs128(B);
    u128 mx = uA > uB ? uA : uB;
    if (MCg && mx > MCg) return 1;
    if (exact_gcd) {
        u128 g = qd_gcd128(uA, uB);
        if (g > 1) { uA /= g; uB /= g; }
    } else if ((uA >> 64) == 0 && (uB >> 64) == 0) {
        uint64_t a64 = (uint64_t)uA, b64 = (uint64_t)uB;
        qd_strip64(&a64, &b64, t);
        uA = a64; uB = b64;
    } else {
        qd_strip128(&uA, &uB, t);
    }
    if ((uA > uB ? uA : uB) > MC) return 1;
    int neg = (B < 0) || (B == 0 && A < 0);
    i128 rA = (A < 0) ? -(i128)uA : (i128)uA;
    i128 rB = (B < 0) ? -(i128)uB : (i128)uB;
    if (neg) { rA = -rA; rB = -rB; }
    *na = rA; *nb = rB;
    return 0;
}

#define QD_ROOT_PMAX 1000000

/* Follow the orbit of a coprime (a, b).  Returns 1 found, 2 pruned,
 * 3 undecided (128-bit overflow risk), 4 open (max_iter reached). */
static int qd_orbit128(const i128 *F, const i128 *G, i128 a, i128 b, const qd_divtab *tab, int exact_gcd,
                       u128 MC, u128 MCg, u128 lim, int max_iter, i128 *oa, i128 *ob) {
    oa[0] = a; ob[0] = b;
    int len = 1;
    for (;;) {
        i128 ca = oa[len - 1], cb = ob[len - 1];
        if (qd_abs128(ca) > lim || qd_abs128(cb) > lim) return 3;
        i128 na, nb;
        if (qd_step128(F, G, ca, cb, &na, &nb, tab, exact_gcd, MC, MCg)) return 2;
        for (int j = 0; j < len; j++)
            if (oa[j] == na && ob[j] == nb) return 1;
        oa[len] = na; ob[len] = nb; len++;
        if (len > max_iter) return 4;
    }
}

static int64_t qd_preper_scan(const int64_t *F64, const int64_t *G64, int64_t H, uint64_t MC, const qd_primes *pr,
                              int exact_gcd, int max_iter, int64_t *fa, int64_t *fb, int64_t fcap, int64_t *nfound,
                              int64_t *ua, int64_t *ub, int64_t ucap, int64_t *nund, qd_scan_stats *st) {
    i128 F[3] = {F64[0], F64[1], F64[2]}, G[3] = {G64[0], G64[1], G64[2]};
    u128 coefsum = 0;
    for (int i = 0; i < 3; i++) {
        u128 s1 = qd_abs128(F[i]), s2 = qd_abs128(G[i]);
        coefsum += s1 > s2 ? s1 : s2;
    }
    coefsum *= 3;
    /* an iterate with |a|,|b| <= lim keeps the next step inside 127 bits */
    u128 lim = 1;
    while ((lim * 2) * (lim * 2) <= ((u128)1 << 124) / coefsum) lim *= 2;
    qd_divtab tab;
    qd_divtab_init(&tab, pr);
    u128 MCg = 0;
    if (!exact_gcd && tab.gmax && (u128)MC < ((u128)1 << 126) / tab.gmax) MCg = (u128)MC * tab.gmax;

    /* Common roots t of F(t, 1) and G(t, 1) mod p for the primes of R: a
     * grid point (a, b) with p not dividing b has p | gcd only if a = t b mod p.
     * Primes above QD_ROOT_PMAX force the full strip at every point. */
    int nroot = 0, always = 0;
    uint64_t rp[64];
    int64_t rt[64][2];
    int rn[64], rinf[64];
    uint64_t rpe[64];
    for (int i = 0; i < pr->np && !exact_gcd; i++) {
        uint64_t p = pr->p[i];
        if (p > QD_ROOT_PMAX) { always = 1; continue; }
        int cnt = 0;
        for (uint64_t t = 0; t < p; t++) {
            i128 tt = (i128)t;
            if ((F[0] * tt * tt + F[1] * tt + F[2]) % (i128)p == 0 &&
                (G[0] * tt * tt + G[1] * tt + G[2]) % (i128)p == 0) {
                if (cnt < 2) rt[nroot][cnt] = (int64_t)t;
                cnt++;
            }
        }
        if (cnt > 2) { always = 1; continue; }
        rinf[nroot] = (F[0] % (i128)p == 0 && G[0] % (i128)p == 0);  /* rows with p | b */
        rp[nroot] = p;
        rn[nroot] = cnt;
        rpe[nroot] = 1;
        for (int k = 0; k < pr->e[i]; k++) rpe[nroot] *= p;
        nroot++;
    }
    /* grid points with |a|, |b| <= H need no 128-bit arithmetic in step 1 */
    int small = (u128)H * (u128)H <= ((u128)1 << 62) / coefsum;

    int64_t nf = 0, nu = 0;
    size_t width = (size_t)(2 * H + 1);
    char *sieve = (char *)malloc(width);
    /* per-point upper bound for the gcd after one step */
    uint64_t *flag = (uint64_t *)malloc(width * sizeof(uint64_t));
    i128 *oa = (i128 *)malloc(sizeof(i128) * (max_iter + 1));
    i128 *ob = (i128 *)malloc(sizeof(i128) * (max_iter + 1));
    if (!sieve || !flag || !oa || !ob) { free(sieve); free(flag); free(oa); free(ob); return -2; }

    for (int64_t b = 0; b <= H; b++) {
        if (b == 0) {
            memset(sieve, 0, width);
            sieve[H + 1] = 1;  /* only (1:0) */
        } else {
            memset(sieve, 1, width);
            int64_t r = b;
            for (int64_t q = 2; q * q <= r; q++) {
                if (r % q) continue;
                while (r % q == 0) r /= q;
                for (int64_t x = -(H / q) * q; x <= H; x += q) sieve[x + H] = 0;
            }
            if (r > 1)
                for (int64_t x = -(H / r) * r; x <= H; x += r) sieve[x + H] = 0;
            if (b > 1) sieve[H] = 0;  /* a = 0 needs b = 1 */
        }
        int row_all = exact_gcd || always || tab.gmax == 0 || tab.gmax >= ((u128)1 << 63);
        if (!row_all) {
            for (size_t x = 0; x < width; x++) flag[x] = 1;
            for (int i = 0; i < nroot; i++) {
                int64_t p = (int64_t)rp[i];
                uint64_t pe = rpe[i];
                if (b % p == 0) {
                    if (rinf[i])
                        for (size_t x = 0; x < width; x++) flag[x] *= pe;
                    continue;
                }
                for (int j = 0; j < rn[i]; j++) {
                    int64_t r = (int64_t)(((i128)rt[i][j] * b) % p);
                    int64_t a0 = -H + (((r + H) % p) + p) % p;  /* least a >= -H, a = r mod p */
                    for (int64_t x = a0; x <= H; x += p) flag[x + H] *= pe;
                }
            }
        }
        int fast = small && b > 0 && !exact_gcd;
        /* A(a) = F0 a^2 + F1 a b + F2 b^2 by finite differences along the row */
        int64_t A = 0, B = 0, dA = 0, dB = 0, ddA = 0, ddB = 0;
        if (fast) {
            int64_t a = -H;
            A = F64[0] * a * a + F64[1] * a * b + F64[2] * b * b;
            B = G64[0] * a * a + G64[1] * a * b + G64[2] * b * b;
            dA = F64[0] * (2 * a + 1) + F64[1] * b;
            dB = G64[0] * (2 * a + 1) + G64[1] * b;
            ddA = 2 * F64[0];
            ddB = 2 * G64[0];
        }
        for (int64_t a = -H; a <= H; a++) {
            if (sieve[a + H]) {
                st->points++;
                int status = 0;
                if (fast) {
                    uint64_t uA = A < 0 ? -(uint64_t)A : (uint64_t)A;
                    uint64_t uB = B < 0 ? -(uint64_t)B : (uint64_t)B;
                    if (row_all) {
                        qd_strip64(&uA, &uB, &tab);
                        if ((uA > uB ? uA : uB) > MC) status = 2;
                    } else if ((u128)(uA > uB ? uA : uB) > (u128)MC * flag[a + H]) {
                        status = 2;
                    }
                }
                if (!status)
                    status = qd_orbit128(F, G, a, b, &tab, exact_gcd, (u128)MC, MCg, lim, max_iter, oa, ob);
                if (status == 1) {
                    st->found++;
                    if (nf < fcap) { fa[nf] = a; fb[nf] = b; }
                    nf++;
                } else if (status == 2) {
                    st->pruned++;
                } else {
                    /* overflow risk or an unclosed bounded orbit: the caller finishes it */
                    if (status == 3) st->undecided++; else st->open++;
                    if (nu < ucap) { ua[nu] = a; ub[nu] = b; }
                    nu++;
                }
            }
            if (fast) {
                A += dA; dA += ddA;
                B += dB; dB += ddB;
            }
        }
    }
    free(sieve); free(flag); free(oa); free(ob);
    *nfound = nf;
    *nund = nu;
    return 0;
}

#endif
