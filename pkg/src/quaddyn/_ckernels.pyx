# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels; see _kernels_impl.h for the loops themselves."""

from libc.stdint cimport int64_t, uint64_t, int32_t, int8_t
from libc.stdlib cimport malloc, free

cdef extern from "_kernels_impl.h":
    ctypedef struct qd_rat_stats:
        int64_t total, degenerate, x42, preperiodic, pruned, survivors
    ctypedef struct qd_poly_stats:
        int64_t ks, xs, repeats, denoms, survivors
    ctypedef struct qd_scan_stats:
        int64_t points, pruned, found, undecided, open
    ctypedef struct qd_primes:
        int np
        uint64_t p[64]
        int e[64]
    int64_t qd_rat_screen(int64_t p3, int64_t q3, int64_t n, const int64_t *nums, const int64_t *dens,
                          double ratio, double margin, int32_t *o4, int32_t *o5, int8_t *ocode,
                          int64_t cap, qd_rat_stats *st) nogil
    int64_t qd_poly_screen(int64_t n, int64_t Nmax, int den_prune, int64_t *om, int64_t *ok, int64_t *oa,
                           int64_t cap, qd_poly_stats *st) nogil
    int64_t qd_preper_scan(const int64_t *F64, const int64_t *G64, int64_t H, uint64_t MC, const qd_primes *pr,
                           int exact_gcd, int max_iter, int64_t *fa, int64_t *fb, int64_t fcap, int64_t *nfound,
                           int64_t *ua, int64_t *ub, int64_t ucap, int64_t *nund, qd_scan_stats *st) nogil

BACKEND = "compiled"


def rat_screen(x3, rats, double ratio, double margin=1e-9):
    """Screen all (x4, x5) for fixed x3.  Returns (records, stats) where each
    record is (i4, i5, code), code 0 = survivor, 1 = preperiodic."""
    cdef int64_t n = len(rats)
    cdef int64_t p3 = x3[0], q3 = x3[1]
    cdef int64_t *nums = <int64_t *>malloc(max(n, 1) * sizeof(int64_t))
    cdef int64_t *dens = <int64_t *>malloc(max(n, 1) * sizeof(int64_t))
    cdef int64_t cap = 1 << 16
    cdef int32_t *o4 = NULL
    cdef int32_t *o5 = NULL
    cdef int8_t *oc = NULL
    cdef qd_rat_stats st
    cdef int64_t length, i
    for i in range(n):
        nums[i] = rats[i][0]
        dens[i] = rats[i][1]
    try:
        while True:
            o4 = <int32_t *>malloc(cap * sizeof(int32_t))
            o5 = <int32_t *>malloc(cap * sizeof(int32_t))
            oc = <int8_t *>malloc(cap * sizeof(int8_t))
            st.total = st.degenerate = st.x42 = st.preperiodic = st.pruned = st.survivors = 0
            with nogil:
                length = qd_rat_screen(p3, q3, n, nums, dens, ratio, margin, o4, o5, oc, cap, &st)
            if length >= 0:
                break
            free(o4); free(o5); free(oc)
            o4 = o5 = NULL
            oc = NULL
            cap *= 8
        out = [(o4[i], o5[i], oc[i]) for i in range(length)]
    finally:
        free(nums); free(dens)
        free(o4); free(o5); free(oc)
    stats = {"total": st.total, "degenerate": st.degenerate, "x42": st.x42,
             "preperiodic": st.preperiodic, "pruned": st.pruned, "survivors": st.survivors}
    return out, stats


def poly_screen(int64_t n, int64_t N_max, bint den_prune=True):
    """Survivors (m, k, a) of the four-iterate screen for denominator n."""
    cdef int64_t cap = 1 << 12
    cdef int64_t *om = NULL
    cdef int64_t *ok = NULL
    cdef int64_t *oa = NULL
    cdef qd_poly_stats st
    cdef int64_t length, i
    try:
        while True:
            om = <int64_t *>malloc(cap * sizeof(int64_t))
            ok = <int64_t *>malloc(cap * sizeof(int64_t))
            oa = <int64_t *>malloc(cap * sizeof(int64_t))
            st.ks = st.xs = st.repeats = st.denoms = st.survivors = 0
            with nogil:
                length = qd_poly_screen(n, N_max, den_prune, om, ok, oa, cap, &st)
            if length >= 0:
                break
            free(om); free(ok); free(oa)
            om = ok = oa = NULL
            cap *= 8
        out = [(om[i], ok[i], oa[i]) for i in range(length)]
    finally:
        free(om); free(ok); free(oa)
    stats = {"ks": st.ks, "xs": st.xs, "repeats": st.repeats, "denoms": st.denoms, "survivors": st.survivors}
    return out, stats


def preper_scan(F, G, int64_t H, MC, primes, int max_iter=50):
    """Points (a, b) with max(|a|,|b|) <= H whose orbit closes within
    max_iter steps, plus undecided points whose orbit outgrew 128 bits.

    ``primes`` lists (p, e) for the primes of the resultant, or None to use
    a full gcd at every step."""
    cdef int64_t F64[3]
    cdef int64_t G64[3]
    cdef qd_primes pr
    cdef qd_scan_stats st
    cdef int64_t fcap = 1 << 12, ucap = 1 << 16, nf = 0, nu = 0
    cdef int64_t *fa = <int64_t *>malloc(fcap * sizeof(int64_t))
    cdef int64_t *fb = <int64_t *>malloc(fcap * sizeof(int64_t))
    cdef int64_t *ua = <int64_t *>malloc(ucap * sizeof(int64_t))
    cdef int64_t *ub = <int64_t *>malloc(ucap * sizeof(int64_t))
    cdef uint64_t mc = MC
    cdef int exact = 1 if primes is None else 0
    cdef int i, rc
    for i in range(3):
        F64[i] = F[i]
        G64[i] = G[i]
    pr.np = 0
    if primes is not None:
        if len(primes) > 64:
            raise ValueError("too many primes")
        for i, (p, e) in enumerate(primes):
            pr.p[i] = p
            pr.e[i] = e
        pr.np = len(primes)
    st.points = st.pruned = st.found = st.undecided = st.open = 0
    try:
        with nogil:
            rc = qd_preper_scan(F64, G64, H, mc, &pr, exact, max_iter, fa, fb, fcap, &nf, ua, ub, ucap, &nu, &st)
        if rc != 0:
            raise MemoryError("scan buffer allocation failed")
        if nf > fcap or nu > ucap:
            raise OverflowError("scan produced more points than the output buffers hold")
        found = [(fa[i], fb[i]) for i in range(nf)]
        undecided = [(ua[i], ub[i]) for i in range(nu)]
    finally:
        free(fa); free(fb); free(ua); free(ub)
    stats = {"points": st.points, "pruned": st.pruned, "found": st.found,
             "undecided": st.undecided, "open": st.open}
    return found, undecided, stats
