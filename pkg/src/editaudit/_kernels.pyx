# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernels: filter evaluation, bucket classification, revert
detection, and sampling keys. Twin of ``_pykernels`` — same signatures,
same results."""

import numpy as np

from libc.stdint cimport int64_t, uint64_t, uint8_t

BACKEND_NAME = "compiled"

cdef uint64_t MIX_A = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX_B = 0x94D049BB133111EBULL
cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t mix64(uint64_t x) nogil:
    x ^= x >> 30
    x *= MIX_A
    x ^= x >> 27
    x *= MIX_B
    x ^= x >> 31
    return x


def sample_keys(rev_ids, seed):
    cdef uint64_t[::1] ids = np.ascontiguousarray(rev_ids, dtype=np.uint64)
    cdef Py_ssize_t n = ids.shape[0]
    out_arr = np.empty(n, dtype=np.uint64)
    cdef uint64_t[::1] out = out_arr
    cdef uint64_t seed_mix = mix64((<uint64_t> (seed & 0xFFFFFFFFFFFFFFFF)) ^ GOLDEN)
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = mix64(ids[i] ^ seed_mix)
    return out_arr


def bucket_codes(probs, reverted, double threshold):
    cdef double[::1] p = np.ascontiguousarray(probs, dtype=np.float64)
    cdef uint8_t[::1] rev = np.ascontiguousarray(reverted, dtype=np.uint8)
    cdef Py_ssize_t n = p.shape[0]
    out_arr = np.empty(n, dtype=np.uint8)
    cdef uint8_t[::1] out = out_arr
    cdef Py_ssize_t i
    cdef bint predicted
    for i in range(n):
        predicted = p[i] >= threshold
        if rev[i]:
            out[i] = 2 if predicted else 0
        else:
            out[i] = 1 if predicted else 3
    return out_arr


def masked_bucket_counts(codes, mask):
    cdef uint8_t[::1] c = np.ascontiguousarray(codes, dtype=np.uint8)
    cdef uint8_t[::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    counts_arr = np.zeros(4, dtype=np.int64)
    cdef int64_t[::1] counts = counts_arr
    cdef Py_ssize_t i, n = c.shape[0]
    for i in range(n):
        if m[i]:
            counts[c[i]] += 1
    return counts_arr


def filter_mask(
    namespace,
    page_size,
    byte_delta,
    is_minor,
    registered,
    bot,
    edit_count,
    account_age,
    int has_namespaces,
    ns_values,
    int64_t page_size_lo,
    int64_t page_size_hi,
    int64_t abs_delta_lo,
    int64_t abs_delta_hi,
    int minor_tri,
    int registered_tri,
    int bot_tri,
    int64_t edit_count_lo,
    int64_t edit_count_hi,
    int64_t account_age_lo,
    int64_t account_age_hi,
):
    cdef int64_t[::1] ns = np.ascontiguousarray(namespace, dtype=np.int64)
    cdef int64_t[::1] size = np.ascontiguousarray(page_size, dtype=np.int64)
    cdef int64_t[::1] delta = np.ascontiguousarray(byte_delta, dtype=np.int64)
    cdef uint8_t[::1] minor = np.ascontiguousarray(is_minor, dtype=np.uint8)
    cdef uint8_t[::1] reg = np.ascontiguousarray(registered, dtype=np.uint8)
    cdef uint8_t[::1] bt = np.ascontiguousarray(bot, dtype=np.uint8)
    cdef int64_t[::1] count = np.ascontiguousarray(edit_count, dtype=np.int64)
    cdef int64_t[::1] age = np.ascontiguousarray(account_age, dtype=np.int64)
    cdef int64_t[::1] nsv = np.ascontiguousarray(ns_values, dtype=np.int64)
    cdef Py_ssize_t n = ns.shape[0], n_ns = nsv.shape[0]
    out_arr = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[::1] out = out_arr
    cdef Py_ssize_t i, k
    cdef int64_t ad
    cdef bint ok
    for i in range(n):
        if has_namespaces:
            ok = False
            for k in range(n_ns):
                if ns[i] == nsv[k]:
                    ok = True
                    break
            if not ok:
                continue
        if size[i] < page_size_lo or size[i] > page_size_hi:
            continue
        ad = delta[i] if delta[i] >= 0 else -delta[i]
        if ad < abs_delta_lo or ad > abs_delta_hi:
            continue
        if minor_tri >= 0 and minor[i] != minor_tri:
            continue
        if registered_tri >= 0 and reg[i] != registered_tri:
            continue
        if bot_tri >= 0 and bt[i] != bot_tri:
            continue
        if count[i] < edit_count_lo or count[i] > edit_count_hi:
            continue
        if age[i] < account_age_lo or age[i] > account_age_hi:
            continue
        out[i] = 1
    return out_arr


def detect_reverts_scan(hash_codes, timestamps, editor_codes, int radius, int64_t window, int count_self):
    cdef int64_t[::1] h = np.ascontiguousarray(hash_codes, dtype=np.int64)
    cdef int64_t[::1] ts = np.ascontiguousarray(timestamps, dtype=np.int64)
    cdef int64_t[::1] ed = np.ascontiguousarray(editor_codes, dtype=np.int64)
    cdef Py_ssize_t n = h.shape[0]
    reverted_arr = np.zeros(n, dtype=np.uint8)
    reverting_arr = np.full(n, -1, dtype=np.int64)
    seconds_arr = np.full(n, -1, dtype=np.int64)
    self_arr = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[::1] reverted = reverted_arr
    cdef int64_t[::1] reverting = reverting_arr
    cdef int64_t[::1] seconds = seconds_arr
    cdef uint8_t[::1] selfrev = self_arr

    # Hash codes arrive factorized to [0, n); last occurrence per code.
    cdef int64_t n_codes = 0
    cdef Py_ssize_t i
    for i in range(n):
        if h[i] >= n_codes:
            n_codes = h[i] + 1
    last_arr = np.full(n_codes, -1, dtype=np.int64)
    cdef int64_t[::1] last_seen = last_arr

    cdef Py_ssize_t j, m
    cdef int64_t origin, tj, ej
    for j in range(n):
        origin = last_seen[h[j]]
        if origin >= 0 and j - origin <= radius:
            tj = ts[j]
            ej = ed[j]
            for m in range(origin + 1, j):
                if reverted[m]:
                    continue
                if tj <= ts[m] or tj - ts[m] > window:
                    continue
                if not count_self and ed[m] == ej:
                    continue
                reverted[m] = 1
                reverting[m] = j
                seconds[m] = tj - ts[m]
                selfrev[m] = 1 if ed[m] == ej else 0
        last_seen[h[j]] = j
    return reverted_arr, reverting_arr, seconds_arr, self_arr
