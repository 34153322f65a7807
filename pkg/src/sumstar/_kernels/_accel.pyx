# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: instruction-for-instruction mirrors of ``pure``.

Two families live here: bytecode program evaluation over integer boxes,
and the completion search for generators of homogeneous linear systems.
Callers are responsible for only dispatching here when intermediate
values fit in 62 bits (see ``sumstar._kernels``), so plain ``long
long`` arithmetic is exact.
"""

from cpython.bytes cimport PyBytes_FromStringAndSize
from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memcpy

from ..errors import ResourceLimit

name = "compiled"

DEF MAX_STACK = 128
DEF MAX_VARS = 32


cdef long long _run(const long long[::1] code, const long long* env) noexcept nogil:
    cdef long long stack[MAX_STACK]
    cdef Py_ssize_t n = code.shape[0] // 2
    cdef Py_ssize_t sp = 0, i
    cdef long long op, arg, b, r
    for i in range(n):
        op = code[2 * i]
        arg = code[2 * i + 1]
        if op == 0:  # CONST
            stack[sp] = arg
            sp += 1
        elif op == 1:  # VAR
            stack[sp] = env[arg]
            sp += 1
        elif op == 2:  # ADD
            sp -= 1
            stack[sp - 1] = stack[sp - 1] + stack[sp]
        elif op == 3:  # MULC
            stack[sp - 1] = stack[sp - 1] * arg
        elif op == 4:  # EQ
            sp -= 1
            stack[sp - 1] = 1 if stack[sp - 1] == stack[sp] else 0
        elif op == 5:  # LE
            sp -= 1
            stack[sp - 1] = 1 if stack[sp - 1] <= stack[sp] else 0
        elif op == 6:  # LT
            sp -= 1
            stack[sp - 1] = 1 if stack[sp - 1] < stack[sp] else 0
        elif op == 7:  # GE
            sp -= 1
            stack[sp - 1] = 1 if stack[sp - 1] >= stack[sp] else 0
        elif op == 8:  # GT
            sp -= 1
            stack[sp - 1] = 1 if stack[sp - 1] > stack[sp] else 0
        elif op == 9:  # MOD
            sp -= 1
            r = (stack[sp - 1] - stack[sp]) % arg
            if r < 0:
                r += arg
            stack[sp - 1] = 1 if r == 0 else 0
        elif op == 10:  # NOT
            stack[sp - 1] = 0 if stack[sp - 1] else 1
        elif op == 11:  # AND
            sp -= 1
            stack[sp - 1] = 1 if (stack[sp - 1] and stack[sp]) else 0
        else:  # OR
            sp -= 1
            stack[sp - 1] = 1 if (stack[sp - 1] or stack[sp]) else 0
    return stack[sp - 1]


cdef bint _advance(long long* env, const long long[::1] lows, const long long[::1] highs,
                   Py_ssize_t nvars) noexcept nogil:
    """Odometer step in lexicographic order; false when exhausted."""
    cdef Py_ssize_t j = nvars - 1
    while j >= 0:
        if env[j] < highs[j]:
            env[j] += 1
            return True
        env[j] = lows[j]
        j -= 1
    return False


def run_program(const long long[::1] code, const long long[::1] env):
    cdef long long buf[MAX_VARS]
    cdef Py_ssize_t i
    for i in range(env.shape[0]):
        buf[i] = env[i]
    return int(_run(code, buf))


def search_product(const long long[::1] code, const long long[::1] lows,
                   const long long[::1] highs):
    cdef Py_ssize_t nvars = lows.shape[0]
    cdef long long env[MAX_VARS]
    cdef Py_ssize_t i
    cdef bint found = False
    if nvars == 0:
        return () if _run(code, env) else None
    for i in range(nvars):
        if lows[i] > highs[i]:
            return None
        env[i] = lows[i]
    with nogil:
        while True:
            if _run(code, env):
                found = True
                break
            if not _advance(env, lows, highs, nvars):
                break
    if not found:
        return None
    return tuple(env[i] for i in range(nvars))


def first_diff(const long long[::1] code_a, const long long[::1] code_b,
               const long long[::1] lows, const long long[::1] highs):
    cdef Py_ssize_t nvars = lows.shape[0]
    cdef long long env[MAX_VARS]
    cdef Py_ssize_t i
    cdef bint found = False
    if nvars == 0:
        return () if (_run(code_a, env) != 0) != (_run(code_b, env) != 0) else None
    for i in range(nvars):
        if lows[i] > highs[i]:
            return None
        env[i] = lows[i]
    with nogil:
        while True:
            if (_run(code_a, env) != 0) != (_run(code_b, env) != 0):
                found = True
                break
            if not _advance(env, lows, highs, nvars):
                break
    if not found:
        return None
    return tuple(env[i] for i in range(nvars))


def count_sat(const long long[::1] code, const long long[::1] lows,
              const long long[::1] highs):
    cdef Py_ssize_t nvars = lows.shape[0]
    cdef long long env[MAX_VARS]
    cdef long long total = 0
    cdef Py_ssize_t i
    if nvars == 0:
        return int(_run(code, env))
    for i in range(nvars):
        if lows[i] > highs[i]:
            return 0
        env[i] = lows[i]
    with nogil:
        while True:
            if _run(code, env):
                total += 1
            if not _advance(env, lows, highs, nvars):
                break
    return int(total)


ctypedef long long i64


cdef inline i64 _floordiv_pos(i64 a, i64 d) noexcept nogil:
    """Floor division with a positive divisor (C division truncates)."""
    cdef i64 q = a / d
    if a % d != 0 and a < 0:
        q -= 1
    return q


cdef inline i64 _gcd(i64 a, i64 b) noexcept nogil:
    cdef i64 t
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef int _propagate_impl(const i64[::1] rows, Py_ssize_t n, i64[::1] lows,
                         i64[::1] highs, int rounds) noexcept nogil:
    cdef Py_ssize_t stride = n + 2
    cdef Py_ssize_t nrows = rows.shape[0] // stride
    cdef Py_ssize_t base, i, r
    cdef int rnd
    cdef bint changed, is_eq
    cdef i64 rhs, lo_sum, hi_sum, c, g, settled, res
    cdef i64 rest_lo, rest_hi, cap, need, d
    for rnd in range(rounds):
        changed = False
        for r in range(nrows):
            base = r * stride
            is_eq = rows[base] != 0
            rhs = rows[base + 1]
            lo_sum = 0
            hi_sum = 0
            for i in range(n):
                c = rows[base + 2 + i]
                if c > 0:
                    lo_sum += c * lows[i]
                    hi_sum += c * highs[i]
                elif c < 0:
                    lo_sum += c * highs[i]
                    hi_sum += c * lows[i]
            if lo_sum > rhs or (is_eq and hi_sum < rhs):
                return 0
            if is_eq:
                g = 0
                settled = 0
                for i in range(n):
                    c = rows[base + 2 + i]
                    if lows[i] == highs[i]:
                        settled += c * lows[i]
                    else:
                        g = _gcd(g, c if c >= 0 else -c)
                if g:
                    res = (rhs - settled) % g
                    if res < 0:
                        res += g
                    if res != 0:
                        return 0
            for i in range(n):
                c = rows[base + 2 + i]
                if c == 0:
                    continue
                if c > 0:
                    rest_lo = lo_sum - c * lows[i]
                    rest_hi = hi_sum - c * highs[i]
                    cap = _floordiv_pos(rhs - rest_lo, c)
                    if cap < highs[i]:
                        highs[i] = cap
                        changed = True
                    if is_eq:
                        need = _floordiv_pos(rhs - rest_hi + c - 1, c)
                        if need > lows[i]:
                            lows[i] = need
                            changed = True
                else:
                    d = -c
                    rest_lo = lo_sum - c * highs[i]
                    rest_hi = hi_sum - c * lows[i]
                    need = _floordiv_pos(rest_lo - rhs + d - 1, d)
                    if need > lows[i]:
                        lows[i] = need
                        changed = True
                    if is_eq:
                        cap = _floordiv_pos(rest_hi - rhs, d)
                        if cap < highs[i]:
                            highs[i] = cap
                            changed = True
                if lows[i] > highs[i]:
                    return 0
        if not changed:
            return 1
    return 1


def propagate(const i64[::1] rows, Py_ssize_t n, i64[::1] lows, i64[::1] highs,
              int rounds):
    """Mirror of ``pure.propagate`` over flat 64-bit buffers.

    Returns 1 when the domains stay non-empty, 0 otherwise; ``lows``
    and ``highs`` are tightened in place.  Callers guarantee every
    intermediate fits in 62 bits.
    """

    cdef int out
    with nogil:
        out = _propagate_impl(rows, n, lows, highs, rounds)
    return out


def completion(rows, Py_ssize_t n, long long node_cap):
    """Minimal nonzero natural solutions of ``row . x = 0`` for every row.

    Same frontier search as ``pure.completion``, over flat 64-bit
    buffers: each frontier slot holds a vector and its defect side by
    side, the dedup set keys on the raw vector bytes, and dominance
    checks run against the growing basis buffer.
    """

    cdef Py_ssize_t m = len(rows)
    if n == 0:
        return []

    cdef Py_ssize_t stride = n + m  # vector followed by its defect
    cdef i64* ud = NULL             # unit defects: n blocks of m entries
    cdef i64* frontier = NULL
    cdef i64* fresh = NULL
    cdef i64* basis = NULL
    cdef i64* swap = NULL
    cdef Py_ssize_t frontier_cap = 0, fresh_cap = 0, basis_cap = 0
    cdef Py_ssize_t nf = 0, fresh_n = 0, nb = 0
    cdef Py_ssize_t i, j, k, l, pos, swap_cap
    cdef long long processed = 0
    cdef i64 dot
    cdef bint zero, dominated, covers
    cdef i64* t
    cdef i64* d
    cdef i64* g
    cdef set seen = set()
    cdef object key, row

    ud = <i64*> malloc((n * m + 1) * sizeof(i64))
    if ud == NULL:
        raise MemoryError()
    try:
        for j in range(m):
            row = rows[j]
            for i in range(n):
                ud[i * m + j] = row[i]

        frontier_cap = n
        frontier = <i64*> malloc(frontier_cap * stride * sizeof(i64))
        if frontier == NULL:
            raise MemoryError()
        for i in range(n):
            t = frontier + i * stride
            for k in range(n):
                t[k] = 0
            t[i] = 1
            for j in range(m):
                t[n + j] = ud[i * m + j]
            seen.add(PyBytes_FromStringAndSize(<char*> t, n * sizeof(i64)))
        nf = n

        basis_cap = 16
        basis = <i64*> malloc(basis_cap * n * sizeof(i64))
        if basis == NULL:
            raise MemoryError()
        fresh_cap = 16
        fresh = <i64*> malloc(fresh_cap * stride * sizeof(i64))
        if fresh == NULL:
            raise MemoryError()

        while nf > 0:
            fresh_n = 0
            for pos in range(nf):
                t = frontier + pos * stride
                d = t + n
                processed += 1
                if processed > node_cap:
                    raise ResourceLimit(
                        f"completion search exceeded {node_cap} nodes"
                    )
                zero = True
                for j in range(m):
                    if d[j] != 0:
                        zero = False
                        break
                if zero:
                    dominated = False
                    for k in range(nb):
                        covers = True
                        for i in range(n):
                            if basis[k * n + i] > t[i]:
                                covers = False
                                break
                        if covers:
                            dominated = True
                            break
                    if not dominated:
                        if nb == basis_cap:
                            basis_cap *= 2
                            swap = <i64*> realloc(basis, basis_cap * n * sizeof(i64))
                            if swap == NULL:
                                raise MemoryError()
                            basis = swap
                        memcpy(basis + nb * n, t, n * sizeof(i64))
                        nb += 1
                    continue
                for i in range(n):
                    dot = 0
                    for j in range(m):
                        dot += d[j] * ud[i * m + j]
                    if dot >= 0:
                        continue
                    if fresh_n == fresh_cap:
                        fresh_cap *= 2
                        swap = <i64*> realloc(fresh, fresh_cap * stride * sizeof(i64))
                        if swap == NULL:
                            raise MemoryError()
                        fresh = swap
                        # t and d point into frontier, not fresh: still valid
                    g = fresh + fresh_n * stride
                    memcpy(g, t, n * sizeof(i64))
                    g[i] += 1
                    key = PyBytes_FromStringAndSize(<char*> g, n * sizeof(i64))
                    if key in seen:
                        continue
                    dominated = False
                    for k in range(nb):
                        covers = True
                        for l in range(n):
                            if basis[k * n + l] > g[l]:
                                covers = False
                                break
                        if covers:
                            dominated = True
                            break
                    if dominated:
                        continue
                    seen.add(key)
                    for j in range(m):
                        g[n + j] = d[j] + ud[i * m + j]
                    fresh_n += 1
            swap = frontier
            frontier = fresh
            fresh = swap
            swap_cap = frontier_cap
            frontier_cap = fresh_cap
            fresh_cap = swap_cap
            nf = fresh_n

        # late solutions can retire earlier-found dominated candidates
        out = []
        for k in range(nb):
            dominated = False
            for l in range(nb):
                if l == k:
                    continue
                covers = True
                for i in range(n):
                    if basis[l * n + i] > basis[k * n + i]:
                        covers = False
                        break
                if covers:
                    dominated = True
                    break
            if not dominated:
                out.append(tuple([basis[k * n + i] for i in range(n)]))
        out.sort()
        return out
    finally:
        free(ud)
        free(frontier)
        free(fresh)
        free(basis)
