# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_pykernels`` for the reference semantics."""

from libc.stdlib cimport calloc, free


def unsat_clauses(const int[::1] offsets, const int[::1] lits,
                  const unsigned char[::1] assign):
    cdef Py_ssize_t m = offsets.shape[0] - 1
    cdef Py_ssize_t c, k
    cdef int lit
    cdef bint sat
    out = []
    for c in range(m):
        sat = False
        for k in range(offsets[c], offsets[c + 1]):
            lit = lits[k]
            if lit > 0:
                if assign[lit - 1]:
                    sat = True
                    break
            elif not assign[-lit - 1]:
                sat = True
                break
        if not sat:
            out.append(c)
    return out


def unsat_among(const int[::1] offsets, const int[::1] lits,
                const unsigned char[::1] assign, const int[::1] candidates):
    cdef Py_ssize_t i, k
    cdef int c, lit
    cdef bint sat
    out = []
    for i in range(candidates.shape[0]):
        c = candidates[i]
        sat = False
        for k in range(offsets[c], offsets[c + 1]):
            lit = lits[k]
            if lit > 0:
                if assign[lit - 1]:
                    sat = True
                    break
            elif not assign[-lit - 1]:
                sat = True
                break
        if not sat:
            out.append(c)
    return out


def four_available(int e, const int[::1] eu, const int[::1] ev,
                   const int[::1] inc_off, const int[::1] inc,
                   const int[::1] colors, const int[::1] table, int P):
    cdef int u = eu[e]
    cdef int v = ev[e]
    cdef int x, y, g, h, f, a, c, k, j, s
    cdef int base_u = u * P
    cdef unsigned char *forbidden = <unsigned char *> calloc(P if P > 0 else 1, 1)
    if forbidden == NULL:
        raise MemoryError()
    try:
        for s in range(2):
            x = u if s == 0 else v
            for k in range(inc_off[x], inc_off[x + 1]):
                g = inc[k]
                if g != e and colors[g] >= 0:
                    forbidden[colors[g]] = 1
        for k in range(inc_off[v], inc_off[v + 1]):
            g = inc[k]
            a = colors[g]
            if g == e or a < 0:
                continue
            x = eu[g] if ev[g] == v else ev[g]
            h = table[base_u + a]
            if h < 0 or h == e:
                continue
            y = eu[h] if ev[h] == u else ev[h]
            for j in range(inc_off[x], inc_off[x + 1]):
                f = inc[j]
                if colors[f] >= 0 and (eu[f] == y or ev[f] == y):
                    forbidden[colors[f]] = 1
                    break
        return [c for c in range(P) if not forbidden[c]]
    finally:
        free(forbidden)


def bichromatic_cycles(const int[::1] seeds, const int[::1] eu, const int[::1] ev,
                       const int[::1] inc_off, const int[::1] inc,
                       const int[::1] colors, const int[::1] table, int P):
    cdef Py_ssize_t n_edges = colors.shape[0]
    cdef Py_ssize_t i, k, step
    cdef int e, a, b, v, g, x, want, f, other
    cdef unsigned char *visited = <unsigned char *> calloc(n_edges * P + 1, 1)
    if visited == NULL:
        raise MemoryError()
    cycles = []
    try:
        for i in range(seeds.shape[0]):
            e = seeds[i]
            a = colors[e]
            if a < 0:
                continue
            v = ev[e]
            for k in range(inc_off[v], inc_off[v + 1]):
                g = inc[k]
                b = colors[g]
                if g == e or b < 0 or visited[e * P + b]:
                    continue
                visited[e * P + b] = 1
                path = [e]
                x = v
                want = b
                for step in range(n_edges):
                    f = table[x * P + want]
                    if f < 0:
                        break
                    if f == e:
                        cycles.append(path)
                        break
                    other = a if want == b else b
                    visited[f * P + other] = 1
                    path.append(f)
                    x = eu[f] if ev[f] == x else ev[f]
                    want = other
        return cycles
    finally:
        free(visited)
