"""Pure-Python hot kernels.

Reference implementation of the functions in ``_ckernels.pyx``.  Both
modules must return identical results for identical inputs; the test suite
checks this on random inputs.

Array conventions shared by both backends:

* SAT: ``offsets`` (``array('i')``, length m+1) delimits clause ``c`` as
  ``lits[offsets[c]:offsets[c+1]]``; literals are DIMACS-signed ints;
  ``assign`` is a ``bytes`` object of 0/1 values indexed by ``var - 1``.
* AEC: edges ``eu[e] < ev[e]``; incident edges of vertex ``x`` are
  ``inc[inc_off[x]:inc_off[x+1]]``; ``colors[e]`` is -1 when uncolored;
  ``table[x * P + c]`` is the edge of color ``c`` at ``x`` or -1.
"""


def unsat_clauses(offsets, lits, assign):
    out = []
    for c in range(len(offsets) - 1):
        for k in range(offsets[c], offsets[c + 1]):
            lit = lits[k]
            if lit > 0:
                if assign[lit - 1]:
                    break
            elif not assign[-lit - 1]:
                break
        else:
            out.append(c)
    return out


def unsat_among(offsets, lits, assign, candidates):
    out = []
    for c in candidates:
        for k in range(offsets[c], offsets[c + 1]):
            lit = lits[k]
            if lit > 0:
                if assign[lit - 1]:
                    break
            elif not assign[-lit - 1]:
                break
        else:
            out.append(c)
    return out


def four_available(e, eu, ev, inc_off, inc, colors, table, P):
    u = eu[e]
    v = ev[e]
    forbidden = bytearray(P)
    for x in (u, v):
        for k in range(inc_off[x], inc_off[x + 1]):
            g = inc[k]
            if g != e and colors[g] >= 0:
                forbidden[colors[g]] = 1
    # bichromatic 4-cycles u-v-x-y-u: vx and yu share color a, xy gets the new color
    base_u = u * P
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


def bichromatic_cycles(seeds, eu, ev, inc_off, inc, colors, table, P):
    visited = set()
    cycles = []
    n_edges = len(colors)
    for e in seeds:
        a = colors[e]
        if a < 0:
            continue
        v = ev[e]
        for k in range(inc_off[v], inc_off[v + 1]):
            g = inc[k]
            b = colors[g]
            if g == e or b < 0 or e * P + b in visited:
                continue
            visited.add(e * P + b)
            path = [e]
            x = v
            want = b
            for _ in range(n_edges):
                f = table[x * P + want]
                if f < 0:
                    break
                if f == e:
                    cycles.append(path)
                    break
                other = a if want == b else b
                visited.add(f * P + other)
                path.append(f)
                x = eu[f] if ev[f] == x else ev[f]
                want = other
    return cycles
