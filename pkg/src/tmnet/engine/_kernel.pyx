# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled stepping kernel; behavioral twin of _kernel_py.

Consumes the same EncodedNetwork tables and must emit identical flat
record streams. Any change here must be mirrored in _kernel_py.py.
"""

from cpython cimport array
import array

# record kinds and halt reasons; must match tmnet.engine.encode
cdef int K_INJECT = 0
cdef int K_TRANS = 1
cdef int K_IDLE = 2
cdef int K_RDBLANK = 3
cdef int K_HALT = 4
cdef int K_ROUTE = 5
cdef int K_SINKROUTE = 6
cdef int MV_L = 0
cdef int MV_R = 1
cdef int REASON_ALL_HALTED = 0
cdef int REASON_QUIESCENT = 1
cdef int REASON_BUDGET = 2

BACKEND = "compiled"


cdef bint _can_any_fire(object enc, list cur, list halted, list work_cells,
                        list work_head, list in_cells, list in_read,
                        int nm) except? -1:
    cdef int m, j, k, h, p, ri, nw, ni
    cdef bint ok
    cdef list group, wsc, isc, cells, mw, mi, match_work, match_in
    cdef object group_obj
    for m in range(nm):
        if halted[m]:
            continue
        group_obj = enc.rules_for_state[m].get(cur[m])
        if not group_obj:
            continue
        group = <list>group_obj
        nw = enc.num_work[m]
        ni = enc.num_inputs[m]
        wsc = [0] * nw
        for j in range(nw):
            cells = work_cells[m][j]
            h = work_head[m][j]
            if h < len(cells):
                wsc[j] = cells[h]
        isc = [0] * ni
        for k in range(ni):
            cells = in_cells[m][k]
            h = in_read[m][k]
            if h < len(cells):
                isc[k] = cells[h]
        match_work = enc.rule_match_work[m]
        match_in = enc.rule_match_in[m]
        for ri in group:
            ok = True
            mw = match_work[ri]
            for j in range(nw):
                p = mw[j]
                if p != -1 and p != wsc[j]:
                    ok = False
                    break
            if ok:
                mi = match_in[ri]
                for k in range(ni):
                    p = mi[k]
                    if p != -1 and p != isc[k]:
                        ok = False
                        break
            if ok:
                return True
    return False


def run_encoded(object enc, long total_micro):
    """Execute micro-ticks until a halt condition; return raw arrays.

    Returns (reason, records, state, halted, transitions, work_cells,
    work_heads, in_cells, in_read).
    """
    cdef int nm = enc.n_mach
    cdef list cur = list(enc.start_state)
    cdef list halt_state = list(enc.halt_state)
    cdef list fire_period = list(enc.fire_period)
    cdef list halted = [1 if cur[m] == halt_state[m] else 0 for m in range(nm)]
    cdef list trans = [0] * nm
    cdef list work_cells = [[[] for _ in range(enc.num_work[m])] for m in range(nm)]
    cdef list work_head = [[0] * enc.num_work[m] for m in range(nm)]
    cdef list in_cells = [[[] for _ in range(enc.num_inputs[m])] for m in range(nm)]
    cdef list in_read = [[0] * enc.num_inputs[m] for m in range(nm)]
    cdef list records = []
    cdef int n_src = len(enc.source_ids)
    cdef list src_ptr = [0] * n_src
    cdef list src_ticks = list(enc.src_ticks)
    cdef list src_syms = list(enc.src_syms)
    cdef list src_mach = list(enc.src_mach)
    cdef list src_tape = list(enc.src_tape)
    cdef long tick = 0
    cdef int reason = REASON_BUDGET
    cdef int m, j, k, h, p, ri, nw, ni, best, best_spec, s, sym, mv, port, kind, a, b
    cdef bint done, pending, ok
    cdef list wsc, isc, cells, mw, mi, group, adv, blanks, emissions
    cdef list match_work, match_in, rule_spec, in_move, write, move, out
    cdef object group_obj
    cdef tuple emi, dest

    while True:
        if nm:
            done = True
            for m in range(nm):
                if not halted[m]:
                    done = False
                    break
            if done:
                reason = REASON_ALL_HALTED
                break
        pending = False
        for s in range(n_src):
            if src_ptr[s] < len(<list>src_ticks[s]):
                pending = True
                break
        if not pending and not _can_any_fire(enc, cur, halted, work_cells,
                                             work_head, in_cells, in_read, nm):
            reason = REASON_QUIESCENT
            break
        if tick >= total_micro:
            reason = REASON_BUDGET
            break
        for s in range(n_src):
            cells = src_ticks[s]
            p = src_ptr[s]
            while p < len(cells) and cells[p] == tick:
                m = src_mach[s]
                k = src_tape[s]
                sym = src_syms[s][p]
                (<list>in_cells[m][k]).append(sym)
                records.extend((tick, K_INJECT, s, m, k, sym))
                p += 1
            src_ptr[s] = p
        emissions = []
        for m in range(nm):
            if halted[m] or tick % <long>fire_period[m]:
                continue
            nw = enc.num_work[m]
            ni = enc.num_inputs[m]
            wsc = [0] * nw
            for j in range(nw):
                cells = work_cells[m][j]
                h = work_head[m][j]
                if h < len(cells):
                    wsc[j] = cells[h]
            isc = [0] * ni
            for k in range(ni):
                cells = in_cells[m][k]
                h = in_read[m][k]
                if h < len(cells):
                    isc[k] = cells[h]
            group_obj = enc.rules_for_state[m].get(cur[m])
            match_work = enc.rule_match_work[m]
            match_in = enc.rule_match_in[m]
            rule_spec = enc.rule_spec[m]
            best = -1
            best_spec = -1
            if group_obj is not None:
                group = <list>group_obj
                for ri in group:
                    ok = True
                    mw = match_work[ri]
                    for j in range(nw):
                        p = mw[j]
                        if p != -1 and p != wsc[j]:
                            ok = False
                            break
                    if ok:
                        mi = match_in[ri]
                        for k in range(ni):
                            p = mi[k]
                            if p != -1 and p != isc[k]:
                                ok = False
                                break
                    if ok and <int>rule_spec[ri] > best_spec:
                        best = ri
                        best_spec = rule_spec[ri]
            if best < 0:
                records.extend((tick, K_IDLE, m, cur[m]))
                records.extend(wsc)
                records.extend(isc)
                continue
            adv = [0] * ni
            blanks = []
            in_move = enc.rule_in_move[m][best]
            for k in range(ni):
                if in_move[k] == MV_R:
                    if isc[k] != 0:
                        in_read[m][k] = <int>in_read[m][k] + 1
                        adv[k] = 1
                    else:
                        blanks.append(k)
            records.extend((tick, K_TRANS, m, best))
            records.extend(isc)
            records.extend(adv)
            for k in blanks:
                records.extend((tick, K_RDBLANK, m, k))
            write = enc.rule_write[m][best]
            move = enc.rule_move[m][best]
            for j in range(nw):
                cells = work_cells[m][j]
                h = work_head[m][j]
                while len(cells) <= h:
                    cells.append(0)
                cells[h] = write[j]
                mv = move[j]
                if mv == MV_L:
                    if h > 0:
                        h -= 1
                elif mv == MV_R:
                    h += 1
                work_head[m][j] = h
            out = enc.rule_out[m][best]
            for p in range(<int>enc.num_outputs[m]):
                if out[p] != -1:
                    emissions.append((m, p, out[p]))
            cur[m] = enc.rule_next[m][best]
            trans[m] = <int>trans[m] + 1
            if cur[m] == halt_state[m]:
                halted[m] = 1
                records.extend((tick, K_HALT, m))
        for emi in emissions:
            m = emi[0]
            port = emi[1]
            sym = emi[2]
            dest = enc.conn_dest[m][port]
            kind = dest[0]
            a = dest[1]
            b = dest[2]
            if kind == 0:
                (<list>in_cells[a][b]).append(sym)
                records.extend((tick, K_ROUTE, m, port, a, b, sym))
            else:
                records.extend((tick, K_SINKROUTE, m, port, a, sym))
        tick += 1
    return (reason, records, cur, halted, trans, work_cells, work_head,
            in_cells, in_read)


def levenshtein(a, b):
    """Edit distance between two integer sequences."""
    cdef array.array aa = array.array("l", a)
    cdef array.array ba = array.array("l", b)
    cdef long[:] av = aa
    cdef long[:] bv = ba
    cdef Py_ssize_t la = len(av)
    cdef Py_ssize_t lb = len(bv)
    if la == 0:
        return lb
    if lb == 0:
        return la
    cdef array.array prev_a = array.array("l", range(lb + 1))
    cdef array.array curr_a = array.array("l", [0] * (lb + 1))
    cdef long[:] prev = prev_a
    cdef long[:] curr = curr_a
    cdef long[:] tmp
    cdef Py_ssize_t i, j
    cdef long ai, cost, best
    for i in range(1, la + 1):
        curr[0] = i
        ai = av[i - 1]
        for j in range(1, lb + 1):
            cost = 0 if ai == bv[j - 1] else 1
            best = prev[j - 1] + cost
            if prev[j] + 1 < best:
                best = prev[j] + 1
            if curr[j - 1] + 1 < best:
                best = curr[j - 1] + 1
            curr[j] = best
        tmp = prev
        prev = curr
        curr = tmp
    return prev[lb]
