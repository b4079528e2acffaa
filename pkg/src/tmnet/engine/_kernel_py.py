"""Pure-Python stepping kernel; behavioral twin of the compiled module.

Both kernels consume EncodedNetwork tables and must emit identical flat
record streams. Any change here must be mirrored in _kernel.pyx.
"""

from .encode import (
    K_HALT,
    K_IDLE,
    K_INJECT,
    K_RDBLANK,
    K_ROUTE,
    K_SINKROUTE,
    K_TRANS,
    MV_L,
    MV_R,
    REASON_ALL_HALTED,
    REASON_BUDGET,
    REASON_QUIESCENT,
)

BACKEND = "pure-python"


def _can_any_fire(enc, cur, halted, work_cells, work_head, in_cells, in_read):
    """True when some non-halted machine has a matching rule right now."""
    for m in range(enc.n_mach):
        if halted[m]:
            continue
        group = enc.rules_for_state[m].get(cur[m])
        if not group:
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


def run_encoded(enc, total_micro):
    """Execute micro-ticks until a halt condition; return raw arrays.

    Returns (reason, records, state, halted, transitions, work_cells,
    work_heads, in_cells, in_read).
    """
    nm = enc.n_mach
    cur = list(enc.start_state)
    halted = [1 if cur[m] == enc.halt_state[m] else 0 for m in range(nm)]
    trans = [0] * nm
    work_cells = [[[] for _ in range(enc.num_work[m])] for m in range(nm)]
    work_head = [[0] * enc.num_work[m] for m in range(nm)]
    in_cells = [[[] for _ in range(enc.num_inputs[m])] for m in range(nm)]
    in_read = [[0] * enc.num_inputs[m] for m in range(nm)]
    records = []
    n_src = len(enc.source_ids)
    src_ptr = [0] * n_src
    tick = 0
    while True:
        # halt checks, in precedence order
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
            if src_ptr[s] < len(enc.src_ticks[s]):
                pending = True
                break
        if not pending and not _can_any_fire(
            enc, cur, halted, work_cells, work_head, in_cells, in_read
        ):
            reason = REASON_QUIESCENT
            break
        if tick >= total_micro:
            reason = REASON_BUDGET
            break
        # phase 1: due injections, visible this tick
        for s in range(n_src):
            ticks = enc.src_ticks[s]
            syms = enc.src_syms[s]
            p = src_ptr[s]
            while p < len(ticks) and ticks[p] == tick:
                m = enc.src_mach[s]
                k = enc.src_tape[s]
                in_cells[m][k].append(syms[p])
                records.extend((tick, K_INJECT, s, m, k, syms[p]))
                p += 1
            src_ptr[s] = p
        # phases 2 and 3: firing machines sample and step
        emissions = []
        for m in range(nm):
            if halted[m] or tick % enc.fire_period[m]:
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
            group = enc.rules_for_state[m].get(cur[m], ())
            match_work = enc.rule_match_work[m]
            match_in = enc.rule_match_in[m]
            rule_spec = enc.rule_spec[m]
            best = -1
            best_spec = -1
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
                if ok and rule_spec[ri] > best_spec:
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
                        in_read[m][k] += 1
                        adv[k] = 1
                    else:
                        # blank under the head: the move degrades to a stay
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
            for p in range(enc.num_outputs[m]):
                if out[p] != -1:
                    emissions.append((m, p, out[p]))
            cur[m] = enc.rule_next[m][best]
            trans[m] += 1
            if cur[m] == enc.halt_state[m]:
                halted[m] = 1
                records.extend((tick, K_HALT, m))
        # phase 4: route emissions; destinations see them next tick
        for m, p, sym in emissions:
            kind, a, b = enc.conn_dest[m][p]
            if kind == 0:
                in_cells[a][b].append(sym)
                records.extend((tick, K_ROUTE, m, p, a, b, sym))
            else:
                records.extend((tick, K_SINKROUTE, m, p, a, sym))
        tick += 1
    return (reason, records, cur, halted, trans, work_cells, work_head,
            in_cells, in_read)


def levenshtein(a, b):
    """Edit distance between two integer sequences."""
    la = len(a)
    lb = len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    prev = list(range(lb + 1))
    curr = [0] * (lb + 1)
    for i in range(1, la + 1):
        curr[0] = i
        ai = a[i - 1]
        for j in range(1, lb + 1):
            cost = 0 if ai == b[j - 1] else 1
            best = prev[j - 1] + cost
            if prev[j] + 1 < best:
                best = prev[j] + 1
            if curr[j - 1] + 1 < best:
                best = curr[j - 1] + 1
            curr[j] = best
        prev, curr = curr, prev
    return prev[lb]
