"""Integer encoding of a network for the stepping kernels.

Symbol 0 is always the blank; wildcard patterns encode as -1. Machines,
states, symbols, sources, and sinks are interned in sorted order so the
encoding itself is deterministic.
"""

from __future__ import annotations

from typing import Dict, List, Mapping, Sequence

from ..errors import BlankWriteRejected, PortNotFound, SymbolNotInAlphabet
from ..machine import BLANK, MOVE_LEFT, MOVE_RIGHT, MOVE_STAY, WILDCARD
from ..network import Network

MV_L, MV_R, MV_S = 0, 1, 2
_MOVE_CODE = {MOVE_LEFT: MV_L, MOVE_RIGHT: MV_R, MOVE_STAY: MV_S}

# record kinds in the flat integer event stream
K_INJECT = 0
K_TRANS = 1
K_IDLE = 2
K_RDBLANK = 3
K_HALT = 4
K_ROUTE = 5
K_SINKROUTE = 6

# halt reason codes, in precedence order
REASON_ALL_HALTED = 0
REASON_QUIESCENT = 1
REASON_BUDGET = 2


class EncodedNetwork:
    """All tables a kernel needs, in plain ints and lists."""

    def __init__(
        self,
        network: Network,
        speeds: Mapping[str, int],
        micro_resolution: int,
        schedules: Mapping[str, Sequence],
    ):
        self.network = network
        self.micro_resolution = int(micro_resolution)
        self.machine_ids: List[str] = sorted(network.machines)
        self.specs = [network.machines[mid] for mid in self.machine_ids]
        self.n_mach = len(self.specs)
        mindex = {mid: m for m, mid in enumerate(self.machine_ids)}

        alphabet = set()
        for spec in self.specs:
            alphabet |= spec.tape_alphabet
        for entries in schedules.values():
            alphabet |= {sym for _, sym in entries}
        alphabet.discard(BLANK)
        self.symbols: List[str] = [BLANK] + sorted(alphabet)
        self.sym_index: Dict[str, int] = {s: i for i, s in enumerate(self.symbols)}

        self.num_inputs = [s.num_inputs for s in self.specs]
        self.num_outputs = [s.num_outputs for s in self.specs]
        self.num_work = [s.num_work_tapes for s in self.specs]
        self.fire_period = [
            self.micro_resolution // speeds[mid] for mid in self.machine_ids
        ]

        self.state_names: List[List[str]] = []
        self.start_state: List[int] = []
        self.halt_state: List[int] = []
        self.rule_match_work: List[list] = []
        self.rule_match_in: List[list] = []
        self.rule_next: List[list] = []
        self.rule_write: List[list] = []
        self.rule_move: List[list] = []
        self.rule_in_move: List[list] = []
        self.rule_out: List[list] = []
        self.rule_spec: List[list] = []
        self.rules_for_state: List[Dict[int, list]] = []
        sym = self.sym_index

        def pat(p):
            return -1 if p == WILDCARD else sym[p]

        for spec in self.specs:
            names = sorted(spec.states)
            sindex = {name: i for i, name in enumerate(names)}
            self.state_names.append(names)
            self.start_state.append(sindex[spec.start_state])
            self.halt_state.append(sindex[spec.halt_state])
            by_state: Dict[int, list] = {}
            m_work, m_in, nxt, wr, mv, imv, out, spc = [], [], [], [], [], [], [], []
            for ridx, rule in enumerate(spec.rules):
                m_work.append([pat(p) for p in rule.match_work])
                m_in.append([pat(p) for p in rule.match_inputs])
                nxt.append(sindex[rule.next_state])
                wr.append([sym[s] for s in rule.work_write])
                mv.append([_MOVE_CODE[d] for d in rule.work_move])
                imv.append([_MOVE_CODE[d] for d in rule.input_moves])
                out.append([-1 if s is None else sym[s] for s in rule.outputs])
                spc.append(rule.specificity)
                by_state.setdefault(sindex[rule.match_state], []).append(ridx)
            self.rule_match_work.append(m_work)
            self.rule_match_in.append(m_in)
            self.rule_next.append(nxt)
            self.rule_write.append(wr)
            self.rule_move.append(mv)
            self.rule_in_move.append(imv)
            self.rule_out.append(out)
            self.rule_spec.append(spc)
            self.rules_for_state.append(by_state)

        self.sink_ids: List[str] = sorted(network.sinks)
        sink_index = {sid: i for i, sid in enumerate(self.sink_ids)}
        self.conn_dest: List[list] = [
            [(-1, 0, 0)] * spec.num_outputs for spec in self.specs
        ]
        for conn in network.connections:
            m = mindex[conn.source.machine]
            self.conn_dest[m][conn.source.index] = (
                0, mindex[conn.dest.machine], conn.dest.index,
            )
        for sid, sink in network.sinks.items():
            m = mindex[sink.machine]
            self.conn_dest[m][sink.port] = (1, sink_index[sid], 0)
        for m, dests in enumerate(self.conn_dest):
            for port, (kind, _, _) in enumerate(dests):
                if kind < 0:
                    raise PortNotFound(
                        f"output port {self.machine_ids[m]}.{port} has no destination"
                    )

        self.source_ids: List[str] = sorted(network.sources)
        self.src_mach: List[int] = []
        self.src_tape: List[int] = []
        self.src_ticks: List[list] = []
        self.src_syms: List[list] = []
        for sid in self.source_ids:
            binding = network.sources[sid]
            m = mindex[binding.machine]
            spec = self.specs[m]
            entries = list(schedules.get(sid, ()))
            timed = []
            offset = 0
            last_t = None
            for pos, (t, s) in enumerate(entries):
                if s == BLANK:
                    raise BlankWriteRejected(f"source {sid!r} cannot inject blank")
                if s not in spec.tape_alphabet:
                    raise SymbolNotInAlphabet(
                        f"source {sid!r} injects {s!r} outside the tape alphabet "
                        f"of {binding.machine!r}"
                    )
                # entries sharing a step land on consecutive micro-ticks
                offset = offset + 1 if t == last_t else 0
                last_t = t
                timed.append((t * self.micro_resolution + offset, pos, sym[s]))
            timed.sort(key=lambda item: (item[0], item[1]))
            self.src_mach.append(m)
            self.src_tape.append(binding.tape)
            self.src_ticks.append([tick for tick, _, _ in timed])
            self.src_syms.append([code for _, _, code in timed])
