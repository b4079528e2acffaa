"""Machine model: tapes, transition rules, specs, and single-step semantics.

A machine owns some working tapes and reads a fixed number of one-way input
tapes that peers append to. Output ports emit at most one symbol per step.
The blank symbol means "no data yet" on input tapes: reading it leaves the
read head in place, and it can never be written to an input tape.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Collection, Iterable, Optional, Sequence

from .errors import (
    AlreadyHalted,
    BlankWriteRejected,
    InvalidMachineSpec,
    SymbolNotInAlphabet,
)

BLANK = "_"
WILDCARD = "*"

MOVE_LEFT = "L"
MOVE_RIGHT = "R"
MOVE_STAY = "S"

WORK_MOVES = frozenset((MOVE_LEFT, MOVE_RIGHT, MOVE_STAY))
INPUT_MOVES = frozenset((MOVE_RIGHT, MOVE_STAY))


class InputTape:
    """One-way communication tape.

    A peer appends symbols at the frontier; the owner consumes them in
    order. The write head is always the frontier index, the read head
    trails it and never overtakes. Cells at or past the frontier read as
    blank.
    """

    __slots__ = ("cells", "read_head")

    def __init__(self, cells: Iterable[str] = (), read_head: int = 0):
        self.cells = list(cells)
        if not 0 <= read_head <= len(self.cells):
            raise ValueError("read head out of range")
        self.read_head = read_head

    @property
    def write_head(self) -> int:
        return len(self.cells)

    def write(self, symbol: str, alphabet: Optional[Collection[str]] = None) -> None:
        """Append one symbol at the frontier on behalf of the writer."""
        if symbol == BLANK:
            raise BlankWriteRejected(
                "blank marks 'no data yet' and cannot be written to an input tape"
            )
        if alphabet is not None and symbol not in alphabet:
            raise SymbolNotInAlphabet(f"symbol {symbol!r} not in tape alphabet")
        self.cells.append(symbol)

    def peek(self) -> str:
        """Symbol under the read head; blank at or past the frontier."""
        if self.read_head < len(self.cells):
            return self.cells[self.read_head]
        return BLANK

    def read(self) -> str:
        """Consume one symbol. On blank the head stands still."""
        symbol = self.peek()
        if symbol != BLANK:
            self.read_head += 1
        return symbol

    def copy(self) -> "InputTape":
        return InputTape(self.cells, self.read_head)

    def __eq__(self, other) -> bool:
        if not isinstance(other, InputTape):
            return NotImplemented
        return self.cells == other.cells and self.read_head == other.read_head

    def __repr__(self) -> str:
        return f"InputTape({self.cells!r}, read_head={self.read_head})"


class WorkTape:
    """Half-infinite working tape with a single read/write head."""

    __slots__ = ("cells", "head")

    def __init__(self, cells: Iterable[str] = (), head: int = 0):
        self.cells = list(cells)
        if head < 0:
            raise ValueError("head out of range")
        self.head = head

    def read(self) -> str:
        if self.head < len(self.cells):
            return self.cells[self.head]
        return BLANK

    def write(self, symbol: str) -> None:
        while len(self.cells) <= self.head:
            self.cells.append(BLANK)
        self.cells[self.head] = symbol

    def move(self, direction: str) -> None:
        if direction == MOVE_LEFT:
            # the tape is bounded on the left; a left move at cell 0 stays
            if self.head > 0:
                self.head -= 1
        elif direction == MOVE_RIGHT:
            self.head += 1
        elif direction != MOVE_STAY:
            raise ValueError(f"unknown move {direction!r}")

    def canonical_cells(self) -> tuple:
        """Cell contents with trailing blanks stripped."""
        cells = list(self.cells)
        while cells and cells[-1] == BLANK:
            cells.pop()
        return tuple(cells)

    def copy(self) -> "WorkTape":
        return WorkTape(self.cells, self.head)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WorkTape):
            return NotImplemented
        return (
            self.canonical_cells() == other.canonical_cells()
            and self.head == other.head
        )

    def __repr__(self) -> str:
        return f"WorkTape({self.cells!r}, head={self.head})"


@dataclass(frozen=True)
class TransitionRule:
    """One deterministic transition.

    Match patterns may use the wildcard, which matches any symbol including
    blank. Specificity is the number of concrete (non-wildcard) matched
    positions; the most specific matching rule fires, earliest rule first
    on ties.
    """

    match_state: str
    match_work: tuple
    match_inputs: tuple
    next_state: str
    work_write: tuple
    work_move: tuple
    input_moves: tuple
    outputs: tuple

    def matches(self, state: str, work: Sequence[str], inputs: Sequence[str]) -> bool:
        if state != self.match_state:
            return False
        for pattern, symbol in zip(self.match_work, work):
            if pattern != WILDCARD and pattern != symbol:
                return False
        for pattern, symbol in zip(self.match_inputs, inputs):
            if pattern != WILDCARD and pattern != symbol:
                return False
        return True

    @property
    def specificity(self) -> int:
        return sum(
            1 for p in self.match_work + self.match_inputs if p != WILDCARD
        )

    def signature(self) -> tuple:
        return (self.match_state, self.match_work, self.match_inputs)


def make_rule(
    state: str,
    work,
    inputs: Sequence[str],
    next_state: str,
    write,
    move,
    input_moves: Sequence[str],
    outputs: Sequence[Optional[str]],
) -> TransitionRule:
    """Build a rule, accepting scalars for single-working-tape machines."""
    if isinstance(work, str):
        work = (work,)
    if isinstance(write, str):
        write = (write,)
    if isinstance(move, str):
        move = (move,)
    return TransitionRule(
        match_state=state,
        match_work=tuple(work),
        match_inputs=tuple(inputs),
        next_state=next_state,
        work_write=tuple(write),
        work_move=tuple(move),
        input_moves=tuple(input_moves),
        outputs=tuple(outputs),
    )


@dataclass(frozen=True)
class MachineSpec:
    """Static description of one machine.

    Validated on construction; invalid specs raise InvalidMachineSpec with
    every problem listed. Machine ids must not contain dots because ports
    are addressed as "machineId.portIndex".
    """

    id: str
    states: frozenset
    input_alphabet: frozenset
    tape_alphabet: frozenset
    num_inputs: int
    num_outputs: int
    rules: tuple
    start_state: str
    halt_state: str
    speed: int = 1
    num_work_tapes: int = 1

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "input_alphabet", frozenset(self.input_alphabet))
        object.__setattr__(self, "tape_alphabet", frozenset(self.tape_alphabet))
        object.__setattr__(self, "rules", tuple(self.rules))
        problems = self._problems()
        if problems:
            raise InvalidMachineSpec(
                f"machine {self.id!r}: " + "; ".join(problems)
            )

    def _problems(self) -> list:
        problems = []
        if not self.id or "." in self.id or any(c.isspace() for c in self.id):
            problems.append("id must be non-empty without dots or whitespace")
        if self.num_inputs < 0 or self.num_outputs < 0:
            problems.append("arities must be non-negative")
        if self.num_work_tapes < 1:
            problems.append("at least one working tape is required")
        if self.speed < 1:
            problems.append("speed must be a positive integer")
        if BLANK not in self.input_alphabet:
            problems.append("blank must belong to the input alphabet")
        if not self.input_alphabet <= self.tape_alphabet:
            problems.append("input alphabet must be a subset of the tape alphabet")
        if WILDCARD in self.tape_alphabet:
            problems.append("the wildcard is reserved and cannot be a symbol")
        if self.start_state not in self.states:
            problems.append(f"start state {self.start_state!r} not in states")
        if self.halt_state not in self.states:
            problems.append(f"halt state {self.halt_state!r} not in states")
        seen = {}
        for idx, rule in enumerate(self.rules):
            where = f"rule {idx}"
            if rule.match_state not in self.states:
                problems.append(f"{where}: unknown state {rule.match_state!r}")
            elif rule.match_state == self.halt_state:
                problems.append(f"{where}: halt state cannot have outgoing rules")
            if rule.next_state not in self.states:
                problems.append(f"{where}: unknown next state {rule.next_state!r}")
            if len(rule.match_work) != self.num_work_tapes:
                problems.append(f"{where}: work pattern arity mismatch")
            if len(rule.work_write) != self.num_work_tapes:
                problems.append(f"{where}: work write arity mismatch")
            if len(rule.work_move) != self.num_work_tapes:
                problems.append(f"{where}: work move arity mismatch")
            if len(rule.match_inputs) != self.num_inputs:
                problems.append(f"{where}: input pattern arity mismatch")
            if len(rule.input_moves) != self.num_inputs:
                problems.append(f"{where}: input move arity mismatch")
            if len(rule.outputs) != self.num_outputs:
                problems.append(f"{where}: output arity mismatch")
            for sym in rule.match_work:
                if sym != WILDCARD and sym not in self.tape_alphabet:
                    problems.append(f"{where}: work pattern {sym!r} not in tape alphabet")
            for sym in rule.work_write:
                if sym not in self.tape_alphabet:
                    problems.append(f"{where}: work write {sym!r} not in tape alphabet")
            for mv in rule.work_move:
                if mv not in WORK_MOVES:
                    problems.append(f"{where}: bad work move {mv!r}")
            for pos, (sym, mv) in enumerate(zip(rule.match_inputs, rule.input_moves)):
                if sym != WILDCARD and sym not in self.tape_alphabet:
                    problems.append(f"{where}: input pattern {sym!r} not in tape alphabet")
                if mv not in INPUT_MOVES:
                    problems.append(f"{where}: bad input move {mv!r}")
                if sym == BLANK and mv == MOVE_RIGHT:
                    problems.append(
                        f"{where}: input {pos} matches blank, so the head cannot advance"
                    )
            for sym in rule.outputs:
                if sym is None:
                    continue
                if sym == BLANK:
                    problems.append(f"{where}: blank cannot be emitted; use no output")
                elif sym not in self.tape_alphabet:
                    problems.append(f"{where}: output {sym!r} not in tape alphabet")
            sig = rule.signature()
            if sig in seen:
                problems.append(
                    f"{where}: duplicates the match signature of rule {seen[sig]}"
                )
            else:
                seen[sig] = idx
        return problems


def find_rule(
    spec: MachineSpec, state: str, work: Sequence[str], inputs: Sequence[str]
):
    """Most specific matching rule as (index, rule), or None.

    Earlier rules win specificity ties.
    """
    best = None
    best_spec = -1
    for idx, rule in enumerate(spec.rules):
        if rule.matches(state, work, inputs) and rule.specificity > best_spec:
            best = (idx, rule)
            best_spec = rule.specificity
    return best


@dataclass(frozen=True)
class StepOutcome:
    """What one step did: the fired rule (or none), effects, and emissions."""

    fired: bool
    rule_index: Optional[int]
    scanned: tuple
    advanced: tuple
    emissions: tuple
    halted: bool


@dataclass(frozen=True)
class MachineSnapshot:
    """Comparable final state of one machine after a run."""

    state: str
    halted: bool
    transitions: int
    work_tapes: tuple
    input_tapes: tuple


class MachineState:
    """Mutable runtime configuration of one machine."""

    __slots__ = (
        "spec",
        "current_state",
        "work_tapes",
        "input_tapes",
        "halted",
        "transitions_executed",
    )

    def __init__(self, spec: MachineSpec):
        self.spec = spec
        self.current_state = spec.start_state
        self.work_tapes = [WorkTape() for _ in range(spec.num_work_tapes)]
        self.input_tapes = [InputTape() for _ in range(spec.num_inputs)]
        self.halted = spec.start_state == spec.halt_state
        self.transitions_executed = 0

    def scanned_inputs(self) -> list:
        return [tape.peek() for tape in self.input_tapes]

    def scanned_work(self) -> list:
        return [tape.read() for tape in self.work_tapes]

    def deliver(self, tape_index: int, symbol: str) -> None:
        """Peer-side write onto one of this machine's input tapes."""
        if not 0 <= tape_index < self.spec.num_inputs:
            raise IndexError(f"machine {self.spec.id!r} has no input tape {tape_index}")
        self.input_tapes[tape_index].write(symbol, self.spec.tape_alphabet)

    def step(self, scanned: Optional[Sequence[str]] = None) -> StepOutcome:
        """Fire the best matching rule, or idle if none matches.

        ``scanned`` is the input-symbol vector sampled by the caller;
        defaults to the symbols currently under the read heads.
        """
        if self.halted:
            raise AlreadyHalted(f"machine {self.spec.id!r} has halted")
        if scanned is None:
            scanned = self.scanned_inputs()
        scanned = tuple(scanned)
        if len(scanned) != self.spec.num_inputs:
            raise ValueError("scanned vector arity mismatch")
        work = tuple(self.scanned_work())
        found = find_rule(self.spec, self.current_state, work, scanned)
        if found is None:
            return StepOutcome(
                fired=False,
                rule_index=None,
                scanned=scanned,
                advanced=(False,) * self.spec.num_inputs,
                emissions=(None,) * self.spec.num_outputs,
                halted=False,
            )
        idx, rule = found
        advanced = []
        for k, move in enumerate(rule.input_moves):
            if move == MOVE_RIGHT:
                # a blank under the head degrades the move to a stay
                advanced.append(self.input_tapes[k].read() != BLANK)
            else:
                advanced.append(False)
        for j, tape in enumerate(self.work_tapes):
            tape.write(rule.work_write[j])
            tape.move(rule.work_move[j])
        self.current_state = rule.next_state
        self.transitions_executed += 1
        if self.current_state == self.spec.halt_state:
            self.halted = True
        return StepOutcome(
            fired=True,
            rule_index=idx,
            scanned=scanned,
            advanced=tuple(advanced),
            emissions=rule.outputs,
            halted=self.halted,
        )

    def snapshot(self) -> MachineSnapshot:
        return MachineSnapshot(
            state=self.current_state,
            halted=self.halted,
            transitions=self.transitions_executed,
            work_tapes=tuple(
                (t.canonical_cells(), t.head) for t in self.work_tapes
            ),
            input_tapes=tuple(
                (tuple(t.cells), t.read_head) for t in self.input_tapes
            ),
        )
