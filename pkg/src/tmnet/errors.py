"""Exception types shared across the package."""


class TmnetError(Exception):
    """Base class for all tmnet errors."""


class InvalidMachineSpec(TmnetError):
    """A machine description violates a structural constraint."""


class SymbolNotInAlphabet(TmnetError):
    """A symbol was used outside the alphabet that governs it."""


class BlankWriteRejected(TmnetError):
    """Blank encodes 'no data yet' and can never be transmitted."""


class AlreadyHalted(TmnetError):
    """A halted machine was asked to take a step."""


class IncompatibleWiring(TmnetError):
    """Producer and consumer cannot be composed with the given wiring."""


class PortNotFound(TmnetError):
    """A connection endpoint refers to a machine, port, or tape that does not exist."""


class DoubleWriter(TmnetError):
    """An input tape already has a writer; tapes accept exactly one."""


class InvalidNetwork(TmnetError):
    """The network failed validation; the report is attached."""

    def __init__(self, report):
        super().__init__(report.summary())
        self.report = report


class LogMismatch(TmnetError):
    """An event log is inconsistent with the network it is replayed against."""


class UnboundVector(TmnetError):
    """An evaluation vector in the active context set has no input binding."""


class UnencodableValue(TmnetError):
    """A context value contains a character the bound machine cannot accept."""


class NotASubset(TmnetError):
    """The reduced context set is not contained in the full one."""


class UnknownMetric(TmnetError):
    """No similarity metric is registered under the requested name."""


class ModelError(TmnetError):
    """Base class for modeling-language errors."""


class ModelSyntaxError(ModelError):
    """A model document line does not match the grammar."""

    def __init__(self, message, line, column=1):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.column = column


class DuplicateLabel(ModelError):
    """The same identifier or label is declared twice in one section."""


class UnknownSection(ModelError):
    """A section header names a section the grammar does not define."""


class InvalidModel(ModelError):
    """The model has validation findings; the report is attached."""

    def __init__(self, report):
        super().__init__(report.summary())
        self.report = report


class IncompleteMapping(ModelError):
    """A refinement mapping misses nodes of the coarse or fine model."""
