PARSE_ERROR_EXIT = 1
REGIME_ERROR_EXIT = 2
VERIFY_DEVIATION_EXIT = 3


class SeqRegError(Exception):
    """Base class for every error raised by the regularization library."""

    exit_code = REGIME_ERROR_EXIT


class ParseError(SeqRegError):
    exit_code = PARSE_ERROR_EXIT

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        location = []
        if field is not None:
            location.append(f"field {field}")
        if line is not None:
            location.append(f"line {line}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class NonFiniteEntry(SeqRegError):
    pass


class NotLogConvex(SeqRegError):
    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)


class InconsistentDeclaration(SeqRegError):
    pass


class WindowTooShort(SeqRegError):
    pass


class RegimeMismatch(SeqRegError):
    pass


class InfinityAtZero(SeqRegError):
    pass


class UnknownAIota(SeqRegError):
    pass


class OutOfDomain(SeqRegError):
    pass


class Unbounded(SeqRegError):
    pass


class AxiomViolation(SeqRegError):
    """
    A regularizing function failed one of the axioms:
    (I) non-decreasing, (II) vanishing at -inf, (III) blowing up at T or +inf,
    (IV) continuous left of T.
    """

    def __init__(self, axiom, witness, detail=""):
        self.axiom = axiom
        self.witness = witness
        message = f"axiom ({axiom}) violated at t = {witness}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class InfiniteEntryUnsupported(SeqRegError):
    pass


class NotComparable(SeqRegError):
    pass


class OracleSelfCheckError(SeqRegError):
    exit_code = VERIFY_DEVIATION_EXIT


class UnexpectedError(SeqRegError):
    """Any other failure while processing one input, wrapped so the remaining inputs still run."""

    exit_code = PARSE_ERROR_EXIT
