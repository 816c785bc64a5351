"""Exception hierarchy shared by every module of the package."""


class MCSError(Exception):
    """Base class for all errors raised by costmcs."""


class ValidationError(MCSError):
    """A system, rule or belief state is malformed (bad reference, duplicate id, ...)."""


class ContractError(MCSError):
    """An operation was called outside its precondition (e.g. a non-definite system)."""


class FragmentError(MCSError):
    """Fragments over different base systems were combined."""


class GuardExceeded(MCSError):
    """A size guard (rule cap, supports cap, justification guard) was hit."""


class CyclicError(MCSError):
    """The context dependency graph contains a cycle.

    ``cycle`` holds the context names along one cycle, first name repeated
    at the end.
    """

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("dependency cycle: " + " -> ".join(self.cycle))
