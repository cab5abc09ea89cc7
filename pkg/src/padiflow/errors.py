"""Exception hierarchy shared by all padiflow modules."""


class PadiflowError(Exception):
    """Base class for every error raised by padiflow."""


class InvalidArgument(PadiflowError, ValueError):
    pass


class PreconditionViolated(PadiflowError, ValueError):
    pass


class HypothesisViolated(PadiflowError, ValueError):
    """A norm or vanishing hypothesis failed on the supplied truncation.

    ``what`` names the violated hypothesis and ``index`` the offending
    coefficient (``None`` when the failure is not tied to one coefficient).
    """

    def __init__(self, what, index=None, detail=""):
        self.what = what
        self.index = index
        self.detail = detail
        msg = what if index is None else f"{what} (coefficient {index})"
        if detail:
            msg = f"{msg}: {detail}"
        super().__init__(msg)


class BadReduction(PadiflowError, ValueError):
    def __init__(self, p, detail=""):
        self.p = p
        super().__init__(f"bad reduction at p={p}" + (f": {detail}" if detail else ""))


class InsufficientBudget(PadiflowError, ValueError):
    def __init__(self, required, given):
        self.required = required
        self.given = given
        super().__init__(f"degree budget {given} too small, need at least {required}")
