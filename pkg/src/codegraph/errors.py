"""Exception hierarchy shared by all codegraph modules."""


class CodeGraphError(Exception):
    """Base class for domain errors. The CLI maps these to exit code 1."""

    def to_dict(self):
        return {"error": type(self).__name__, "message": str(self)}


class ParseError(CodeGraphError):
    def __init__(self, line, column, expected, found=None, side=None):
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        self.side = side
        msg = f"{line}:{column}: expected {expected}"
        if found is not None:
            msg += f", found {found!r}"
        if side is not None:
            msg = f"[{side}] {msg}"
        super().__init__(msg)

    def to_dict(self):
        d = super().to_dict()
        d.update(line=self.line, column=self.column, expected=self.expected)
        if self.side is not None:
            d["side"] = self.side
        return d


class EmptyBody(CodeGraphError):
    pass


class FormatError(CodeGraphError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class VocabularyMiss(CodeGraphError):
    pass


class ShapeMismatch(CodeGraphError):
    pass


class NonFinite(CodeGraphError):
    pass


class InsufficientFunctionalities(CodeGraphError):
    pass


class InsufficientNegatives(CodeGraphError):
    pass
