"""Exception hierarchy shared by every stage of the pipeline."""


class DSCompressError(Exception):
    """Base class; the CLI maps subclasses to exit codes."""

    exit_code = 2


class ParseError(DSCompressError):
    def __init__(self, message, line=None, column=None, source=None):
        self.line = line
        self.column = column
        self.source = source
        where = ""
        if line is not None:
            where = f"{source or '<string>'}:{line}:{column}: "
        super().__init__(where + message)


class ValidationError(DSCompressError):
    def __init__(self, message, path=()):
        self.path = tuple(path)
        loc = "/".join(str(p) for p in self.path) or "root"
        super().__init__(f"at node {loc}: {message}")


class AlignmentError(DSCompressError):
    pass


class DataError(DSCompressError):
    pass


class ResourceError(DSCompressError):
    exit_code = 3


class DerivationLimitError(DSCompressError):
    def __init__(self, count, limit):
        self.count = count
        self.limit = limit
        super().__init__(f"forest has {count} derivations, more than the limit of {limit}")
