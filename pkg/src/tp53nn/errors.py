"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line interface:
3 for malformed input, 4 for model problems, 5 for unknown categories.
"""


class TP53Error(Exception):
    exit_code = 1


class InputError(TP53Error):
    exit_code = 3


class ModelError(TP53Error):
    exit_code = 4


# seqcore
class EmptyInput(InputError):
    pass


class IllegalCharacter(InputError):
    def __init__(self, char, line):
        super().__init__(f"illegal character {char!r} at line {line}")
        self.char = char
        self.line = line


class MissingHeader(InputError):
    pass


class TooShort(InputError):
    pass


class BadCodon(InputError):
    pass


# align
class KindMismatch(InputError):
    pass


class EmptySequence(InputError):
    pass


# mutcall
class OutOfRange(InputError):
    pass


class SameBase(InputError):
    pass


# dataset
class MissingColumn(InputError):
    pass


class BadInteger(InputError):
    def __init__(self, value, row):
        super().__init__(f"row {row}: mutation_position {value!r} is not a positive integer")
        self.value = value
        self.row = row


class EmptyFile(InputError):
    pass


class SingleClass(InputError):
    pass


class EmptyDataset(InputError):
    pass


class UnknownCategory(TP53Error):
    exit_code = 5

    def __init__(self, field, value, allowed):
        allowed = list(allowed)
        super().__init__(
            f"unknown {field} value {value!r}; allowed: {', '.join(map(repr, allowed))}"
        )
        self.field = field
        self.value = value
        self.allowed = allowed


class UnknownLabel(UnknownCategory):
    pass


# bpnn
class ZeroDimension(TP53Error, ValueError):
    pass


class DimensionMismatch(ModelError):
    pass


class BadMagic(ModelError):
    pass


class VersionUnsupported(ModelError):
    pass


class TruncatedFile(ModelError):
    pass


class WriteFailed(TP53Error):
    pass
