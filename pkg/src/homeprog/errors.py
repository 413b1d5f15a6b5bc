"""Exception types shared across the package."""


class HomeprogError(Exception):
    """Base class for all domain errors."""


class ProgramSyntaxError(HomeprogError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class UnknownActionError(HomeprogError):
    def __init__(self, line_no: int, token: str):
        super().__init__(f"line {line_no}: unknown action '{token}'")
        self.line_no = line_no
        self.token = token


class ArityError(HomeprogError):
    def __init__(self, line_no: int, action: str, expected: int, got: int):
        super().__init__(
            f"line {line_no}: action {action} takes {expected} object(s), got {got}"
        )
        self.line_no = line_no


class SchemaError(HomeprogError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class InvariantError(HomeprogError):
    pass


class UnknownClassError(HomeprogError):
    def __init__(self, class_name: str):
        super().__init__(f"class {class_name} absent from both environment and KB")
        self.class_name = class_name


class NoSupportAvailableError(HomeprogError):
    def __init__(self, class_name: str):
        super().__init__(f"no support instance available for {class_name}")
        self.class_name = class_name


class ContractViolation(HomeprogError):
    pass


class SearchBudgetExceeded(HomeprogError):
    pass


class ConfigError(HomeprogError):
    pass


class TemplateMissingError(HomeprogError):
    def __init__(self, kind: str):
        super().__init__(f"no template for episode kind {kind}")
        self.kind = kind


class BadRatiosError(HomeprogError):
    pass


class DegenerateInputError(HomeprogError):
    pass
