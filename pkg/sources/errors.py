"""
Exceptions raised by the cleansing engine.

Every class carries a stable `code` that ends up in reports and in CLI messages.
Dirty data is never an exception on its own: field-level problems become
REJECTED statuses and row-level problems become StageIssue entries.
"""

class CleansingError(Exception):
    code = "CLEANSING_ERROR"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code

    def __str__(self):
        return f"{self.code}: {self.message}"

class ConfigInvalidError(CleansingError):
    code = "CONFIG_INVALID"

class IOFailureError(CleansingError):
    code = "IO_FAILURE"

class UnknownFieldError(CleansingError):
    code = "UNKNOWN_FIELD"

class InvalidIdError(CleansingError):
    code = "INVALID_ID"

class UnparseableNameError(CleansingError):
    code = "UNPARSEABLE_NAME"

class UnparseableAddressError(CleansingError):
    code = "UNPARSEABLE_ADDRESS"

class DuplicateZipError(CleansingError):
    code = "DUPLICATE_ZIP"

class EmptyDatasetError(CleansingError):
    code = "EMPTY_DATASET"

class NonMonotoneTimestampError(CleansingError):
    code = "NON_MONOTONE_TIMESTAMP"

class MissingPrerequisiteError(CleansingError):
    code = "MISSING_PREREQUISITE"
