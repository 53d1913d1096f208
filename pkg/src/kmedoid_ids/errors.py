"""Exception hierarchy.

Every error carries an ``exit_code`` so the command-line runner can map
failures onto its documented exit statuses without a lookup table.
"""


class IDSError(Exception):
    exit_code = 1


class ConfigError(IDSError):
    exit_code = 2


class DataError(IDSError):
    exit_code = 3


class InvariantViolation(IDSError):
    exit_code = 4


# dataset
class FieldCountMismatch(DataError, ValueError):
    pass


class NumericParseError(DataError, ValueError):
    def __init__(self, column, token, line_no=None):
        self.column = column
        self.token = token
        self.line_no = line_no
        where = f" on line {line_no}" if line_no is not None else ""
        super().__init__(f"non-numeric token {token!r} in numeric column {column}{where}")


class UnknownLabel(DataError, KeyError):
    def __init__(self, token):
        self.token = token
        super().__init__(f"label {token!r} is not in the taxonomy")

    def __str__(self):
        return self.args[0]


class UnknownCategory(DataError, ValueError):
    pass


class CountExceedsPopulation(ConfigError, ValueError):
    pass


class MissingLabels(DataError, ValueError):
    pass


# preprocess
class EmptyDataset(DataError, ValueError):
    pass


class DimensionMismatch(DataError, ValueError):
    pass


# clustering
class InvalidClusterCount(ConfigError, ValueError):
    pass


class NonFiniteData(DataError, ValueError):
    pass


class EmptyClusterEncountered(IDSError, RuntimeError):
    def __init__(self, clusters):
        self.clusters = list(clusters)
        super().__init__(f"empty cluster(s) {self.clusters}")


class EmptyCluster(IDSError, ValueError):
    pass


# labeling / eval
class InvalidAlpha(ConfigError, ValueError):
    pass


class ClusterMismatch(IDSError, ValueError):
    pass


class RowMismatch(DataError, ValueError):
    pass


class EmptyEvaluation(DataError, ValueError):
    pass
