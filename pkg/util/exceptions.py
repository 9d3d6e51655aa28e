class RuleForgeError(Exception):
    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


class ConfigError(RuleForgeError):
    def __init__(self, reason):
        super().__init__(f'Invalid configuration: {reason}')


class UsageError(RuleForgeError):
    def __init__(self, reason):
        super().__init__(f'Usage error: {reason}')


class RuleParseError(RuleForgeError):
    def __init__(self, text, position, reason=None):
        self.text = text
        self.position = position
        super().__init__(f'Cannot parse rule at position {position}: {reason or "malformed text"} in "{text}"')


class VariableOutOfRangeError(RuleForgeError):
    def __init__(self, variable, num_variables):
        self.variable = variable
        super().__init__(f'Variable x{variable} is outside the declared range 1..{num_variables}')


class ComplementaryLiteralError(RuleForgeError):
    def __init__(self, variable):
        super().__init__(f'Clause contains both x{variable} and NOT x{variable}')


class DimensionMismatchError(RuleForgeError):
    def __init__(self, what, expected, actual):
        super().__init__(f'Dimension mismatch for {what}: expected {expected}, got {actual}')


class GenerationError(RuleForgeError):
    def __init__(self, what, attempts):
        super().__init__(f'Could not draw {what} in {attempts} attempts')


class SingleClassEpisodeError(RuleForgeError):
    def __init__(self, label=None):
        detail = f' (all labels are {int(label)})' if label is not None else ''
        super().__init__(f'Episode needs at least one positive and one negative example{detail}')


class ShapeError(RuleForgeError):
    def __init__(self, op, *shapes):
        super().__init__(f'Incompatible shapes for {op}: {", ".join(str(s) for s in shapes)}')


class DomainError(RuleForgeError):
    def __init__(self, op, reason):
        super().__init__(f'Domain violation in {op}: {reason}')


class NonScalarLossError(RuleForgeError):
    def __init__(self, shape):
        super().__init__(f'backward() needs a scalar loss, got shape {shape}')


class TrainingDivergedError(RuleForgeError):
    def __init__(self, step, batch_seed, dump_path=None):
        self.step = step
        self.batch_seed = batch_seed
        where = f'; batch dumped to {dump_path}' if dump_path else ''
        super().__init__(f'Non-finite loss at step {step} (batch seed {batch_seed}){where}')


class CheckpointError(RuleForgeError):
    def __init__(self, path, reason):
        super().__init__(f'Checkpoint {path}: {reason}')


class ManifestError(RuleForgeError):
    def __init__(self, name, reason):
        super().__init__(f'Dataset manifest "{name}": {reason}')


class EmptyColumnError(RuleForgeError):
    def __init__(self, column):
        super().__init__(f'Column "{column}" has no observed values')


class UnparseableCellError(RuleForgeError):
    def __init__(self, column, row, value):
        super().__init__(f'Cannot parse numeric cell "{value}" in column "{column}" (row {row})')


class StratificationError(RuleForgeError):
    def __init__(self, label, count, folds):
        super().__init__(f'Class {label} has {count} members, fewer than {folds} folds')


class ParameterError(RuleForgeError):
    def __init__(self, name, reason):
        super().__init__(f'Parameter "{name}": {reason}')


class GradientCheckError(RuleForgeError):
    def __init__(self, max_error, median_error, what='full model'):
        super().__init__(f'Gradient check failed for {what}: max relative error {max_error:.2e}, '
                         f'median {median_error:.2e}')
