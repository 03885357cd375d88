"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid parameter or configuration value."""

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class DimensionError(ValueError):
    """Vector lengths do not match."""


class DivergenceError(ArithmeticError):
    """An adaptive update produced a non-finite value.

    ``run_seed`` and ``iteration`` are filled in by the experiment harness
    so the faulty run can be replayed with :func:`acl0lms.experiment.run_single`.
    """

    def __init__(self, message, run_seed=None, iteration=None, algorithm=None):
        self.run_seed = run_seed
        self.iteration = iteration
        self.algorithm = algorithm
        parts = [message]
        if algorithm is not None:
            parts.append(f"algorithm={algorithm}")
        if iteration is not None:
            parts.append(f"iteration={iteration}")
        if run_seed is not None:
            parts.append(f"run_seed={run_seed}")
        super().__init__(", ".join(parts))


class DegenerateCombinerError(ArithmeticError):
    """The two component filters coincide, so the optimal mix is undefined."""
