"""Exception hierarchy; ``exit_code`` is what the CLI returns for each."""


class SgNftError(Exception):
    exit_code = 1
    kind = "error"


class ConfigError(SgNftError, ValueError):
    exit_code = 2
    kind = "config_error"


class ProfileParseError(ConfigError):
    kind = "parse_error"


class DomainError(SgNftError, ValueError):
    """Argument outside the mathematical domain (k = 0, negative coordinate)."""

    exit_code = 3
    kind = "domain_error"


class SingularityError(DomainError):
    kind = "singularity_error"


class RegionError(DomainError):
    kind = "region_error"


class CapabilityError(SgNftError, ValueError):
    """Data cannot supply what the computation needs (derivative order, closed form)."""

    exit_code = 3
    kind = "capability_error"


class DecayError(CapabilityError):
    kind = "decay_error"


class ConvergenceError(SgNftError, RuntimeError):
    exit_code = 4
    kind = "convergence_error"
