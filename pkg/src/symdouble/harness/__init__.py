from .config import ConfigError, SEED_ENV, SuiteConfig, build_config  # noqa: F401
from .report import Report, jsonable  # noqa: F401
from .suites import SUITES, UnknownSuite, get_suite, list_suites, regen_golden, run_suite  # noqa: F401
