"""
Experiment harness: configuration, regret ledgers, replications and the command line.
"""
from .value import ConfigValue, ConfigFloat, ConfigInt, ConfigBool, ConfigString, ConfigChoice
from .config import ExperimentConfig, ConfigError, load_config, parse_config
from .ledger import RegretLedger
from .experiment import oracle_gain, run_experiment
