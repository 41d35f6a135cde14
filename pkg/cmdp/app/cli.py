# coding=utf-8
"""
Command line interface.

    cmdplab solve [CONFIG] [--set key=value ...]     optimal constrained and unconstrained gain of the true model
    cmdplab run CONFIG [--set key=value ...]         replicated experiment, see cmdp.app.experiment
    cmdplab validate MODEL [--policies N]            invariant sweep on a model written by cmdp.data.write_cmdp
    cmdplab dump [CONFIG] --to FILE                  writes the configured model in the text format

Exit codes: 0 success, 1 invalid configuration or input, 2 failed replication or failed invariant check.
"""
import argparse
import sys

import numpy as np

from cmdp import __version__
from cmdp.data.cmdpformat import read_cmdp, write_cmdp, FormatError
from cmdp.model.cmdp import InvalidCmdp, ShapeMismatch
from cmdp.programs.occupancy import solve_true_model, Infeasible
from cmdp.envs.environment import ConfigInvalid
from .config import ExperimentConfig, ConfigError, load_config, describe
from .experiment import build_model, make_solver, run_experiment
from .sweep import invariant_sweep

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_FAILURE = 2


def _overrides(assignments):
    values = {}
    for assignment in assignments or ():
        if '=' not in assignment:
            raise ConfigError("--set expects key=value but got '%s'" % assignment)
        key, value = assignment.split('=', 1)
        values[key.strip()] = value.strip()
    return values


def _config(args):
    overrides = _overrides(args.set)
    if args.config:
        return load_config(args.config, **overrides)
    return ExperimentConfig(**overrides)


def solve_command(args, out):
    config = _config(args)
    cmdp = build_model(config)
    solver = make_solver(config)
    out.write('%s\n' % cmdp)
    for label, constrained in (('constrained', True), ('unconstrained', False)):
        try:
            occupancy, objective = solve_true_model(cmdp, args.epsilon, constrained, solver)
        except Infeasible as err:
            out.write('%s: infeasible (%s)\n' % (label, err))
            continue
        values = occupancy.channel_values(cmdp.costs) if cmdp.n_channels else np.zeros(0)
        out.write('%s optimum: %.6f (normalized %.10g)\n' % (label, cmdp.original_reward(objective), objective))
        for name, value, original in zip(cmdp.channel_names, values, cmdp.original_costs(values)):
            out.write('  %s: %.6f (normalized %.10g)\n' % (name, original, value))
    return EXIT_OK


def run_command(args, out):
    config = _config(args)
    result = run_experiment(config, workers=args.workers)
    failed = [r for r in result.replications if r.error is not None]
    out.write('%d of %d replications succeeded, results in %s\n' % (len(result.replications) - len(failed), len(result.replications), result.directory))
    return EXIT_FAILURE if failed else EXIT_OK


def validate_command(args, out):
    cmdp = read_cmdp(args.model)
    checks = invariant_sweep(cmdp, np.random.default_rng(args.seed), args.policies)
    for check in checks:
        tolerance = '' if check.tolerance is None else ' (<= %g)' % check.tolerance
        out.write('%-6s %s: %s%s\n' % ('ok' if check.passed else 'FAILED', check.name, check.value, tolerance))
    return EXIT_OK if all(check.passed for check in checks) else EXIT_FAILURE


def dump_command(args, out):
    config = _config(args)
    write_cmdp(build_model(config), args.to)
    out.write('Wrote %s\n' % args.to)
    return EXIT_OK


class ArgumentParser(argparse.ArgumentParser):

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, '%s: error: %s\n' % (self.prog, message))


def parser():
    main_parser = ArgumentParser(prog='cmdplab', description='Learning in constrained average-reward MDPs.')
    main_parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    commands = main_parser.add_subparsers(dest='command')

    solve = commands.add_parser('solve', help='Solve the true-model program of the configured environment.')
    solve.add_argument('config', nargs='?', help='configuration file, defaults are used if omitted')
    solve.add_argument('--set', action='append', metavar='KEY=VALUE', help='override a configuration value')
    solve.add_argument('--epsilon', type=float, default=0.0, help='constraint tightening')
    solve.set_defaults(function=solve_command)

    run = commands.add_parser('run', help='Run a replicated experiment.')
    run.add_argument('config', nargs='?', help='configuration file')
    run.add_argument('--set', action='append', metavar='KEY=VALUE', help='override a configuration value')
    run.add_argument('--workers', type=int, default=None, help='worker pool size, overrides CMDP_WORKERS')
    run.add_argument('--help-config', action='store_true', help='list all configuration keys and exit')
    run.set_defaults(function=run_command)

    validate = commands.add_parser('validate', help='Check model invariants on a serialized CMDP.')
    validate.add_argument('model', help='model file')
    validate.add_argument('--policies', type=int, default=100, help='number of random policies')
    validate.add_argument('--seed', type=int, default=0)
    validate.set_defaults(function=validate_command)

    dump = commands.add_parser('dump', help='Write the configured environment as a model file.')
    dump.add_argument('config', nargs='?', help='configuration file')
    dump.add_argument('--set', action='append', metavar='KEY=VALUE', help='override a configuration value')
    dump.add_argument('--to', required=True, help='target file')
    dump.set_defaults(function=dump_command)
    return main_parser


def main(argv=None, out=None):
    """
    :param argv: arguments without the program name, sys.argv[1:] if None
    :param out: text stream for results, stdout if None
    :return: exit code
    """
    out = out or sys.stdout
    main_parser = parser()
    args = main_parser.parse_args(argv)
    if args.command is None:
        main_parser.print_help(out)
        return EXIT_CONFIG
    if args.command == 'run' and args.help_config:
        out.write(describe() + '\n')
        return EXIT_OK
    if args.command == 'run' and not args.config:
        sys.stderr.write('error: run requires a configuration file\n')
        return EXIT_CONFIG
    try:
        return args.function(args, out)
    except (ConfigError, ConfigInvalid, FormatError, InvalidCmdp, ShapeMismatch, IOError, OSError) as err:
        sys.stderr.write('error: %s\n' % err)
        return EXIT_CONFIG
    except Infeasible as err:
        sys.stderr.write('error: %s\n' % err)
        return EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())
