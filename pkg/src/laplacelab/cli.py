"""Command line interface: simulate, sweep, verify and plot.

Exit codes are 0 on success, 1 when a computation fails and 2 on usage
errors (bad flags, unknown grid keys, unwritable output paths).
"""

import argparse
from dataclasses import asdict
import json
import logging
import sys
from typing import Dict, List, Optional, Sequence

from laplacelab import __version__
from laplacelab.errors import (LaplaceLabError, SinkError, SummaryError,
    UsageError)
from laplacelab.experiments import (format_summary, inconsistency_summary,
    load_grid, parse_grid, run_cell, spike_regime_summary, sweep_records,
    SweepGrid)
from laplacelab.records import SweepRecord, read_records
from laplacelab.setting import GRID_KEYS
from laplacelab.verification import (SUITES, check_sweep_records,
    format_checks, run_checks)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# simulate accepts the grid keys in singular form
CELL_KEYS = {'d': 'd_list', 'n': 'n_list', 'c': 'c_values', 'seed': 'seeds'}

def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='laplacelab',
        description='Laplace kernel interpolation experiments.')
    parser.add_argument('--version', action='version',
        version=f'%(prog)s {__version__}')
    parser.add_argument('-v', '--verbose', action='count', default=0,
        help='-v for progress, -vv for solver details')
    commands = parser.add_subparsers(dest='command', required=True)

    simulate = commands.add_parser('simulate',
        help='run one cell and print its record')
    simulate.add_argument('cell', nargs='*', metavar='key=value',
        help=f'cell keys {sorted(CELL_KEYS)} or grid keys {sorted(GRID_KEYS)}')
    simulate.add_argument('--seed', type=int, default=None)

    sweep = commands.add_parser('sweep', help='run a grid of cells')
    sweep.add_argument('--grid', default=None,
        help='key = value grid file; defaults when omitted')
    sweep.add_argument('--out', required=True, help='.csv or .json path')
    sweep.add_argument('--jobs', type=int, default=1)
    sweep.add_argument('--seed', type=int, default=None,
        help='run this single seed instead of the grid seeds')

    verify = commands.add_parser('verify', help='run the numerical checks')
    verify.add_argument('--suite', action='append', choices=sorted(SUITES),
        help='repeat to select several; all by default')
    verify.add_argument('--seed', type=int, default=0)
    verify.add_argument('--records', default=None,
        help='judge a finished sweep against the risk and spike thresholds')

    plot = commands.add_parser('plot', help='draw risk curves as SVG')
    plot.add_argument('--records', required=True)
    plot.add_argument('--out', required=True)
    return parser

def _configure_logging(verbose: int):
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(verbose, 2)]
    logging.basicConfig(level=level,
        format='%(levelname)s %(name)s: %(message)s')
    logging.getLogger('matplotlib').setLevel(logging.WARNING)
    logging.getLogger('matplotlib.font_manager').setLevel(logging.ERROR)

def _cell_grid(tokens: Sequence[str], seed: Optional[int]) -> SweepGrid:
    lines: List[str] = []
    given: Dict[str, str] = {}
    for token in tokens:
        if '=' not in token:
            raise UsageError(f'expected key=value, got {token!r}')
        key, value = (part.strip() for part in token.split('=', 1))
        key = CELL_KEYS.get(key, key)
        if key in given:
            raise UsageError(f'{key} given twice')
        given[key] = value
    if seed is not None:
        given['seeds'] = str(seed)
    given.setdefault('c_rule', 'absolute')
    for key, value in given.items():
        if key in CELL_KEYS.values() and ',' in value:
            raise UsageError(f'simulate runs one cell; {key} has a list')
        lines.append(f'{key} = {value}')
    return parse_grid('\n'.join(lines))

def _simulate(args) -> int:
    grid = _cell_grid(args.cell, args.seed)
    record = run_cell(grid, grid.d_list[0], grid.n_list[0],
        grid.c_values[0], grid.seeds[0])
    print(json.dumps(asdict(record)))
    if record.failed:
        print(f'cell {record.coordinates} failed: {record.error}',
            file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK

def _sweep(args) -> int:
    overrides = {} if args.seed is None else {'seeds': (args.seed,)}
    grid = (load_grid(args.grid, **overrides) if args.grid
        else SweepGrid(**overrides))
    records = sweep_records(grid, args.out, args.jobs)
    failed = [record for record in records if record.failed]
    for record in failed:
        print(f'cell (d, n, c, seed) = {record.coordinates} failed: '
            f'{record.error}', file=sys.stderr)
    try:
        summary = inconsistency_summary(records)
        print(format_summary(summary, spike_regime_summary(records)))
    except SummaryError as error:
        logger.warning('no summary: %s', error)
    return EXIT_FAILURE if failed else EXIT_OK

def _read(path: str) -> List[SweepRecord]:
    try:
        return read_records(path)
    except (OSError, KeyError, ValueError) as error:
        raise UsageError(f'cannot read records {path}: {error}') from error

def _verify(args) -> int:
    if args.records:
        if args.suite:
            raise UsageError('--records and --suite are exclusive')
        results = check_sweep_records(_read(args.records))
    else:
        results = run_checks(args.suite, args.seed)
    print(format_checks(results))
    return EXIT_OK if all(result.passed for result in results) else EXIT_FAILURE

def _plot(args) -> int:
    from laplacelab.plotting import plot_risk_curves
    plot_risk_curves(_read(args.records), args.out)
    return EXIT_OK

COMMANDS = {
    'simulate': _simulate,
    'sweep': _sweep,
    'verify': _verify,
    'plot': _plot
}

def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exit:
        return EXIT_OK if exit.code in (0, None) else EXIT_USAGE
    _configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, SinkError) as error:
        print(f'laplacelab: {error}', file=sys.stderr)
        return EXIT_USAGE
    except (SummaryError, LaplaceLabError) as error:
        print(f'laplacelab: {error}', file=sys.stderr)
        return EXIT_FAILURE
