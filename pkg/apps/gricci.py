#!/usr/bin/env python3
"""
gricci command-line front end
Instance checks, Ricci tensors, identity verification and homogeneous flows,
with JSON-lines reports.

Exit codes: 0 all checks pass, 1 a check failed or the flow aborted,
2 malformed input or unsatisfied preconditions.
"""

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Callable, Dict, List, Optional

sys.path.insert(0, str(Path(__file__).parent.parent))

import pandas as pd
from pydantic import ValidationError

from apps.view_reports import display_failures, display_statistics, load_report_lines
from core.connection import DivergenceOp, GenConnection, divergence_defect, is_metric, is_pure_type
from core.construct import (CATALOG_NAMES, InstanceSpec, canonical_connection, catalog,
                            divergence_correction, random_kernel_B, tensor_to_connection)
from core.courant import axiom_check
from core.curvature import (RICCI_KINDS, ricci, verify_independence, verify_section4,
                            verify_theorem1, verify_theorem2)
from core.errors import (GRicciError, HypothesisViolated, InputError, MissingMetric,
                         NotHomogeneous, RankOneSide, StepRejected, SymmetryLost)
from core.flow import DIAGNOSTIC_COLUMNS, flow_run, initial_state, write_trajectory
from core.instance_file import export_instance, load_instance
from core.logs import append_report_lines, setup_logging
from core.metric import metric_validate, require_metric
from core.reports import CheckReport, ReportLine
from core.settings import Settings, get_settings

logger = logging.getLogger('gricci.cli')

CHECK_IDS = ('axioms', 'pure_type', 'thm1', 'thm2', 'independence',
             'total_ricci', 'sym_skew', 'sym_iff_compat')

# verify_section4 verdicts reported under each check id
SECTION4_GROUPS = {
    'total_ricci': ('total_ricci_decomposition', 'same_side_vanishes',
                    'total_curvature_skew', 'cyclic_trace'),
    'sym_skew': ('sym_skew', 'prime_skew_iff_symmetric'),
    'sym_iff_compat': ('sym_iff_compat',),
}

STATUS_ICONS = {'pass': '✅', 'fail': '❌', 'skipped': '⏭️'}


# Instance loading

def _load(args) -> InstanceSpec:
    if getattr(args, 'instance', None):
        return catalog(args.instance)
    return load_instance(args.input)


def _divergence(spec: InstanceSpec, choice: Optional[str]) -> DivergenceOp:
    """--divergence: 'file' uses the instance's divergence, 'zero' the zero operator"""
    if choice == 'file':
        if spec.divergence is None:
            raise InputError(f"{spec.name} has no divergence")
        return spec.divergence
    if choice == 'zero' or spec.divergence is None:
        return DivergenceOp.zero(spec.algebroid)
    return spec.divergence


def _connection(spec: InstanceSpec, choice: str, dv: DivergenceOp) -> GenConnection:
    """Connection from the file, or the canonical one corrected to divergence dv"""
    A = spec.algebroid
    if choice == 'file':
        if spec.connection is None:
            raise InputError(f"{spec.name} has no connection coefficients")
        return spec.connection
    if spec.metric is None:
        raise MissingMetric(f"{spec.name} has no generalized metric; the canonical connection needs one")
    D0 = canonical_connection(A, spec.metric)
    if divergence_defect(A, D0, dv) is None:
        return D0
    return divergence_correction(A, spec.metric, D0, dv)


def _need_metric(spec: InstanceSpec):
    if spec.metric is None:
        raise MissingMetric(f"{spec.name} has no generalized metric")
    require_metric(spec.algebroid, spec.metric)


# Report output

def _subset(report: CheckReport, checks) -> CheckReport:
    out = CheckReport(name=report.name)
    out.verdicts = [v for v in report.verdicts if v.check in checks]
    return out


def _emit(lines: List[ReportLine], args, settings: Settings):
    if args.json:
        for line in lines:
            print(line.model_dump_json())
    else:
        for line in lines:
            icon = STATUS_ICONS[line.status]
            text = f"{icon} {line.instance:22} {line.check:16} {line.status}"
            if line.witness:
                text += f"\n      witness: {line.witness}"
            if line.elapsed_ms is not None:
                text += f" ({line.elapsed_ms:.1f} ms)"
            print(text)
    if args.log_reports:
        append_report_lines([line.model_dump_json() for line in lines], settings)


def _exit_code(lines: List[ReportLine]) -> int:
    return 1 if any(line.status == 'fail' for line in lines) else 0


def _timed(args, fn: Callable[[], CheckReport]):
    start = time.perf_counter()
    report = fn()
    elapsed = (time.perf_counter() - start) * 1000 if args.timing else None
    return report, elapsed


# Commands

def cmd_check(args, settings: Settings) -> int:
    """Courant axioms and, when present, the generalized metric"""
    spec = _load(args)
    A = spec.algebroid
    lines = []
    report, elapsed = _timed(args, lambda: axiom_check(A, settings))
    lines.append(ReportLine.from_report(spec.name, 'axioms', report, elapsed))
    if spec.metric is not None:
        report, elapsed = _timed(args, lambda: metric_validate(A, spec.metric))
        lines.append(ReportLine.from_report(spec.name, 'metric', report, elapsed))
    _emit(lines, args, settings)
    return _exit_code(lines)


def cmd_ricci(args, settings: Settings) -> int:
    """Print one Ricci tensor with exact entries"""
    spec = _load(args)
    A = spec.algebroid
    kind = args.kind.upper()
    if kind not in RICCI_KINDS:
        raise InputError(f"unknown kind {args.kind}")
    if kind != 'JV' or args.connection == 'canonical':
        _need_metric(spec)
    dv = _divergence(spec, args.divergence)
    D = None if kind.startswith('SV') else _connection(spec, args.connection, dv)
    tensor = ricci(A, spec.metric, D, kind, dv)
    values = tensor.to_strings()
    if args.json:
        print(json.dumps({'instance': spec.name, 'kind': kind, 'rows': tensor.row_labels,
                          'cols': tensor.col_labels, 'values': values}))
    else:
        print(f"Ric_{kind} of {spec.name}")
        if values and values[0]:
            frame = pd.DataFrame(values, index=tensor.row_labels, columns=tensor.col_labels)
            print(frame.to_string())
        else:
            print("(empty matrix)")
    return 0


def _run_check(check: str, spec: InstanceSpec, D: GenConnection, dv: DivergenceOp,
               settings: Settings, cache: Dict) -> CheckReport:
    A, G = spec.algebroid, spec.metric
    if check == 'axioms':
        return axiom_check(A, settings)
    if check == 'pure_type':
        return is_metric(A, G, D).merge(is_pure_type(A, G, D))
    if check == 'thm1':
        return verify_theorem1(A, G, D)
    if check == 'thm2':
        try:
            return verify_theorem2(A, G, D, dv)
        except RankOneSide as e:
            report = CheckReport(name=f"theorem2:{A.name}")
            report.add('rank_not_one', False, str(e), skipped=True)
            return report
    if check == 'independence':
        report = CheckReport(name=f"independence:{A.name}")
        for trial in range(max(1, settings.random_trials)):
            B = tensor_to_connection(A, random_kernel_B(A, G, settings.seed + trial,
                                                        settings.random_coeff_bound))
            report.merge(verify_independence(A, G, dv, D, D + B), f"B{trial}.")
            if not report.passed:
                break
        return report
    if 'section4' not in cache:
        cache['section4'] = verify_section4(A, G, D, dv)
    return _subset(cache['section4'], SECTION4_GROUPS[check])


def cmd_verify(args, settings: Settings) -> int:
    """One report line per selected identity check"""
    selected = list(CHECK_IDS) if args.all or not args.check else args.check
    unknown = [c for c in selected if c not in CHECK_IDS]
    if unknown:
        raise InputError(f"unknown check id(s): {', '.join(unknown)} (known: {', '.join(CHECK_IDS)})")
    if args.seed is not None:
        settings = settings.model_copy(update={'seed': args.seed})

    spec = _load(args)
    _need_metric(spec)
    dv = _divergence(spec, args.divergence)
    D = _connection(spec, args.connection, dv)

    lines = []
    cache: Dict = {}
    # Output order is fixed by check id
    for check in sorted(set(selected), key=CHECK_IDS.index):
        report, elapsed = _timed(args, lambda: _run_check(check, spec, D, dv, settings, cache))
        lines.append(ReportLine.from_report(spec.name, check, report, elapsed))
    _emit(lines, args, settings)
    return _exit_code(lines)


def cmd_flow(args, settings: Settings) -> int:
    """Integrate the generalized Ricci flow of a homogeneous instance"""
    spec = _load(args)
    A = spec.algebroid
    if A.nvars:
        raise NotHomogeneous(f"{spec.name} lives over a chart; the flow needs an instance over a point")
    _need_metric(spec)
    dv = _divergence(spec, args.divergence)
    state0 = initial_state(A, spec.metric, dv)
    trajectory = flow_run(A, state0, args.dt, args.steps, settings)
    if args.out:
        write_trajectory(trajectory, args.out)
    final = trajectory[-1]
    if args.json:
        print(json.dumps({'instance': spec.name, 't': final.t,
                          **{k: final.diagnostics[k] for k in DIAGNOSTIC_COLUMNS}}))
    else:
        print(f"🌀 {spec.name}: t = {final.t:g} after {args.steps} steps")
        for name in DIAGNOSTIC_COLUMNS:
            print(f"   • {name:24}: {final.diagnostics[name]:.3e}")
        if args.out:
            print(f"   Trajectory written to {args.out}")
    return 0


def cmd_export(args, settings: Settings) -> int:
    """Write a catalog instance in the instance file format"""
    text = export_instance(catalog(args.instance), args.out)
    if not args.out:
        sys.stdout.write(text)
    return 0


def cmd_summary(args, settings: Settings) -> int:
    """Pass/fail statistics of a JSON-lines report file"""
    path = Path(args.report) if args.report else Path(settings.log_dir) / 'reports.jsonl'
    lines = load_report_lines(path)
    display_statistics(lines)
    if any(line.status == 'fail' for line in lines):
        display_failures(lines, count=10)
    return 0


# Argument parsing

def _add_source(parser):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument('--input', help='instance file (JSON)')
    group.add_argument('--instance', choices=CATALOG_NAMES, help='catalog instance name')


def _add_output(parser):
    parser.add_argument('--json', action='store_true', help='machine-readable output')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='gricci', description=__doc__.strip().splitlines()[0])
    parser.add_argument('--verbose', action='store_true', help='DEBUG logging on stderr')
    parser.add_argument('--log-reports', action='store_true',
                        help='append report lines to <log_dir>/reports.jsonl')
    parser.add_argument('--timing', action='store_true', help='fill elapsed_ms in report lines')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('check', help='Courant axioms and metric validation')
    _add_source(p)
    _add_output(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser('ricci', help='print a Ricci tensor')
    _add_source(p)
    _add_output(p)
    p.add_argument('--kind', required=True, type=str.lower,
                   choices=[k.lower() for k in RICCI_KINDS])
    p.add_argument('--connection', choices=('canonical', 'file'), default='canonical')
    p.add_argument('--divergence', choices=('zero', 'file'), default=None,
                   help="default: the instance's divergence if it has one, else zero")
    p.set_defaults(func=cmd_ricci)

    p = sub.add_parser('verify', help='verify the curvature identities')
    _add_source(p)
    _add_output(p)
    p.add_argument('--all', action='store_true', help='run every check (default)')
    p.add_argument('--check', action='append', metavar='ID',
                   help=f"check id, repeatable: {', '.join(CHECK_IDS)}")
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--connection', choices=('canonical', 'file'), default='canonical')
    p.add_argument('--divergence', choices=('zero', 'file'), default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser('flow', help='generalized Ricci flow over a point')
    _add_source(p)
    _add_output(p)
    p.add_argument('--dt', type=float, required=True)
    p.add_argument('--steps', type=int, required=True)
    p.add_argument('--out', help='trajectory CSV')
    p.add_argument('--divergence', choices=('zero', 'file'), default=None)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser('export', help='write a catalog instance as an instance file')
    p.add_argument('--instance', required=True, choices=CATALOG_NAMES)
    p.add_argument('--out', help='output path (default: stdout)')
    p.set_defaults(func=cmd_export)

    p = sub.add_parser('summary', help='statistics of a JSON-lines report file')
    p.add_argument('--report', help='report file (default: <log_dir>/reports.jsonl)')
    p.set_defaults(func=cmd_summary)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    for flag in ('json', 'log_reports', 'timing'):
        if not hasattr(args, flag):
            setattr(args, flag, False)

    settings = get_settings()
    setup_logging(settings, verbose=args.verbose, log_to_file=args.log_reports)
    try:
        return args.func(args, settings)
    except (SymmetryLost, StepRejected) as e:
        print(f"❌ Flow aborted: {e}", file=sys.stderr)
        return 1
    except (InputError, MissingMetric, HypothesisViolated, NotHomogeneous) as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as e:
        print(f"❌ Malformed JSON: {e}", file=sys.stderr)
        return 2
    except ValidationError as e:
        print(f"❌ Invalid instance file: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"❌ {e}", file=sys.stderr)
        return 2
    except GRicciError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
