#!/usr/bin/env python3
"""
Verification Report Viewer
Summarize JSON-lines reports written by gricci --log-reports
"""

import json
import sys
from collections import Counter
from pathlib import Path
from typing import Dict, List

sys.path.insert(0, str(Path(__file__).parent.parent))

from pydantic import ValidationError

from core.reports import ReportLine

STATUS_ICONS = {'pass': '✅', 'fail': '❌', 'skipped': '⏭️'}


def load_report_lines(report_file: Path) -> List[ReportLine]:
    """Load report lines; malformed lines are counted and skipped"""
    lines = []
    bad = 0
    with open(report_file, 'r') as f:
        for raw in f:
            raw = raw.strip()
            if not raw:
                continue
            try:
                lines.append(ReportLine.model_validate(json.loads(raw)))
            except (json.JSONDecodeError, ValidationError):
                bad += 1
    if bad:
        print(f"⚠️  Skipped {bad} malformed line(s) in {report_file}", file=sys.stderr)
    return lines


def report_statistics(lines: List[ReportLine]) -> Dict:
    """Counts per status, per check and per instance, plus the failing lines"""
    by_check: Dict[str, Counter] = {}
    by_instance: Dict[str, Counter] = {}
    for line in lines:
        by_check.setdefault(line.check, Counter())[line.status] += 1
        by_instance.setdefault(line.instance, Counter())[line.status] += 1
    return {
        'total': len(lines),
        'status': Counter(line.status for line in lines),
        'by_check': by_check,
        'by_instance': by_instance,
        'failures': [line for line in lines if line.status == 'fail'],
    }


def display_statistics(lines: List[ReportLine]):
    """Display report statistics"""
    if not lines:
        print("📊 No report lines available")
        return
    stats = report_statistics(lines)

    print("\n" + "=" * 70)
    print("📊 VERIFICATION REPORT STATISTICS")
    print("=" * 70)
    print(f"\n📈 Total Checks: {stats['total']}")

    print("\n📋 Status Breakdown:")
    for status, count in stats['status'].most_common():
        percentage = (count / stats['total']) * 100
        print(f"   • {status:10}: {count:5} ({percentage:5.1f}%)")

    print("\n🎯 Checks:")
    for check in sorted(stats['by_check']):
        c = stats['by_check'][check]
        print(f"   • {check:16} pass {c['pass']:4}  fail {c['fail']:4}  skipped {c['skipped']:4}")

    print("\n🧮 Instances:")
    for instance in sorted(stats['by_instance']):
        c = stats['by_instance'][instance]
        print(f"   • {instance:22} pass {c['pass']:4}  fail {c['fail']:4}  skipped {c['skipped']:4}")

    timed = [line.elapsed_ms for line in lines if line.elapsed_ms is not None]
    if timed:
        print("\n⏰ Timing:")
        print(f"   • Timed checks: {len(timed)}")
        print(f"   • Total:        {sum(timed):.1f} ms")
        print(f"   • Slowest:      {max(timed):.1f} ms")


def display_failures(lines: List[ReportLine], count: int = 20):
    """Display the most recent failing checks with their witnesses"""
    failures = [line for line in lines if line.status == 'fail']
    print("\n" + "=" * 70)
    print(f"📝 FAILED CHECKS (Last {count} of {len(failures)})")
    print("=" * 70)
    for line in failures[-count:]:
        print(f"\n{STATUS_ICONS['fail']} {line.instance} / {line.check}")
        print(f"   Witness: {line.witness}")


def search_reports(lines: List[ReportLine], search_term: str) -> List[ReportLine]:
    """Lines whose JSON text contains search_term (case-insensitive)"""
    term = search_term.lower()
    results = [line for line in lines if term in line.model_dump_json().lower()]
    print(f"\n🔍 Search Results for '{search_term}': {len(results)} matches")
    for line in results[:20]:
        print(f"   {STATUS_ICONS.get(line.status, '❓')} {line.instance:22} {line.check:16} {line.witness or ''}")
    return results


def main():
    """Main function"""
    report_file = Path(__file__).parent.parent / 'logs' / 'reports.jsonl'
    args = sys.argv[1:]
    if len(args) >= 2 and args[0] == '--file':
        report_file = Path(args[1])
        args = args[2:]

    print("\n" + "=" * 70)
    print("🧮 gricci - Verification Report Viewer")
    print("=" * 70)

    if not report_file.exists():
        print(f"❌ Report file not found: {report_file}")
        return
    lines = load_report_lines(report_file)
    if not lines:
        print("\n⚠️  No report lines found. Run gricci with --log-reports first.")
        return

    if args:
        command = args[0].lower()
        if command == 'stats':
            display_statistics(lines)
        elif command == 'failures':
            count = int(args[1]) if len(args) > 1 else 20
            display_failures(lines, count)
        elif command == 'search':
            if len(args) < 2:
                print("❌ Usage: python view_reports.py search <term>")
            else:
                search_reports(lines, args[1])
        else:
            print(f"❌ Unknown command: {command}")
            print("\nUsage:")
            print("  python view_reports.py [--file PATH] stats         - Show statistics")
            print("  python view_reports.py [--file PATH] failures [N]  - Show N recent failures")
            print("  python view_reports.py [--file PATH] search <term> - Search reports")
    else:
        display_statistics(lines)
        display_failures(lines, count=10)

    print("\n" + "=" * 70)


if __name__ == "__main__":
    main()
