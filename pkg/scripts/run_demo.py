"""End-to-end walkthrough on the demo inputs in scripts/demo/.

Runs validation, classification, lint, analysis, and simplification the
way the CLI would, and prints a readable transcript.  Run from anywhere:

    python scripts/run_demo.py
"""

from pathlib import Path

from validus.analyzer import analyze_ruleset, simplify_ruleset
from validus.classifier import classify_rule
from validus.csvio import dataset_from_csv
from validus.evaluator import EvalOptions, evaluate_ruleset
from validus.rules import format_rule, parse_rules
from validus.schema import parse_schema

DEMO = Path(__file__).parent / "demo"


def banner(title: str) -> None:
    print(f"\n=== {title} " + "=" * max(0, 60 - len(title)))


def main() -> None:
    schema = parse_schema((DEMO / "schema.txt").read_text())
    dataset = dataset_from_csv({"person": (DEMO / "person.csv").read_text()})
    rules = parse_rules((DEMO / "rules.txt").read_text())

    banner("classification")
    for rule in rules:
        sig = classify_rule(rule)
        print(f"  {rule.name:<10} {sig} (level {sig.level})   {format_rule(rule)}")

    banner("validation (na_policy=propagate)")
    report = evaluate_ruleset(rules, dataset, schema, EvalOptions())
    for entry in report.entries:
        unit = entry.unit or "ALL"
        print(f"  {entry.rule:<10} unit={unit:<4} -> {entry.result}")
    print(f"  totals: {report.counts()}")
    for diag in report.diagnostics:
        print(f"  note: {diag.rule} unit={diag.unit or 'ALL'}: {diag.kind}: {diag.message}")

    checks = parse_rules((DEMO / "ruleset_checks.txt").read_text())
    banner("rule-set analysis")
    findings, unsupported = analyze_ruleset(checks, schema)
    for finding in findings:
        subject = finding.rule or finding.variable or ""
        extra = f" = {finding.value}" if finding.value else ""
        print(f"  {finding.kind:<22} {subject}{extra}")
        print(f"      {finding.evidence}")
    for name, reason in unsupported:
        print(f"  (not analyzable) {name}: {reason}")

    banner("simplification")
    simplified, log = simplify_ruleset(checks, schema)
    for step in log:
        after = step.after or "(dropped)"
        print(f"  {step.action}: {step.before}  ->  {after}")
    print("  result:")
    for rule in simplified:
        print(f"    {format_rule(rule)}")


if __name__ == "__main__":
    main()
