"""
Report models
Verdicts returned by every check operation and the JSON-lines report schema
"""

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field


class Verdict(BaseModel):
    """Outcome of a single identity or axiom check"""
    check: str
    passed: bool
    witness: Optional[str] = None
    detail: Optional[str] = None
    skipped: bool = False


class CheckReport(BaseModel):
    """Ordered collection of verdicts for one check operation"""
    name: str
    verdicts: List[Verdict] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts if not v.skipped)

    def add(self, check: str, passed: bool, witness: Optional[str] = None,
            detail: Optional[str] = None, skipped: bool = False) -> Verdict:
        verdict = Verdict(check=check, passed=passed, witness=witness,
                          detail=detail, skipped=skipped)
        self.verdicts.append(verdict)
        return verdict

    def verdict(self, check: str) -> Verdict:
        for v in self.verdicts:
            if v.check == check:
                return v
        raise KeyError(check)

    def first_failure(self) -> Optional[Verdict]:
        for v in self.verdicts:
            if not v.passed and not v.skipped:
                return v
        return None

    def merge(self, other: 'CheckReport', prefix: str = '') -> 'CheckReport':
        for v in other.verdicts:
            self.verdicts.append(v.model_copy(update={'check': prefix + v.check}))
        return self


class ReportLine(BaseModel):
    """One line of the CLI JSON-lines report; field order is the wire order"""
    instance: str
    check: str
    status: Literal['pass', 'fail', 'skipped']
    witness: Optional[str] = None
    elapsed_ms: Optional[float] = None

    @classmethod
    def from_report(cls, instance: str, check: str, report: CheckReport,
                    elapsed_ms: Optional[float] = None) -> 'ReportLine':
        failure = report.first_failure()
        if report.verdicts and all(v.skipped for v in report.verdicts):
            status = 'skipped'
        else:
            status = 'pass' if failure is None else 'fail'
        witness = None
        if failure is not None:
            witness = f"{failure.check}: {failure.witness}" if failure.witness else failure.check
        return cls(instance=instance, check=check, status=status,
                   witness=witness, elapsed_ms=elapsed_ms)


class RicciReport(BaseModel):
    """All Ricci tensors of an instance plus verdicts of the identities"""
    instance: str
    tensors: Dict[str, List[List[str]]] = Field(default_factory=dict)
    verdicts: List[Verdict] = Field(default_factory=list)
