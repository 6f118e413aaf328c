"""
Ground-truth Findings filtering
Removes sentences that assert the absence of an abnormality or mention a device
"""

from typing import Dict, List, Optional, Sequence, Tuple

from models.filtering import FilterDecision, FilterRuleSet
from models.report import RadiologyReport, SectionName

UNFILTERED_VERSION = "unfiltered"


def classify_sentence(sentence: str, rules: FilterRuleSet) -> FilterDecision:
    for rule_id, pattern in rules.rules():
        if pattern.search(sentence):
            return FilterDecision(sentence=sentence, kept=False, matched_rule=rule_id)
    return FilterDecision(sentence=sentence, kept=True)


def filter_findings(sentences: Sequence[str], rules: FilterRuleSet) -> Tuple[str, List[FilterDecision]]:
    """Return the space-joined kept sentences and one decision per input sentence"""
    decisions = [classify_sentence(s, rules) for s in sentences]
    filtered_text = " ".join(d.sentence for d in decisions if d.kept)
    return filtered_text, decisions


def filter_report(report: RadiologyReport, rules: Optional[FilterRuleSet]) -> Tuple[str, List[FilterDecision]]:
    """
    Filter the Findings section of a parsed report.

    With rules=None the Findings are kept whole (the unfiltered reference
    variant); every sentence is reported as kept.
    """
    sentences = report.sentences(SectionName.FINDINGS)
    if rules is None:
        return " ".join(sentences), [FilterDecision(sentence=s, kept=True) for s in sentences]
    return filter_findings(sentences, rules)


def reference_record(study_id: str, findings: str, rule_set_version: str) -> Dict[str, str]:
    """Reference Findings as written between stages; evaluation reads the version back"""
    return {"study_id": study_id, "findings": findings, "rule_set_version": rule_set_version}
