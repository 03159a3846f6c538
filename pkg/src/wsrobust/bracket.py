"""Brackets the maximum safe substitution radius per instance.

The attack side supplies an upper bound (an adversarial at distance k proves
R <= k - 1); ascending certification supplies a lower bound (a certified
radius r proves R >= r). A deterministic backend can never produce a crossed
bracket, so a crossed result is flagged rather than raised.
"""

from __future__ import annotations

from dataclasses import dataclass

from .attack import AttackGoal, AttackOutcome, AttackParams, run_pdp
from .classifiers import Classifier
from .space import PerturbationSpace
from .verify import CERTIFIED, FALSIFIED, certify

BRACKETED = "bracketed"
LOWER_ONLY = "lower_only"
INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class RadiusBracket:
    lower: int  # certified: R >= lower
    upper: int | None  # from the cheapest adversarial found: R <= upper
    status: str
    attack_substitutions: int | None
    certify_texts_checked: int

    def to_record(self, instance_id: int) -> dict:
        return {
            "id": instance_id,
            "lower": self.lower,
            "upper": self.upper,
            "status": self.status,
            "attack_substitutions": self.attack_substitutions,
            "certify_texts_checked": self.certify_texts_checked,
        }


def bracket(
    space: PerturbationSpace,
    handle: Classifier,
    attack_params: AttackParams,
    max_certify_radius: int = 4,
    budget: int | None = None,
    goal: AttackGoal | None = None,
) -> RadiusBracket:
    """Attack once, then certify radii 1, 2, ... ascending.

    Certification stops once the next radius could not teach anything new:
    past the attack-derived upper bound, past `max_certify_radius`, past the
    whole space, or when the certification budget (scored texts, shared across
    radii) runs out. A falsifying witness tightens the upper bound to its
    distance minus one.
    """
    goal = goal if goal is not None else AttackGoal.untargeted(space.base.gold_label)
    outcome: AttackOutcome = run_pdp(space, handle, goal, attack_params)
    upper = outcome.substitutions - 1 if outcome.success else None

    lower = 0
    checked_total = 0
    r = 1
    while r <= min(max_certify_radius, space.m):
        if upper is not None and r > upper:
            break
        remaining = None if budget is None else budget - checked_total
        if remaining is not None and remaining <= 0:
            break
        verdict = certify(space, handle, r, budget=remaining)
        checked_total += verdict.texts_checked
        if verdict.kind == CERTIFIED:
            lower = r
            r += 1
        elif verdict.kind == FALSIFIED:
            tightened = verdict.witness_distance - 1
            upper = tightened if upper is None else min(upper, tightened)
            break
        else:  # budget
            break

    if upper is None:
        status = LOWER_ONLY
    elif lower > upper:
        status = INCONSISTENT
    else:
        status = BRACKETED
    return RadiusBracket(
        lower, upper, status, outcome.substitutions, checked_total
    )
