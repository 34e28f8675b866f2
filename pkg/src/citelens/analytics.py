"""Usage aggregates from the event log: opens, card opens, saves by class.

Card opens carry the augmentation class recorded at click time. Saves are
attributed to the class of the most recent card open for the same paper
when they carry provenance (i.e. came from a card); saves without
provenance came from outside the reader (toolbar/search) and count as
external.
"""

from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction

from citelens.activity import KIND_CARD_OPEN, KIND_OPEN, KIND_SAVE

FAMILIAR_CLASSES = frozenset({"own", "cited_by_own", "saved", "visited"})


def class_group(augmentation_class: str) -> str:
    if augmentation_class in FAMILIAR_CLASSES:
        return "familiar"
    if augmentation_class == "reencountered":
        return "reencountered"
    return "none"


def percent_display(count: int, total: int) -> float:
    """Percentage rounded half-even to one decimal for display."""
    if total == 0:
        return 0.0
    exact = Decimal(count * 100) / Decimal(total)
    return float(exact.quantize(Decimal("0.1"), rounding=ROUND_HALF_EVEN))


def percent_exact(count: int, total: int) -> Fraction:
    return Fraction(count * 100, total) if total else Fraction(0)


@dataclass
class UsageStats:
    paper_opens: int = 0
    card_opens: int = 0
    card_opens_by_group: dict = field(default_factory=lambda: {"familiar": 0, "reencountered": 0, "none": 0})
    paper_saves: int = 0
    saves_by_group: dict = field(
        default_factory=lambda: {"familiar": 0, "reencountered": 0, "none": 0, "external": 0}
    )

    def to_dict(self) -> dict:
        return {
            "paper_opens": self.paper_opens,
            "card_opens": {
                "total": self.card_opens,
                "by_class": dict(self.card_opens_by_group),
                "percent": {
                    g: percent_display(n, self.card_opens)
                    for g, n in self.card_opens_by_group.items()
                },
            },
            "paper_saves": {
                "total": self.paper_saves,
                "by_class": dict(self.saves_by_group),
                "percent": {
                    g: percent_display(n, self.paper_saves) for g, n in self.saves_by_group.items()
                },
            },
        }


def usage_stats(events) -> UsageStats:
    stats = UsageStats()
    last_card_class = {}  # paper_id -> class recorded on its latest card open
    for event in events:
        if event.kind == KIND_OPEN:
            stats.paper_opens += 1
        elif event.kind == KIND_CARD_OPEN:
            stats.card_opens += 1
            klass = event.payload.get("augmentation_class", "none")
            last_card_class[event.paper_id] = klass
            stats.card_opens_by_group[class_group(klass)] += 1
        elif event.kind == KIND_SAVE:
            stats.paper_saves += 1
            if event.payload.get("provenance"):
                klass = last_card_class.get(event.paper_id, "none")
                stats.saves_by_group[class_group(klass)] += 1
            else:
                stats.saves_by_group["external"] += 1
    return stats


def render_usage_text(stats: UsageStats) -> str:
    """Aligned text rows with one-decimal percentages."""
    d = stats.to_dict()
    lines = [f"Paper Opens   {d['paper_opens']}"]
    lines.append(f"Card Opens    {d['card_opens']['total']}")
    for group in ("familiar", "reencountered", "none"):
        lines.append(
            f"  - {group:<14}{d['card_opens']['by_class'][group]:>4}"
            f"  {d['card_opens']['percent'][group]:.1f}%"
        )
    lines.append(f"Paper Saves   {d['paper_saves']['total']}")
    for group in ("familiar", "reencountered", "none", "external"):
        lines.append(
            f"  - {group:<14}{d['paper_saves']['by_class'][group]:>4}"
            f"  {d['paper_saves']['percent'][group]:.1f}%"
        )
    return "\n".join(lines)
