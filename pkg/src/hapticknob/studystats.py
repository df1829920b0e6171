"""Statistics over study-format Likert data: one-way between-groups ANOVA
with eta-squared, 95% confidence intervals on group means, and chi-square
association with Cramer's V, plus the study CSV loader and report builder.

CSV schema (header required): ``participant,mode,category,rating`` with mode
in {Smooth, Detent, Spring}, category in {comfort, flexibility,
ease_of_control, helpfulness}, integer ratings 1..10, and at most one row
per (participant, mode, category).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

from .special import chi2_sf, f_sf, t_ppf

MODES = ("Smooth", "Detent", "Spring")
CATEGORIES = ("comfort", "flexibility", "ease_of_control", "helpfulness")


class StudyDataError(ValueError):
    pass


@dataclass(frozen=True)
class AnovaResult:
    F: float
    df1: int
    df2: int
    p: float
    eta_squared: float


@dataclass(frozen=True)
class ChiSquareResult:
    chi2: float
    df: int
    p: float
    cramers_v: float


@dataclass(frozen=True)
class LikertTable:
    rows: tuple[tuple[str, str, str, int], ...]  # (participant, mode, category, rating)

    def ratings(self, mode: str, category: str) -> list[int]:
        return [r for p, m, c, r in self.rows if m == mode and c == category]

    def participants(self) -> list[str]:
        seen: dict[str, None] = {}
        for p, _, _, _ in self.rows:
            seen.setdefault(p, None)
        return list(seen)


def one_way_anova(groups: Sequence[Sequence[float]]) -> AnovaResult:
    """Classical one-way between-groups ANOVA.

    eta_squared is SS_between / SS_total; the p-value comes from the F
    survival function. Fully degenerate input (every value identical) is
    defined as F = 0, p = 1.
    """
    if len(groups) < 2:
        raise StudyDataError("ANOVA needs at least 2 groups")
    if any(len(g) < 2 for g in groups):
        raise StudyDataError("ANOVA needs at least 2 values per group")
    k = len(groups)
    n_total = sum(len(g) for g in groups)
    df1 = k - 1
    df2 = n_total - k
    first = groups[0][0]
    if all(v == first for g in groups for v in g):
        return AnovaResult(F=0.0, df1=df1, df2=df2, p=1.0, eta_squared=0.0)
    grand = sum(sum(g) for g in groups) / n_total
    ss_between = sum(len(g) * (sum(g) / len(g) - grand) ** 2 for g in groups)
    ss_within = sum(
        sum((v - sum(g) / len(g)) ** 2 for v in g) for g in groups
    )
    if ss_within == 0.0:
        return AnovaResult(F=math.inf, df1=df1, df2=df2, p=0.0, eta_squared=1.0)
    f_value = (ss_between / df1) / (ss_within / df2)
    return AnovaResult(
        F=f_value,
        df1=df1,
        df2=df2,
        p=f_sf(f_value, df1, df2),
        eta_squared=ss_between / (ss_between + ss_within),
    )


def eta_squared_from_F(F: float, df1: int, df2: int) -> float:
    """Effect size from a printed F statistic: df1*F / (df1*F + df2)."""
    if F < 0:
        raise ValueError("F must be non-negative")
    if df1 < 1 or df2 < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if F == 0.0:
        return 0.0
    return df1 * F / (df1 * F + df2)


def mean_ci95(values: Sequence[float]) -> tuple[float, float, float]:
    """Mean with a 95% t-interval: mean +/- t_{0.975, n-1} * s / sqrt(n)."""
    n = len(values)
    if n < 2:
        raise StudyDataError("need at least 2 values for a confidence interval")
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    half = t_ppf(0.975, n - 1) * math.sqrt(var / n)
    return mean, mean - half, mean + half


def chi_square(table: Sequence[Sequence[float]]) -> ChiSquareResult:
    """Pearson chi-square against independence, with Cramer's V."""
    rows = [list(r) for r in table]
    if len(rows) < 2 or any(len(r) != len(rows[0]) for r in rows) or len(rows[0]) < 2:
        raise StudyDataError("need a rectangular table of at least 2x2")
    if any(v < 0 for r in rows for v in r):
        raise StudyDataError("counts must be non-negative")
    row_totals = [sum(r) for r in rows]
    col_totals = [sum(r[j] for r in rows) for j in range(len(rows[0]))]
    if any(t == 0 for t in row_totals) or any(t == 0 for t in col_totals):
        raise StudyDataError("degenerate margins: all-zero row or column")
    n = sum(row_totals)
    chi2 = 0.0
    for i, r in enumerate(rows):
        for j, observed in enumerate(r):
            expected = row_totals[i] * col_totals[j] / n
            chi2 += (observed - expected) ** 2 / expected
    df = (len(rows) - 1) * (len(rows[0]) - 1)
    v = math.sqrt(chi2 / (n * min(len(rows) - 1, len(rows[0]) - 1)))
    return ChiSquareResult(chi2=chi2, df=df, p=chi2_sf(chi2, df), cramers_v=v)


def cramers_v(chi2: float, n: float, shape: tuple[int, int]) -> float:
    """Cramer's V from a chi-square statistic and table shape."""
    r, c = shape
    if chi2 < 0 or n <= 0 or r < 2 or c < 2:
        raise ValueError("need chi2 >= 0, n > 0 and at least a 2x2 shape")
    return math.sqrt(chi2 / (n * min(r - 1, c - 1)))


def load_study_csv(data: bytes) -> LikertTable:
    text = data.decode("utf-8")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise StudyDataError("empty file") from None
    if [h.strip() for h in header] != ["participant", "mode", "category", "rating"]:
        raise StudyDataError(
            "expected header 'participant,mode,category,rating', got "
            + ",".join(header)
        )
    rows: list[tuple[str, str, str, int]] = []
    seen: set[tuple[str, str, str]] = set()
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not f.strip() for f in row):
            continue
        if len(row) != 4:
            raise StudyDataError(f"line {lineno}: expected 4 fields, got {len(row)}")
        participant, mode, category, rating_raw = (f.strip() for f in row)
        if mode not in MODES:
            raise StudyDataError(f"line {lineno}: unknown mode token {mode!r}")
        if category not in CATEGORIES:
            raise StudyDataError(f"line {lineno}: unknown category token {category!r}")
        try:
            rating = int(rating_raw)
        except ValueError:
            raise StudyDataError(f"line {lineno}: bad rating {rating_raw!r}") from None
        if not 1 <= rating <= 10:
            raise StudyDataError(f"line {lineno}: rating {rating} outside [1, 10]")
        key = (participant, mode, category)
        if key in seen:
            raise StudyDataError(f"line {lineno}: duplicate rating for {key}")
        seen.add(key)
        rows.append((participant, mode, category, rating))
    return LikertTable(rows=tuple(rows))


@dataclass(frozen=True)
class CategoryStats:
    anova: AnovaResult
    mode_cis: dict  # mode -> (mean, lo, hi)


@dataclass(frozen=True)
class StatsReport:
    categories: dict  # category -> CategoryStats
    preferred_mode: dict  # participant -> mode with highest mean rating
    preferred_counts: dict  # mode -> number of participants
    tied_participants: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "categories": {
                cat: {
                    "anova": {
                        "F": cs.anova.F,
                        "df1": cs.anova.df1,
                        "df2": cs.anova.df2,
                        "p": cs.anova.p,
                        "eta_squared": cs.anova.eta_squared,
                    },
                    "mode_cis": {
                        mode: {"mean": m, "ci_lo": lo, "ci_hi": hi}
                        for mode, (m, lo, hi) in cs.mode_cis.items()
                    },
                }
                for cat, cs in self.categories.items()
            },
            "preferred_mode": dict(self.preferred_mode),
            "preferred_counts": dict(self.preferred_counts),
            "tied_participants": list(self.tied_participants),
        }


def summarize(table: LikertTable) -> StatsReport:
    """Per-category ANOVA and per-mode CIs, plus each participant's
    preferred mode (highest mean rating across the four categories; ties
    break toward the earlier mode in Smooth < Detent < Spring and are
    reported)."""
    categories: dict[str, CategoryStats] = {}
    for cat in CATEGORIES:
        groups = [table.ratings(mode, cat) for mode in MODES]
        if any(len(g) < 2 for g in groups):
            raise StudyDataError(f"category {cat!r} lacks data for some mode")
        anova = one_way_anova(groups)
        cis = {mode: mean_ci95(g) for mode, g in zip(MODES, groups)}
        categories[cat] = CategoryStats(anova=anova, mode_cis=cis)

    preferred: dict[str, str] = {}
    counts: dict[str, int] = {mode: 0 for mode in MODES}
    ties: list[str] = []
    for participant in table.participants():
        means = {}
        for mode in MODES:
            ratings = [
                r
                for p, m, _, r in table.rows
                if p == participant and m == mode
            ]
            if ratings:
                means[mode] = sum(ratings) / len(ratings)
        if not means:
            continue
        best = max(means.values())
        winners = [mode for mode in MODES if means.get(mode) == best]
        if len(winners) > 1:
            ties.append(participant)
        choice = winners[0]
        preferred[participant] = choice
        counts[choice] += 1
    return StatsReport(
        categories=categories,
        preferred_mode=preferred,
        preferred_counts=counts,
        tied_participants=tuple(ties),
    )
