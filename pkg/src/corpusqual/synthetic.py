"""Synthetic corpora with planted group differences.

The generator produces complete ArticleRecords whose texts carry known
word counts, participant/ethics/consent statements, APA statistics (with a
controlled share of decision errors) and spelling errors, plus authorship,
reference and citation graphs with controlled self-reference/self-citation
rates.  Default group settings follow the direction of the published
group means for questionable (QJ), mid-tier and WoS-indexed journals.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import ArticleRecord, AuthorRef, CitingWork, WorkRef
from .statparse import ReportedTest, recompute_p, render

FILLER = (
    "Previous research has examined the association between these constructs in several populations.",
    "The present study extends this work by testing the proposed model in a larger and more diverse sample.",
    "Theoretical accounts of this relationship emphasise the role of individual differences in regulation.",
    "These findings are consistent with the hypothesis that contextual factors moderate the observed effect.",
    "Measures were administered in a fixed order and took approximately thirty minutes to complete.",
    "Internal consistency of the scales was acceptable across all measurement occasions.",
    "Data were screened for outliers and missing values before the main analyses were conducted.",
    "The results should be interpreted in light of several methodological limitations.",
    "Future research could examine whether these patterns generalise to clinical populations.",
    "In addition, longitudinal designs would allow stronger conclusions about the direction of effects.",
    "Descriptive statistics and correlations among the study variables are presented in Table 2.",
    "Overall, the evidence suggests that the intervention had a modest but reliable impact on outcomes.",
    "Cognitive and emotional processes were assessed with standardised instruments.",
    "The theoretical implications of these results for models of social behaviour are discussed.",
    "Scores on the questionnaire were averaged to create a composite index of wellbeing.",
    "A power analysis indicated that the sample size was sufficient to detect medium effects.",
    "We tested this idea in two steps.",
    "The first step used a short online survey.",
    "Most people took part from home.",
    "The second step looked at change over time.",
    "This gave us a clear view of the main trend.",
    "The data are open and free to use.",
    "We thank the schools for their help.",
    "Each scale had ten items.",
)
TITLE_WORDS = (
    "anxiety", "memory", "attention", "stress", "resilience", "motivation", "wellbeing",
    "adolescents", "students", "teachers", "parents", "workers", "emotion", "regulation",
    "depression", "identity", "learning", "sleep", "personality", "self-esteem",
)
MISSPELLINGS = (
    "accomodation", "fourty", "recieve", "seperate", "occured", "definately",
    "existenting", "enviroment", "goverment", "experiance", "illuded", "reseach",
)
COUNTRIES = ("US", "GB", "DE", "NL", "AU", "CA", "CN", "IN", "NG", "BR", "IR", "TR")

PARTICIPANT_SENTENCE = "A total of {n} participants were recruited through local advertisements."
NO_PARTICIPANT_SENTENCE = "The analysis drew on archival records and published datasets."
ETHICS_SENTENCE = "The study protocol was approved by the institutional review board of the university."
CONSENT_SENTENCE = "All individuals provided informed consent prior to taking part."


@dataclass
class GroupProfile:
    """Generating parameters for one group."""

    abstract_mean: float
    fulltext_mean: float
    references_mean: float
    citations_mean: float
    authors_mean: float
    abstract_sd: float = 60.0
    fulltext_sd: float = 1500.0
    p_international: float = 0.2
    p_participants: float = 0.8
    p_ethics: float = 0.35
    p_consent: float = 0.5
    p_apa: float = 0.25
    p_decision_error: float = 0.10
    p_abstract_typo: float = 0.015
    p_title_typo: float = 0.005
    self_reference_rate: float = 0.05
    self_citation_rate: float = 0.16


def default_profiles() -> dict[str, GroupProfile]:
    """QJ / mid-tier / WoS profiles with the published direction of effects.

    Decision-error rates are deliberately equal across groups.
    """
    return {
        "QJ": GroupProfile(186, 4229, 34.6, 3.3, 2.7, p_international=0.08, p_participants=0.70,
                           p_ethics=0.257, p_consent=0.449, p_apa=0.23, p_abstract_typo=0.022,
                           self_reference_rate=0.042, self_citation_rate=0.159),
        "mid": GroupProfile(196, 5143, 46.3, 12.4, 3.3, p_international=0.22, p_participants=0.78,
                            p_ethics=0.345, p_consent=0.484, p_apa=0.23, p_abstract_typo=0.010,
                            self_reference_rate=0.056, self_citation_rate=0.162),
        "WoS": GroupProfile(201, 5434, 50.3, 16.7, 3.8, p_international=0.25, p_participants=0.90,
                            p_ethics=0.469, p_consent=0.612, p_apa=0.33, p_abstract_typo=0.008,
                            self_reference_rate=0.068, self_citation_rate=0.176),
    }


@dataclass
class SyntheticConfig:
    n_per_group: int = 600
    profiles: dict[str, GroupProfile] = field(default_factory=default_profiles)
    seed: int = 20231
    fulltext_scale: float = 0.25
    editorials_per_group: int = 0
    years: tuple[int, int] = (2015, 2019)


class _Writer:
    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def pick(self, seq):
        return seq[int(self.rng.integers(len(seq)))]

    def words_exactly(self, n: int, typo: bool = False) -> str:
        words: list[str] = []
        while len(words) < n:
            words.extend(self.pick(FILLER).split())
        words = words[:n]
        if typo and n > 3:
            words[int(self.rng.integers(1, n - 1))] = self.pick(MISSPELLINGS)
        text = " ".join(words).rstrip(".,;")
        return text + "."

    def filler(self, n_words: int) -> list[str]:
        out, count = [], 0
        while count < n_words:
            s = self.pick(FILLER)
            out.append(s)
            count += len(s.split())
        return out

    def apa_statement(self, decision_error: bool) -> str:
        rng = self.rng
        for _ in range(1000):
            kind = self.pick(("t", "F", "chi2", "r", "z"))
            df1 = float(rng.integers(10, 200))
            if kind == "t":
                test = dict(kind="t", df1=df1, value=round(float(rng.uniform(0.5, 4.5)), 2))
            elif kind == "F":
                test = dict(kind="F", df1=float(rng.integers(1, 4)), df2=df1,
                            value=round(float(rng.uniform(0.5, 12.0)), 2))
            elif kind == "chi2":
                test = dict(kind="chi2", df1=float(rng.integers(1, 5)), n=int(df1 * 3),
                            value=round(float(rng.uniform(0.5, 18.0)), 2))
            elif kind == "r":
                test = dict(kind="r", df1=df1, value=round(float(rng.uniform(0.05, 0.6)), 2))
            else:
                test = dict(kind="z", value=round(float(rng.uniform(0.5, 4.0)), 2))
            probe = ReportedTest(p_comparator="=", p_reported=0.5, **test)
            p = recompute_p(probe)
            if decision_error:
                if 0.07 < p < 0.6:
                    reported = ReportedTest(p_comparator="<", p_reported=0.05, p_decimals=2, **test)
                    return render(reported)
                continue
            if p < 0.001:
                reported = ReportedTest(p_comparator="<", p_reported=0.001, p_decimals=3, **test)
            else:
                reported = ReportedTest(p_comparator="=", p_reported=round(p, 3), p_decimals=3, **test)
                if reported.p_reported == 0.0:
                    continue
            return render(reported)
        raise RuntimeError("could not draw a statistic")


def _authors(rng, prof: GroupProfile, pool_prefix: str, pool_size: int) -> tuple[AuthorRef, ...]:
    n = 1 + int(rng.poisson(max(prof.authors_mean - 1.0, 0.0)))
    ids = rng.choice(pool_size, size=n, replace=False)
    home = COUNTRIES[int(rng.integers(len(COUNTRIES)))]
    international = rng.random() < prof.p_international
    out = []
    for i, aid in enumerate(ids):
        country = home
        if international and i > 0:
            country = COUNTRIES[int(rng.integers(len(COUNTRIES)))]
        if rng.random() < 0.05:
            country = None
        out.append(AuthorRef(f"{pool_prefix}{aid}", country))
    return tuple(out)


def _nb(rng, mean: float, shape: float = 1.5) -> int:
    """Overdispersed count with the given mean."""
    if mean <= 0:
        return 0
    return int(rng.negative_binomial(shape, shape / (shape + mean)))


def generate_corpus(cfg: Optional[SyntheticConfig] = None) -> list[ArticleRecord]:
    """Deterministic (given ``cfg.seed``) synthetic corpus, grouped in profile order."""
    cfg = cfg or SyntheticConfig()
    rng = np.random.default_rng(cfg.seed)
    w = _Writer(rng)
    records = []
    for group, prof in cfg.profiles.items():
        pool = max(50, cfg.n_per_group * 2)
        for i in range(cfg.n_per_group):
            year = int(rng.integers(cfg.years[0], cfg.years[1] + 1))
            authors = _authors(rng, prof, f"{group}-A", pool)
            own = [a.author_id for a in authors]

            n_abs = max(30, int(round(rng.normal(prof.abstract_mean, prof.abstract_sd))))
            abstract = w.words_exactly(n_abs, typo=rng.random() < prof.p_abstract_typo)
            topic = [w.pick(TITLE_WORDS) for _ in range(3)]
            if rng.random() < prof.p_title_typo:
                topic[1] = w.pick(MISSPELLINGS)
            title = f"The role of {topic[0]} in {topic[1]} among {topic[2]}"

            body: list[str] = []
            if rng.random() < prof.p_participants:
                body.append(PARTICIPANT_SENTENCE.format(n=int(rng.integers(40, 400))))
                if rng.random() < prof.p_ethics:
                    body.append(ETHICS_SENTENCE)
                if rng.random() < prof.p_consent:
                    body.append(CONSENT_SENTENCE)
            else:
                body.append(NO_PARTICIPANT_SENTENCE)
            if rng.random() < prof.p_apa:
                n_tests = 1 + int(rng.poisson(1.0))
                error_at = int(rng.integers(n_tests)) if rng.random() < prof.p_decision_error else -1
                for j in range(n_tests):
                    body.append(f"The effect was examined ({w.apa_statement(j == error_at)}).")
            target = max(200, rng.normal(prof.fulltext_mean, prof.fulltext_sd) * cfg.fulltext_scale)
            used = sum(len(s.split()) for s in body)
            body = w.filler(int(target * 0.4)) + body + w.filler(max(0, int(target - used - target * 0.4)))
            full_text = " ".join(body)

            references = []
            for r in range(_nb(rng, prof.references_mean, 4.0)):
                if rng.random() < prof.self_reference_rate:
                    ref_authors = (own[int(rng.integers(len(own)))], f"X-{group}-{i}-{r}")
                else:
                    ref_authors = (f"X-{group}-{i}-{r}",)
                references.append(WorkRef(f"W-{group}-{i}-r{r}", ref_authors))
            citations = []
            for c in range(_nb(rng, prof.citations_mean, 1.2)):
                if rng.random() < prof.self_citation_rate:
                    cite_authors = (own[int(rng.integers(len(own)))],)
                else:
                    cite_authors = (f"Y-{group}-{i}-{c}",)
                citations.append(CitingWork(f"C-{group}-{i}-{c}", cite_authors, year + int(rng.geometric(0.35)) - 1))

            records.append(ArticleRecord(
                id=f"{group}-{i:04d}",
                doi=f"10.5555/{group.lower()}.{i:04d}",
                group=group,
                title=title,
                abstract=abstract,
                full_text=full_text,
                pub_year=year,
                authors=authors,
                references=tuple(references),
                citations=tuple(citations),
            ))
        for e in range(cfg.editorials_per_group):
            records.append(ArticleRecord(
                id=f"{group}-ed{e:03d}",
                group=group,
                title=f"Editorial: volume {e + 1} of the journal",
                abstract="",
                full_text=w.words_exactly(150),
                pub_year=cfg.years[0],
            ))
    return records


def with_profiles(**overrides: GroupProfile) -> dict[str, GroupProfile]:
    profiles = default_profiles()
    profiles.update(overrides)
    return profiles


def replace_profile(profile: GroupProfile, **changes) -> GroupProfile:
    return dataclasses.replace(profile, **changes)
