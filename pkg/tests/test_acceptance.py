"""Exit criteria: one test per criterion, each reporting a PASS/FAIL line."""

import itertools
import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from corpusqual import distributions as D
from corpusqual import statparse
from corpusqual.biblio import self_citation_pct, self_reference_pct
from corpusqual.config import RunConfig
from corpusqual.inferstats import (
    chisq_proportions,
    kruskal_wallis,
    one_way_anova,
    rank_sum_test,
    tukey_hsd,
)
from corpusqual.ingest import write_corpus
from corpusqual.mentions import mention_flags
from corpusqual.model import AuthorRef, CitingWork, WorkRef
from corpusqual.pipeline import run_pipeline
from corpusqual.synthetic import SyntheticConfig, generate_corpus
from corpusqual.textmetrics import count_syllables, flesch_reading_ease, fre_from_counts

from conftest import ACCEPTANCE_LINES, make_record

pytestmark = pytest.mark.acceptance


@contextmanager
def criterion(number, title):
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        ACCEPTANCE_LINES.append(f"criterion {number} FAIL  {title}: {str(exc).splitlines()[0][:120]}")
        print(ACCEPTANCE_LINES[-1])
        raise
    line = f"criterion {number} PASS  {title} ({time.perf_counter() - start:.2f} s)"
    ACCEPTANCE_LINES.append(line)
    print(line)


# -- 1. distribution kernel ---------------------------------------------------


def test_1_distribution_kernel():
    with criterion(1, "distribution kernel closed forms"):
        t0 = time.perf_counter()
        worst = 0.0
        for x in np.linspace(0.0, 60.0, 1000):
            worst = max(worst, abs(D.chi2_sf(float(x), 2) - math.exp(-x / 2)))
        assert worst < 1e-10, f"chi2(2) tail off by {worst:.2e}"

        for d2 in (4, 6, 60, 5295):
            for x in np.linspace(0.0, 50.0, 250):
                exact = (1 + 2 * x / d2) ** (-d2 / 2)
                got = D.f_sf(float(x), 2, d2)
                assert abs(got - exact) < 1e-10, f"F(2,{d2}) at {x}: {got} vs {exact}"

        for df in (1, 2.5, 5, 30, 1000, 1e6):
            for x in np.linspace(0.0, 40.0, 200):
                gap = abs(D.t_cdf(float(x), df) + D.t_cdf(float(-x), df) - 1.0)
                assert gap < 1e-12, f"t symmetry gap {gap:.2e} at df={df}, x={x}"

        for df in (5, 10, 30, 120):
            for q in np.linspace(0.1, 8.0, 40):
                expected = 1.0 - 2.0 * D.t_sf(q / math.sqrt(2), df)
                got = D.studentized_range_cdf(float(q), 2, df)
                assert abs(got - expected) < 1e-4, f"SR(2,{df}) at q={q}: {got} vs {expected}"
        elapsed = time.perf_counter() - t0
        assert elapsed < 5.0, f"kernel checks took {elapsed:.1f} s"


# -- 2. statcheck kernel ------------------------------------------------------

C, I, E = statparse.CONSISTENT, statparse.INCONSISTENCY, statparse.DECISION_ERROR

# text, (kind, df1, df2, n, value, comparator, p), expected verdict.
# Verdicts come from printed critical values and closed forms:
# z_.975 = 1.95996, t_.975(10) = 2.22814, F(2, d2) tail = (1 + 2v/d2)^(-d2/2),
# chi2(2) tail = exp(-v/2), chi2(1) = z^2, r -> t = r * sqrt(df / (1 - r^2)).
APA_CASES = [
    ("t(28) = 2.20, p = .04", ("t", 28, None, None, 2.20, "=", 0.04), C),
    ("t(28) = 1.50, p < .05", ("t", 28, None, None, 1.50, "<", 0.05), E),
    ("t(10) = 2.228, p = .05", ("t", 10, None, None, 2.228, "=", 0.05), C),
    ("t (20)=1.00 , p>.05", ("t", 20, None, None, 1.00, ">", 0.05), C),
    ("T(40) = -2.70, p = .03", ("t", 40, None, None, -2.70, "=", 0.03), I),
    ("z = 1.96, p = .05", ("z", None, None, None, 1.96, "=", 0.05), C),
    ("z = 2.17, p = .03", ("z", None, None, None, 2.17, "=", 0.03), C),
    ("z = 2.576, p = .01", ("z", None, None, None, 2.576, "=", 0.01), C),
    ("z = 2.57, p < .01", ("z", None, None, None, 2.57, "<", 0.01), I),
    ("Z = 1.645, p = .100", ("z", None, None, None, 1.645, "=", 0.100), C),
    ("z = 1.60, p = .100", ("z", None, None, None, 1.60, "=", 0.100), I),
    ("z = 1.90, p = .04", ("z", None, None, None, 1.90, "=", 0.04), E),
    ("z = -2.50, p = .07", ("z", None, None, None, -2.50, "=", 0.07), E),
    ("F(2, 6) = 3.00, p = .125", ("F", 2, 6, None, 3.00, "=", 0.125), C),
    ("F(2, 60) = 3.15, p = .05", ("F", 2, 60, None, 3.15, "=", 0.05), C),
    ("F(2, 4) = 6.94, p < .05", ("F", 2, 4, None, 6.94, "<", 0.05), E),
    ("F(2, 5295) = 23.7, p < 0.00", ("F", 2, 5295, None, 23.7, "<", 0.0), C),
    ("F(1, 30) = 1.20, p > .05", ("F", 1, 30, None, 1.20, ">", 0.05), C),
    ("F(2, 10) = 5.00, p = .02", ("F", 2, 10, None, 5.00, "=", 0.02), I),
    ("F(2, 10) = 5.00, p = .05", ("F", 2, 10, None, 5.00, "=", 0.05), E),
    ("χ2(2, N = 5,305) = 10.4, p < 0.01", ("chi2", 2, None, 5305, 10.4, "<", 0.01), C),
    ("chi2(2) = 5.991, p = .05", ("chi2", 2, None, None, 5.991, "=", 0.05), C),
    ("X2(2) = 4.00, p < .05", ("chi2", 2, None, None, 4.00, "<", 0.05), E),
    ("χ²(1, N = 120) = 3.84, p = .05", ("chi2", 1, None, 120, 3.84, "=", 0.05), C),
    ("chi2(2) = 9.21, p > .01", ("chi2", 2, None, None, 9.21, ">", 0.01), C),
    ("chi-square(2) = 13.82, p = .01", ("chi2", 2, None, None, 13.82, "=", 0.01), I),
    ("r(58) = .35, p = .006", ("r", 58, None, None, 0.35, "=", 0.006), C),
    ("r(28) = .30, p < .05", ("r", 28, None, None, 0.30, "<", 0.05), E),
    ("r(100) = -.25, p = .01", ("r", 100, None, None, -0.25, "=", 0.01), C),
    ("r(40) = .10, p > .05", ("r", 40, None, None, 0.10, ">", 0.05), C),
]


def test_2_statcheck_kernel():
    with criterion(2, "statcheck parse and verdicts on 30 crafted cases"):
        assert len(APA_CASES) == 30
        kinds = {fields[0] for _, fields, _ in APA_CASES}
        assert kinds == {"t", "F", "chi2", "r", "z"}
        assert {fields[0] for _, fields, v in APA_CASES if v == E} == kinds
        t0 = time.perf_counter()
        document = " Next, ".join(text for text, _, _ in APA_CASES)
        found = statparse.extract_apa_statistics(document)
        assert len(found) == 30, f"extracted {len(found)} of 30"
        wrong = []
        for test, (text, fields, verdict) in zip(found, APA_CASES):
            parsed = (test.kind, test.df1, test.df2, test.n, test.value, test.p_comparator, test.p_reported)
            if parsed != fields:
                wrong.append(f"parse {text!r}: {parsed}")
            status = statparse.classify_consistency(test).status
            if status != verdict:
                wrong.append(f"verdict {text!r}: {status} != {verdict}")
        elapsed = time.perf_counter() - t0
        assert not wrong, "; ".join(wrong)
        assert elapsed < 1.0, f"took {elapsed:.2f} s"


# -- 3. inferential battery vs scipy -----------------------------------------


def _fixtures(n_cases=50, seed=7):
    rng = np.random.default_rng(seed)
    for _ in range(n_cases):
        k = int(rng.integers(2, 5))
        sizes = rng.integers(3, 31, size=k)
        yield [np.round(rng.normal(rng.uniform(-1, 1), rng.uniform(0.5, 2), n), 1) for n in sizes]


def _enumerated_p(a, b):
    """Two-sided rank-sum p-value by listing every split of the pooled ranks."""
    pooled = sorted(a + b)
    rank = {v: i + 1 for i, v in enumerate(pooled)}
    observed = sum(rank[v] for v in a)
    sums = [sum(c) for c in itertools.combinations(range(1, len(pooled) + 1), len(a))]
    total = len(sums)
    lower = Fraction(sum(s <= observed for s in sums), total)
    upper = Fraction(sum(s >= observed for s in sums), total)
    return float(min(1, 2 * min(lower, upper)))


def test_3_inferential_battery():
    with criterion(3, "ANOVA/Tukey/KW/Wilcoxon/chi2 vs scipy on 50 fixtures"):
        close = lambda got, ref, tol: abs(got - ref) <= tol  # noqa: E731
        for idx, groups in enumerate(_fixtures()):
            a, ref = one_way_anova(groups), stats.f_oneway(*groups)
            assert close(a.statistic, ref.statistic, 1e-6) and close(a.p_value, ref.pvalue, 1e-4), f"ANOVA #{idx}"
            h, ref = kruskal_wallis(groups), stats.kruskal(*groups)
            assert close(h.statistic, ref.statistic, 1e-6) and close(h.p_value, ref.pvalue, 1e-4), f"KW #{idx}"
            tk = stats.tukey_hsd(*groups)
            for r in tukey_hsd(groups):
                i, j = int(r.group_a), int(r.group_b)
                assert close(r.estimate, tk.statistic[i, j], 1e-6), f"Tukey diff #{idx}"
                assert close(r.p_adjusted, tk.pvalue[i, j], 1e-3), f"Tukey p #{idx} ({i},{j})"
            for i, j in itertools.combinations(range(len(groups)), 2):
                u, p, mode = rank_sum_test(groups[i], groups[j])
                ref = stats.mannwhitneyu(groups[i], groups[j], alternative="two-sided",
                                         method="exact" if mode == "exact" else "asymptotic")
                assert close(u, ref.statistic, 1e-6) and close(p, ref.pvalue, 1e-4), f"Wilcoxon #{idx}"
            # proportions: dichotomize at the pooled median
            cut = np.median(np.concatenate(groups))
            succ = [int(np.sum(g > cut)) for g in groups]
            tot = [len(g) for g in groups]
            table = np.column_stack([succ, np.subtract(tot, succ)])
            if table.sum(axis=0).min() > 0:
                x = chisq_proportions(succ, tot)
                ref = stats.chi2_contingency(table, correction=True)
                assert close(x.statistic, ref[0], 1e-6) and close(x.p_value, ref[1], 1e-4), f"chi2 #{idx}"

        rnd = random.Random(3)
        for n in range(2, 13):
            for n_a in range(1, n):
                values = rnd.sample(range(1000), n)
                a, b = values[:n_a], values[n_a:]
                _, p, mode = rank_sum_test(a, b)
                assert mode == "exact"
                assert abs(p - _enumerated_p(a, b)) < 1e-12, f"exact rank-sum n_a={n_a}, n={n}"


# -- 4. synthetic end-to-end ------------------------------------------------


def test_4_synthetic_end_to_end(tmp_path):
    with criterion(4, "synthetic 3 x 600 corpus through the pipeline"):
        syn = SyntheticConfig(n_per_group=600, editorials_per_group=3)
        groups = list(syn.profiles)
        assert groups == ["QJ", "mid", "WoS"]
        reports = []
        for run in ("first", "second"):
            corpus = tmp_path / f"{run}.jsonl"
            write_corpus(generate_corpus(syn), corpus)
            t0 = time.perf_counter()
            result = run_pipeline(RunConfig(corpus=corpus, groups=groups, output_dir=tmp_path / run,
                                            workers=1, plots=False))
            elapsed = time.perf_counter() - t0
            assert elapsed < 60.0, f"pipeline took {elapsed:.1f} s"
            reports.append(result)
        first, second = (tmp_path / "first.jsonl").read_bytes(), (tmp_path / "second.jsonl").read_bytes()
        assert first == second, "corpus generation is not deterministic"
        for name in ("report.json", "report.csv", "report.md", "indicators.jsonl"):
            assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes(), name

        comps = {c.indicator: c for c in reports[0].comparisons}
        abstract = comps["abstract_words"]
        assert abstract.test_family == "anova" and abstract.omnibus.p_value < 0.01, abstract.omnibus
        means = {r.group: r.mean for r in reports[0].summaries if r.indicator == "abstract_words"}
        assert means["QJ"] < means["mid"] < means["WoS"], means
        tukey = {(p.group_a, p.group_b): p for p in abstract.pairwise}
        assert set(tukey) == {("QJ", "mid"), ("QJ", "WoS"), ("mid", "WoS")}
        assert all(p.estimate < 0 for p in tukey.values()), "Tukey differences are not ordered"
        assert tukey[("QJ", "WoS")].p_adjusted < 0.05, tukey[("QJ", "WoS")]

        citations = comps["n_citations_total"]
        assert citations.test_family == "kruskal" and citations.omnibus.p_value < 0.01, citations.omnibus
        decision = comps["has_decision_error"]
        assert decision.test_family == "chisq" and decision.omnibus.p_value > 0.05, decision.omnibus


# -- 5. keyword protocol ----------------------------------------------------

# text, (has_participants, mentions_ethics, mentions_consent)
KEYWORD_CASES = [
    ("The ethics committee approved the protocol for the simulation.", (False, False, False)),
    ("Participants gave informed consent.", (True, False, True)),
    ("All PARTICIPANTS were students; the Review Board approved it.", (True, True, False)),
    ("The study was approved by the ethics committee. Forty participants consented.", (True, True, True)),
    ("Informed consent was obtained from each school.", (False, False, False)),
    ("We report a meta-analysis of 40 studies.", (False, False, False)),
    ("Participation was voluntary and ethical approval was granted.", (False, False, False)),
    ("Nonparticipants were excluded; ethical approval was granted.", (True, True, False)),
    ("Each participant signed a consent form.", (True, False, True)),
    ("The ethic commitee reviewed the participant materials.", (True, True, False)),
    ("Participants were recruited online. No ethics approval was required.", (True, True, False)),
    ("Participants reached consensus in focus groups.", (True, False, False)),
    ("The ethics of data sharing matter to participants.", (True, False, False)),
    ("participant data followed ethical guidelines and consent procedures.", (True, True, True)),
    ("Ethical clearance was obtained.", (False, False, False)),
    ("Participants (N = 80) completed the survey under the Ethics Commission rules.", (True, True, False)),
    ("An ethics statement is included. Participants provided written informed consent.", (True, True, True)),
    ("Rats were housed under standard conditions; the ethics board approved the work.", (False, False, False)),
    ("Participants were told the committee on the ethics of research had approved it.", (True, True, False)),
    ("", (False, False, False)),
]


def test_5_keyword_protocol():
    with criterion(5, "participant/ethics/consent keywords on 20 documents"):
        assert len(KEYWORD_CASES) == 20
        wrong = []
        for text, expected in KEYWORD_CASES:
            f = mention_flags(text)
            got = (f.has_participants, f.mentions_ethics, f.mentions_consent)
            if got != expected:
                wrong.append(f"{text!r}: {got} != {expected}")
        assert not wrong, "; ".join(wrong)


# -- 6. readability -----------------------------------------------------------

# text, hand counts (words, sentences, syllables)
FRE_CASES = [
    ("The cat sat on the mat.", (6, 1, 6)),
    ("The cat sat. The dog ran.", (6, 2, 6)),
    ("Reading is fun.", (3, 1, 4)),
    ("Psychology students completed a questionnaire.", (5, 1, 13)),
    ("Participants were recruited online. They gave consent.", (7, 2, 14)),
    ("Younger children slept longer than older children.", (7, 1, 12)),
    ("We measured the time. Results were clear. Effects were small.", (10, 3, 13)),
    ("Smith et al. reported a large effect. The sample was big.", (11, 2, 15)),
    ("Is memory stable? Yes! It is.", (6, 3, 9)),
    ("Cognitive performance improved significantly after training.", (6, 1, 17)),
]


def test_6_flesch_reading_ease(syllable_fixture):
    with criterion(6, "FRE formula on 10 texts and syllable heuristic accuracy"):
        for text, (w, s, y) in FRE_CASES:
            score = flesch_reading_ease(text)
            assert (score.words, score.sentences, score.syllables) == (w, s, y), text
            by_hand = 206.835 - 1.015 * (w / s) - 84.6 * (y / w)
            assert abs(score.fre - by_hand) < 1e-9, text
            assert abs(fre_from_counts(w, s, y) - by_hand) < 1e-9, text
        hits = sum(count_syllables(word) == n for word, n in syllable_fixture)
        assert len(syllable_fixture) == 100
        assert hits >= 90, f"syllables exact on {hits}/100"


@pytest.fixture
def syllable_fixture():
    from pathlib import Path

    rows = []
    for line in (Path(__file__).parent / "data" / "syllables.tsv").read_text().splitlines():
        if line.strip() and not line.startswith("#"):
            word, n = line.split("\t")
            rows.append((word, int(n)))
    return rows


# -- 7. self-citation / self-reference -----------------------------------------


def _oracle_share(article_authors, works):
    if not works:
        return None
    mine = set(article_authors)
    return 100.0 * sum(1 for w in works if mine & set(w)) / len(works)


def test_7_self_citation_oracle():
    with criterion(7, "self-reference/self-citation vs set-intersection oracle on 200 graphs"):
        rnd = random.Random(11)
        pool = [f"au{i}" for i in range(12)]
        null_seen = 0
        for g in range(200):
            authors = rnd.sample(pool, rnd.randint(0, 4))
            refs = [rnd.sample(pool, rnd.randint(0, 3)) for _ in range(rnd.randint(0, 10))]
            cites = [rnd.sample(pool, rnd.randint(0, 3)) for _ in range(rnd.randint(0, 10))]
            rec = make_record(
                f"g{g}",
                authors=tuple(AuthorRef(a) for a in authors),
                references=tuple(WorkRef(f"r{i}", tuple(r)) for i, r in enumerate(refs)),
                citations=tuple(CitingWork(f"c{i}", tuple(c), 2019) for i, c in enumerate(cites)),
            )
            want_ref, want_cit = _oracle_share(authors, refs), _oracle_share(authors, cites)
            null_seen += (want_ref is None) + (want_cit is None)
            assert self_reference_pct(rec) == want_ref, f"graph {g} references"
            assert self_citation_pct(rec) == want_cit, f"graph {g} citations"
        assert null_seen > 0
