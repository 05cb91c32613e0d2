import pytest

from corpusqual.model import ArticleRecord, AuthorRef, CitingWork, WorkRef


def make_record(id="a1", group="A", **kw):
    base = dict(
        id=id,
        group=group,
        title="Anxiety and sleep quality in adolescents",
        pub_year=2018,
        abstract="We studied sleep. Results were clear.",
        full_text="Fifty participants took part. The review board approved the study.",
    )
    base.update(kw)
    return ArticleRecord(**base)


@pytest.fixture
def record_factory():
    return make_record


@pytest.fixture
def full_record():
    return make_record(
        doi="10.1/xyz",
        authors=(AuthorRef("A", "DE"), AuthorRef("B", "US")),
        references=(WorkRef("r1", ("A",)), WorkRef("r2", ("Z",))),
        citations=(CitingWork("c1", ("B",), 2018), CitingWork("c2", ("Q",), 2022)),
        full_text=(
            "Fifty participants gave informed consent. The ethics committee approved the protocol. "
            "Scores differed, t(28) = 2.20, p = .04."
        ),
    )


# one PASS/FAIL line per acceptance criterion, shown at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
