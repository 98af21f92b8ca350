import pytest

from tp53nn import bpnn, pipeline
from tp53nn.seqcore import read_fasta


@pytest.fixture(scope="session")
def data_dir():
    return pipeline.sample_path("")


@pytest.fixture(scope="session")
def sample_csv():
    return pipeline.sample_path("mutation_sample.csv")


@pytest.fixture(scope="session")
def walkthrough_csv():
    return pipeline.sample_path("mutation_walkthrough.csv")


@pytest.fixture(scope="session")
def reference_fasta():
    return pipeline.sample_path("tp53_reference_sample.fasta")


@pytest.fixture(scope="session")
def person155_fasta():
    return pipeline.sample_path("person_codon155.fasta")


@pytest.fixture(scope="session")
def reference(reference_fasta):
    return read_fasta(reference_fasta)[0]


@pytest.fixture(scope="session")
def quick_model(tmp_path_factory, walkthrough_csv):
    """A model overfit on the walkthrough table; 20k epochs is enough to fit every row."""
    path = tmp_path_factory.mktemp("models") / "quick.json"
    cfg = bpnn.TrainConfig(max_epochs=20_000)
    outcome, _, _ = pipeline.run_training(walkthrough_csv, (11, 100, 1), cfg, path)
    assert outcome.train_accuracy == 1.0
    return path


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
