import numpy as np
import pytest

import netcontrast as nc
from netcontrast import datasets

# collected acceptance report lines, emitted at the end of the run
ACCEPTANCE_REPORT: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_REPORT:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_REPORT:
            terminalreporter.write_line(line)


def build_graph(n, edges, directed=False):
    return nc.Graph(
        directed=directed,
        labels=tuple(str(i) for i in range(n)),
        edges=np.asarray(edges, dtype=np.int64).reshape(-1, 2),
        weights=np.ones(len(edges), dtype=np.float64),
    )


@pytest.fixture(scope="session")
def karate():
    return datasets.load_dataset("karate")


@pytest.fixture(scope="session")
def random1():
    return datasets.load_dataset("random1")


@pytest.fixture(scope="session")
def price1():
    return datasets.load_dataset("price1")


@pytest.fixture(scope="session")
def karate_pair_matrices(karate, random1):
    """Learned features on karate, evaluated on karate vs random1."""
    defs = nc.learn_features(karate, nc.default_config(directed=False))
    X_T, X_B = nc.build_feature_matrices(defs, karate, random1)
    return defs, X_T, X_B


@pytest.fixture(scope="session")
def pipeline_session(karate, random1):
    cfg = nc.SessionConfig(layout_iterations=120)
    return nc.run_pipeline(karate, random1, cfg)


@pytest.fixture()
def data_dir(tmp_path):
    return tmp_path / "data"
