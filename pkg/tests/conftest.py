import pytest

from hepatodss import assets
from hepatodss.ingest import ingest_csv


@pytest.fixture(scope="session")
def hcv_csv_text():
    return assets.hcv_csv_text()


@pytest.fixture(scope="session")
def hcv_data(hcv_csv_text):
    """(graph, encoded records) for the full 615-record panel."""
    return ingest_csv(hcv_csv_text)


@pytest.fixture(scope="session")
def hcv_graph(hcv_data):
    return hcv_data[0]


@pytest.fixture(scope="session")
def hcv_records(hcv_data):
    return hcv_data[1]


NOMINAL_LABS = {
    "ALB": 40.0,
    "ALP": 50.0,
    "ALT": 9.0,
    "AST": 40.0,
    "BIL": 10.0,
    "CHE": 8.0,
    "CHOL": 5.0,
    "CREA": 70.0,
    "GGT": 20.0,
    "PROT": 70.0,
}


@pytest.fixture
def hepatitis_labs():
    """Satisfies the hepatitis screen: AST<=53.05, ALP<=52.3, BIL<=11, ALT<=9.25."""
    return dict(NOMINAL_LABS)


@pytest.fixture
def healthy_labs():
    """Satisfies the healthy panel: AST<=53.05, ALB>25.55, ALT>9.65, ALP>28.2."""
    labs = dict(NOMINAL_LABS)
    labs.update(ALT=20.0, ALP=60.0, BIL=5.0, AST=30.0)
    return labs
