from pathlib import Path

import pytest

from depthcal import parse_calibration_csv

DATA_DIR = Path(__file__).parent / "data"

# (csv file, camera height cm, closest sight distance cm)
GOLDEN_SESSIONS = {
    "h96": ("height_096_5.csv", 96.5, 415.0),
    "h118": ("height_118_0.csv", 118.0, 370.0),
    "h141": ("height_141_8.csv", 141.8, 600.0),
}


def load_session(key: str):
    name, height, x0 = GOLDEN_SESSIONS[key]
    text = (DATA_DIR / name).read_text(encoding="utf-8")
    return parse_calibration_csv(text, camera_height=height, x0=x0)


@pytest.fixture(scope="session")
def set_h96():
    return load_session("h96")


@pytest.fixture(scope="session")
def set_h118():
    return load_session("h118")


@pytest.fixture(scope="session")
def set_h141():
    return load_session("h141")
