from pathlib import Path

import pytest

SERVICE_ROOT = Path(__file__).resolve().parents[1]
ARTIFACT_DIR = SERVICE_ROOT / "artifact"
DATA_DIR = SERVICE_ROOT / "data"


@pytest.fixture(scope="session")
def artifact_dir() -> Path:
    if not (ARTIFACT_DIR / "model.safetensors").exists():
        pytest.skip("released artifact not built (see scripts/build_release.py)")
    return ARTIFACT_DIR


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR
