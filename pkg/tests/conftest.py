import json
from pathlib import Path
from types import SimpleNamespace

import pytest

from proofloop.backend import ScriptedMockBackend
from proofloop.clock import FakeClock
from proofloop.orchestrator import RunConfig, run

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture()
def fake_clock() -> FakeClock:
    return FakeClock()


@pytest.fixture(scope="session")
def default_config() -> RunConfig:
    return RunConfig.from_file(FIXTURES / "run_config.json")


@pytest.fixture(scope="session")
def default_script() -> dict:
    return json.loads((FIXTURES / "default_script.json").read_text("utf-8"))


@pytest.fixture(scope="session")
def default_run(tmp_path_factory, default_config):
    """One completed default mock run, shared by read-only inspections."""
    run_dir = tmp_path_factory.mktemp("default-run") / "run"
    backend = ScriptedMockBackend.from_file(FIXTURES / "default_script.json")
    result = run(default_config, run_dir, clock=FakeClock(), backend=backend)
    return SimpleNamespace(result=result, run_dir=run_dir, backend=backend,
                           config=default_config)


@pytest.fixture()
def write_script(tmp_path):
    def _write(script: dict, name: str = "script.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(script), "utf-8")
        return path

    return _write
