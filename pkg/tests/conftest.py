"""Shared fixtures: an in-process CLI runner and synthetic dataset files."""
from __future__ import annotations

import pytest

from demotrend.cli import main
from demotrend.synth import SynthConfig, make_dataset, write_dataset


def parse_kv(out: str) -> dict[str, str]:
    """Parse the `key = value` lines a command prints to stdout."""
    pairs: dict[str, str] = {}
    for line in out.splitlines():
        key, sep, value = line.partition(" = ")
        if sep:
            pairs[key.strip()] = value.strip()
    return pairs


@pytest.fixture
def run_cli(capsys):
    """Invoke the command line in-process and capture both streams."""

    def run(*argv) -> tuple[int, str, str]:
        code = main([str(a) for a in argv])
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return run


@pytest.fixture(scope="session")
def noiseless_files(tmp_path_factory):
    """Dataset written with zero return noise; fits recover truth exactly."""
    out = tmp_path_factory.mktemp("noiseless")
    return write_dataset(make_dataset(SynthConfig(seed=3, return_noise_sd=0.0)), out)


@pytest.fixture(scope="session")
def noisy_files(tmp_path_factory):
    """Dataset with the default 0.02 return noise, seed 7."""
    out = tmp_path_factory.mktemp("noisy")
    return write_dataset(make_dataset(SynthConfig(seed=7)), out)
