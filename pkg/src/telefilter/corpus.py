"""Bundled jittery-operator corpus.

Ten 60-second jittery-pick-place hand traces (fixed seeds) shipped as
package data.  The fault-dichotomy and jerk-reduction acceptance checks run
over exactly these files; `manifest()` carries the generator specs so the
bundle can be regenerated and verified byte-for-byte
(``python -m telefilter.corpus --regen``).
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .protocol import CommandMessage
from .synth import SyntheticTraceSpec, dumps_command_log, generate_trace, load_command_log

CORPUS_SIZE = 10
_SEED_BASE = 100


def manifest() -> list[SyntheticTraceSpec]:
    """Generator specs of the bundled traces, in file order."""
    return [
        SyntheticTraceSpec(
            kind="jittery-pick-place",
            duration_s=60.0,
            amplitude_m=0.25,
            seed=_SEED_BASE + i,
        )
        for i in range(1, CORPUS_SIZE + 1)
    ]


def trace_name(index: int) -> str:
    return f"jittery_{index:02d}"


def corpus_dir() -> Path:
    return Path(resources.files("telefilter").joinpath("corpus"))


def trace_path(index: int) -> Path:
    """Path of bundled trace `index` (1-based)."""
    if not (1 <= index <= CORPUS_SIZE):
        raise ValueError(f"corpus index must be in 1..{CORPUS_SIZE}")
    return corpus_dir() / f"{trace_name(index)}.jsonl"


def load_trace(index: int) -> list[CommandMessage]:
    commands, _ = load_command_log(trace_path(index))
    return commands


def iter_traces():
    """Yields (name, commands) for every bundled trace."""
    for i in range(1, CORPUS_SIZE + 1):
        yield trace_name(i), load_trace(i)


def regenerate(target_dir: Path | None = None) -> list[Path]:
    """Write the corpus files from the manifest; returns written paths."""
    target = Path(target_dir) if target_dir is not None else corpus_dir()
    target.mkdir(parents=True, exist_ok=True)
    written = []
    specs = manifest()
    for i, spec in enumerate(specs, start=1):
        path = target / f"{trace_name(i)}.jsonl"
        path.write_text(dumps_command_log(generate_trace(spec), spec), encoding="utf-8")
        written.append(path)
    manifest_path = target / "manifest.json"
    manifest_path.write_text(
        json.dumps([s.to_dict() for s in specs], indent=2) + "\n", encoding="utf-8"
    )
    written.append(manifest_path)
    return written


if __name__ == "__main__":
    import sys

    if "--regen" in sys.argv:
        for p in regenerate():
            print(f"wrote {p}")
    else:
        print(f"bundled corpus: {CORPUS_SIZE} traces in {corpus_dir()}")
