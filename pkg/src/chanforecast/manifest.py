"""Run manifests: config echo, version, seed, timing and SHA-256 digests of files."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__


class ManifestError(ValueError):
    """A manifest is malformed or a digest does not match."""


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Provenance of one command invocation.

    Paths in ``inputs`` and ``outputs`` are stored relative to the manifest's
    directory when possible. In deterministic mode ``wall_clock_s`` is left
    out so that reruns produce identical manifests.
    """

    command: str
    config: dict
    seed: int
    version: str = __version__
    wall_clock_s: float | None = None
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "version": self.version,
            "wall_clock_s": self.wall_clock_s,
            "inputs": self.inputs,
            "outputs": self.outputs,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        try:
            d = json.loads(text)
            return cls(command=d["command"], config=d["config"], seed=int(d["seed"]), version=d["version"],
                       wall_clock_s=d.get("wall_clock_s"), inputs=dict(d.get("inputs", {})),
                       outputs=dict(d.get("outputs", {})))
        except (KeyError, TypeError, ValueError) as exc:
            raise ManifestError(f"malformed manifest: {exc}") from None


def _rel(path: Path, base: Path) -> str:
    try:
        return str(path.resolve().relative_to(base.resolve()))
    except ValueError:
        return str(path.resolve())


def write_manifest(path: str | Path, command: str, config: dict, seed: int, outputs, inputs=(),
                   wall_clock_s: float | None = None) -> RunManifest:
    path = Path(path)
    base = path.parent
    man = RunManifest(
        command=command,
        config=config,
        seed=seed,
        wall_clock_s=None if wall_clock_s is None else round(float(wall_clock_s), 3),
        inputs={_rel(Path(p), base): sha256_file(p) for p in inputs},
        outputs={_rel(Path(p), base): sha256_file(p) for p in outputs},
    )
    path.write_text(man.to_json(), encoding="utf-8")
    return man


def verify_manifest(path: str | Path) -> RunManifest:
    """Recompute every output digest (and every input still present); raise on mismatch."""
    path = Path(path)
    man = RunManifest.from_json(path.read_text(encoding="utf-8"))
    for group, required in ((man.outputs, True), (man.inputs, False)):
        for name, digest in group.items():
            p = Path(name) if Path(name).is_absolute() else path.parent / name
            if not p.exists():
                if required:
                    raise ManifestError(f"{name}: listed in manifest but missing")
                continue
            if sha256_file(p) != digest:
                raise ManifestError(f"{name}: digest mismatch")
    return man
