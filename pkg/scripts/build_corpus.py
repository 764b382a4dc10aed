#!/usr/bin/env python3
"""Regenerate corpus/*.json from the builders in hopfjordan.corpus."""
import sys
from pathlib import Path

ROOT_DIR = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT_DIR))

from hopfjordan.corpus import shipped  # noqa: E402
from hopfjordan.schemas.model import ModelSpecFile  # noqa: E402


def main() -> None:
    out_dir = ROOT_DIR / "corpus"
    out_dir.mkdir(exist_ok=True)
    for stem, entry in shipped().items():
        spec = ModelSpecFile.from_model(entry.model, description=entry.description)
        path = out_dir / f"{stem}.json"
        path.write_text(spec.to_corpus_text(), encoding="utf-8")
        print(f"wrote {path.relative_to(ROOT_DIR)}")


if __name__ == "__main__":
    main()
