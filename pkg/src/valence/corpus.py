"""Locating and loading the shipped corpus of graphs and machines."""

from __future__ import annotations

from pathlib import Path

from .automata import load_automaton
from .graph_core import parse_graph


def corpus_dir(explicit: str | Path | None = None) -> Path:
    """``explicit`` if given, else the corpus next to the source tree, else ./corpus."""
    if explicit is not None:
        p = Path(explicit)
        if not p.is_dir():
            raise FileNotFoundError(f"corpus directory {p} does not exist")
        return p
    for p in (Path(__file__).resolve().parents[2] / "corpus", Path.cwd() / "corpus"):
        if p.is_dir():
            return p
    raise FileNotFoundError("no corpus directory found; pass --corpus")


def load_graph(path):
    return parse_graph(Path(path).read_text())


def graph(name: str, root: Path | None = None):
    return load_graph(corpus_dir(root) / "graphs" / f"{name}.graph")


def machine(name: str, root: Path | None = None):
    return load_automaton(str(corpus_dir(root) / "machines" / f"{name}.auto"))


def graph_names(root: Path | None = None) -> list:
    return sorted(p.stem for p in (corpus_dir(root) / "graphs").glob("*.graph"))


def machine_names(root: Path | None = None) -> list:
    return sorted(p.stem for p in (corpus_dir(root) / "machines").glob("*.auto"))
