#!/usr/bin/env python3
"""Writes the P5 program and its s^n(0) queries into the test fixtures."""
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "fixtures"


def s(n: int) -> str:
    term = "0"
    for _ in range(n):
        term = f"s({term})"
    return term


def main() -> None:
    (FIXTURES / "p5.pl").write_text(
        "% P5\n"
        "p(f(X), Y) :- p(X, s(Y)).\n"
        f"p(Z, {s(100)}) :- q.\n"
        "q :- q.\n"
    )
    (FIXTURES / "p5_queries.txt").write_text(f"p(@I, 0)\np(@I, {s(101)})\nq\n")


if __name__ == "__main__":
    main()
