"""Ultragraph C*-algebra analysis: vertex algebra, boundary dynamics and KMS states."""

import sys
from fractions import Fraction

from ._ultra import DocumentError, Graph, digest, run

__all__ = ["DocumentError", "Graph", "digest", "run", "main", "to_fraction"]


def to_fraction(value: str) -> Fraction:
    """Exact value of a scalar string such as "2/3"."""
    return Fraction(value)


def main() -> int:
    code, out, err = run(sys.argv[1:])
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code
