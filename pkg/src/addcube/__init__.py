"""Mechanical verification that the fixed point of 0->03, 1->43, 3->1, 4->01
contains no additive cube, with brute-force oracles and word searches."""

__version__ = "0.1.0"
