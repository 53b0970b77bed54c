"""Weighted composition operators on truncated trees.

Specs are plain dicts in the same JSON formats the command-line tool reads.
"""

import json

from ._treewco import SCHEMA_VERSION, SpecError
from . import _treewco

__all__ = ["Operator", "SpecError", "SCHEMA_VERSION", "fixture_names", "run_fixture", "export_tree", "tree_dot"]


def _text(spec):
    return spec if isinstance(spec, str) else json.dumps(spec)


class Operator:
    """psi * (f o phi) on a truncated tree."""

    def __init__(self, tree, psi, phi):
        self._op = _treewco.Operator(_text(tree), _text(psi), _text(phi))

    @property
    def size(self):
        return self._op.size

    @property
    def depth(self):
        return self._op.depth

    def labels(self):
        return self._op.labels()

    def psi_values(self):
        return self._op.psi_values()

    def apply(self, values):
        return self._op.apply(list(values))

    def linf_op_norm(self):
        return self._op.linf_op_norm()

    def linf_ess_norm_tail(self, n):
        return self._op.linf_ess_norm_tail(n)

    def lip_bounds(self):
        return self._op.lip_bounds()

    def lip_exact_norm(self):
        return self._op.lip_exact_norm()

    def lip_ess_norm_tail(self, n):
        return self._op.lip_ess_norm_tail(n)

    def j_linf(self):
        return self._op.j_linf()

    def k_linf(self):
        return self._op.k_linf()

    def j_lip_bracket(self):
        return self._op.j_lip_bracket()

    def k_lip_bracket(self):
        return self._op.k_lip_bracket()

    def analyze(self, depths=None, tol=1e-6):
        return json.loads(self._op.analyze(depths, tol))

    def norms(self):
        return json.loads(self._op.norms())

    def oracle(self, seed=0):
        return json.loads(self._op.oracle(seed))

    def dot(self):
        return self._op.dot()


def fixture_names():
    return _treewco.fixture_names()


def run_fixture(name):
    """Report dict and the list of unmet expectations."""
    report, failures = _treewco.run_fixture(name)
    return json.loads(report), failures


def export_tree(tree):
    return json.loads(_treewco.export_tree(_text(tree)))


def tree_dot(tree):
    return _treewco.tree_dot(_text(tree))
