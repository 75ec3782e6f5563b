"""Python bindings for the cpnkit Colored Petri net engine.

Structured results cross the boundary as JSON text and are decoded here.
"""

import json

from ._cpnkit import CpnError, Service
from ._cpnkit import Model as _Model
from ._cpnkit import canonical_expression
from ._cpnkit import evaluate_expression as _evaluate_expression
from ._cpnkit import export_cpn_xml_stub as _export_cpn_xml_stub
from ._cpnkit import import_cpn_xml as _import_cpn_xml

__all__ = [
    "CpnError",
    "Model",
    "Service",
    "canonical_expression",
    "evaluate_expression",
    "export_cpn_xml_stub",
    "import_cpn_xml",
    "load",
]


def _text(document):
    return document if isinstance(document, str) else json.dumps(document)


class Model:
    """A loaded net with a current marking."""

    def __init__(self, document):
        self._m = _Model(_text(document))

    @property
    def clock(self):
        return self._m.clock

    @property
    def places(self):
        return self._m.places()

    @property
    def transitions(self):
        return self._m.transitions()

    @property
    def warnings(self):
        return self._m.warnings()

    def marking(self):
        return json.loads(self._m.marking())

    def enabled(self):
        return json.loads(self._m.enabled())

    def is_enabled(self, transition):
        return self._m.is_enabled(transition)

    def fire(self, transition, binding=None):
        text = None if binding is None else json.dumps(binding)
        return json.loads(self._m.fire(transition, text))

    def advance(self):
        return self._m.advance()

    def reset(self):
        self._m.reset()

    def export(self):
        return self._m.export_json()

    def dot(self, with_marking=True):
        return self._m.dot(with_marking)

    def analyze(self, max_states=100000, max_edges=500000, strip_time=False):
        return json.loads(self._m.analyze(max_states, max_edges, strip_time))

    def simulate(self, seed, max_steps=1000, max_clock=None, run_id="run-0"):
        return json.loads(self._m.simulate(seed, max_steps, max_clock, run_id))

    def event_log(self, seeds, max_steps=1000, max_clock=None, format="csv"):
        return self._m.event_log(list(seeds), max_steps, max_clock, format)

    def replay_matches(self, seed, max_steps=1000):
        return self._m.replay_matches(seed, max_steps)


def load(path):
    with open(path, encoding="utf-8") as f:
        return Model(f.read())


def evaluate_expression(text, env=None, functions=""):
    return json.loads(_evaluate_expression(text, json.dumps(env or {}), functions))


def import_cpn_xml(xml):
    """Returns (document dict, [(xml path, reason), ...])."""
    document, issues = _import_cpn_xml(xml)
    return json.loads(document), issues


def export_cpn_xml_stub(document):
    return _export_cpn_xml_stub(_text(document))
