import json
from dataclasses import replace

import pytest

from fractal_spectra.errors import SchemaError, UnknownName
from fractal_spectra.structure import (
    BUILTIN_STRUCTURES,
    builtin_structure,
    common_gamma,
    load_structure,
    parse_structure,
    validate_structure,
)

INTERVAL_DOCUMENT = {
    "name": "interval",
    "n": 2,
    "boundary": [{"label": "q0", "cell": 1}, {"label": "q1", "cell": 2}],
    "gluings": [[[1, "q1"], [2, "q0"]]],
    "conductances": [{"u": "q0", "v": "q1", "a": 1}],
    "mass": [{"label": "q0", "b": 0.5}, {"label": "q1", "b": 0.5}],
    "alpha": [0.5, 0.5],
    "beta": [0.5, 0.5],
}

SKEW_INTERVAL_DOCUMENT = {
    **INTERVAL_DOCUMENT,
    "name": "skew-interval",
    "alpha": ["1/3", "2/3"],
    "beta": ["2/3", "1/3"],
}

INTERVAL_YAML = """
name: interval
n: 2
boundary:
  - {label: q0, cell: 1}
  - {label: q1, cell: 2}
gluings:
  - [[1, q1], [2, q0]]
conductances:
  - {u: q0, v: q1, a: 1}
mass:
  - {label: q0, b: 0.5}
  - {label: q1, b: 0.5}
alpha: [0.5, 0.5]
beta: [0.5, 0.5]
"""


def rules(report):
    return {violation["rule"] for violation in report.violations}


def test_parse_interval_document():
    structure = parse_structure(json.dumps(INTERVAL_DOCUMENT))

    assert structure.n_cells == 2
    assert structure.boundary_labels == ("q0", "q1")
    assert structure.cell_tags == (1, 2)
    assert structure.gluings == (((1, "q1"), (2, "q0")),)
    assert structure.conductance("q1", "q0") == 1.0
    assert structure.gamma == pytest.approx(4.0)
    assert structure == builtin_structure("interval")


def test_parse_yaml_document():
    assert parse_structure(INTERVAL_YAML) == parse_structure(json.dumps(INTERVAL_DOCUMENT))


def test_parse_rational_strings():
    structure = parse_structure(json.dumps(SKEW_INTERVAL_DOCUMENT))

    assert structure.alpha == pytest.approx((1 / 3, 2 / 3))
    assert structure.beta == pytest.approx((2 / 3, 1 / 3))
    assert structure.gamma == pytest.approx(4.5)
    assert validate_structure(structure).ok


def test_to_config_inverts_parse():
    structure = builtin_structure("sg3")
    assert parse_structure(json.dumps(structure.to_config())) == structure


def test_load_structure(tmp_path):
    path = tmp_path / "interval.json"
    path.write_text(json.dumps(INTERVAL_DOCUMENT))

    assert load_structure(str(path)) == builtin_structure("interval")


@pytest.mark.parametrize(
    "document",
    [
        {k: v for k, v in INTERVAL_DOCUMENT.items() if k != "mass"},
        {**INTERVAL_DOCUMENT, "extra": 1},
        {**INTERVAL_DOCUMENT, "alpha": [0.5]},
        {**INTERVAL_DOCUMENT, "n": "2"},
        {**INTERVAL_DOCUMENT, "boundary": [{"label": "q0", "cell": 1}, {"label": "q0", "cell": 2}]},
        {**INTERVAL_DOCUMENT, "gluings": [[[1, "q1"]]]},
        {**INTERVAL_DOCUMENT, "conductances": [{"u": "q0", "v": "q0", "a": 1}]},
        {**INTERVAL_DOCUMENT, "mass": [{"label": "q0", "b": "heavy"}]},
        {**INTERVAL_DOCUMENT, "beta": [True, 0.5]},
    ],
)
def test_parse_schema_errors(document):
    with pytest.raises(SchemaError):
        parse_structure(json.dumps(document))


def test_parse_garbage():
    with pytest.raises(SchemaError):
        parse_structure("[1, 2, 3]")


@pytest.mark.parametrize("name", list(BUILTIN_STRUCTURES))
def test_builtin_structures_are_valid(name):
    report = validate_structure(builtin_structure(name))

    assert report.ok
    assert report.passed
    assert report.violations == []


@pytest.mark.parametrize("name,gamma,K", [("interval", 4.0, 4.0), ("sg3", 5.0, 9.0)])
def test_derived_constants(name, gamma, K):
    report = validate_structure(builtin_structure(name))

    assert report.derived["gamma"] == pytest.approx(gamma)
    assert report.derived["K"] == pytest.approx(K)


def test_unknown_builtin():
    with pytest.raises(UnknownName):
        builtin_structure("carpet")


def test_hypothesis_violation():
    structure = replace(builtin_structure("interval"), alpha=(0.5, 0.25))
    report = validate_structure(structure)

    assert not report.ok
    assert "HypothesisH" in rules(report)
    assert report.derived["K"] is None


def test_not_irreducible():
    structure = replace(
        builtin_structure("sg3"),
        conductances={("q1", "q2"): 1.0, ("q1", "q3"): 0.0, ("q2", "q3"): 0.0},
    )
    assert "NotIrreducible" in rules(validate_structure(structure))


def test_level_one_disconnected():
    structure = replace(builtin_structure("interval"), gluings=())
    assert "Level1Disconnected" in rules(validate_structure(structure))


@pytest.mark.parametrize(
    "changes,rule",
    [
        ({"n_cells": 1, "alpha": (0.5,), "beta": (1.0,), "cell_tags": (1, 1)}, "TooFewCells"),
        ({"cell_tags": (1, 3)}, "CellTagRange"),
        ({"cell_tags": (1, 1)}, "DuplicateFixedPoint"),
        ({"gluings": (((1, "q1"), (2, "q7")),)}, "UnknownLabel"),
        ({"gluings": (((1, "q0"), (1, "q1")),)}, "SelfGluing"),
        ({"conductances": {("q0", "q1"): -1.0}}, "NegativeConductance"),
        ({"base_mass": {"q0": 0.5}}, "MissingMass"),
        ({"base_mass": {"q0": 0.5, "q1": 0.0}}, "NonpositiveMass"),
        ({"alpha": (1.5, 0.5)}, "AlphaRange"),
        ({"beta": (0.5, 0.25)}, "BetaSum"),
    ],
)
def test_validation_rules(changes, rule):
    structure = replace(builtin_structure("interval"), **changes)
    report = validate_structure(structure)

    assert not report.ok
    assert rule in rules(report)


def test_validation_report_artifact(tmp_path):
    report = validate_structure(replace(builtin_structure("interval"), alpha=(0.5, 0.25)))
    path = str(tmp_path / report.default_filename)
    report.save_json(path)

    assert type(report).from_json(path).to_dict() == report.to_dict()


def test_common_gamma():
    assert common_gamma((0.5, 0.5), (0.5, 0.5)) == pytest.approx(4.0)
    assert common_gamma((0.5, 0.25), (0.5, 0.5)) is None
    assert common_gamma((0.5, 0.5), (0.5, 0.0)) is None


def scaled(structure, conductance_factor, mass_factor):
    return replace(
        structure,
        conductances={key: conductance_factor * a for key, a in structure.conductances.items()},
        base_mass={label: mass_factor * b for label, b in structure.base_mass.items()},
    )


@pytest.mark.parametrize(
    "structure",
    [
        builtin_structure("interval"),
        builtin_structure("sg3"),
        replace(builtin_structure("interval"), alpha=(0.5, 0.25)),
        replace(builtin_structure("sg3"), conductances={("q1", "q2"): 1.0, ("q1", "q3"): 0.0, ("q2", "q3"): 0.0}),
    ],
)
@pytest.mark.parametrize("conductance_factor,mass_factor", [(3.0, 1.0), (1.0, 0.2), (7.5, 1e-3)])
def test_verdict_is_invariant_under_scaling(structure, conductance_factor, mass_factor):
    reference = validate_structure(structure)
    report = validate_structure(scaled(structure, conductance_factor, mass_factor))

    assert report.ok == reference.ok
    assert rules(report) == rules(reference)
    assert report.derived["gamma"] == reference.derived["gamma"]
