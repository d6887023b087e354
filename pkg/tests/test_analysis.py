import numpy as np
import pytest

from fractal_spectra.analysis import (
    ConvergenceReport,
    LevelRecord,
    Verdict,
    compare_replication,
    counting_gap,
    density_of_states,
    dos_convergence,
    hausdorff_distance,
    interlacing_check,
    level_operator,
    nd_deficiency,
    nd_density,
    nd_density_convergence,
    select_words,
    spectrum_overlap,
    verify_deficiency,
    verify_nd_identity,
    verify_nd_replication,
    verify_norm_bound,
    verify_projection_bound,
    verify_state_density_identity,
    verify_trace_identity,
    verify_word_invariance,
)
from fractal_spectra.config import CapsConfig, ToleranceConfig, WordsConfig
from fractal_spectra.errors import EmptyInterior, LengthMismatch, UsageError
from fractal_spectra.launchers.inline.config import InlineConfig
from fractal_spectra.launchers.inline.launcher import InlineLauncher
from fractal_spectra.launchers.process.config import ProcessConfig
from fractal_spectra.launchers.process.launcher import ProcessLauncher
from fractal_spectra.lattice import BlowupWord
from fractal_spectra.spectra import PointMeasure, nd_subspace
from fractal_spectra.structure import SelfSimilarStructure, builtin_structure

ENUMERATE = WordsConfig(enumerate=True)


def skew_interval() -> SelfSimilarStructure:
    return SelfSimilarStructure(
        n_cells=2,
        boundary_labels=("q0", "q1"),
        cell_tags=(1, 2),
        gluings=(((1, "q1"), (2, "q0")),),
        conductances={("q0", "q1"): 1.0},
        base_mass={"q0": 0.5, "q1": 0.5},
        alpha=(1 / 3, 2 / 3),
        beta=(2 / 3, 1 / 3),
        gamma=4.5,
        name="skew-interval",
    )


STRUCTURES = {"interval": lambda: builtin_structure("interval"), "sg3": lambda: builtin_structure("sg3")}
STRUCTURES["skew-interval"] = skew_interval


def test_density_of_states_interval():
    measure = density_of_states(builtin_structure("interval"), 1)

    np.testing.assert_allclose(measure.locations, [-4.0, -2.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(measure.weights, [0.5, 0.5, 0.5])


def test_density_of_states_dirichlet_level_zero():
    with pytest.raises(EmptyInterior):
        density_of_states(builtin_structure("interval"), 0, bc="dirichlet")


def test_nd_density_sg3():
    measure = nd_density(builtin_structure("sg3"), 2)

    assert measure.total_mass == pytest.approx(4 / 9)
    np.testing.assert_allclose(measure.locations, [-9.0, -7.5], atol=1e-9)


def test_dos_convergence():
    report, measures = dos_convergence(builtin_structure("sg3"), [3, 1, 2])

    assert [record.n for record in report.records] == [1, 2, 3]
    assert report.records[0].distance is None
    assert all(record.distance >= 0 for record in report.records[1:])
    assert report.passed
    for n, measure in zip([1, 2, 3], measures):
        assert measure.total_mass == pytest.approx([6, 15, 42][n - 1] / 3**n)


def test_nd_density_convergence():
    report, measures = nd_density_convergence(builtin_structure("sg3"), [1, 2, 3])

    assert report.passed
    masses = [measure.total_mass for measure in measures]
    assert masses[0] == 0.0
    assert masses == sorted(masses)

    with pytest.raises(UsageError):
        nd_density_convergence(builtin_structure("sg3"), [0, 1])


@pytest.mark.parametrize("name", list(STRUCTURES))
@pytest.mark.parametrize("n", [1, 2])
def test_state_density_identity_is_exact(name, n):
    report = verify_state_density_identity(STRUCTURES[name](), n, ENUMERATE)
    verdict = report.verdicts[0]

    assert report.passed
    assert verdict.check == "identity"
    assert verdict.discrepancy <= 1e-12
    assert report.words == {"mode": "enumerate", "count": 2**n if name != "sg3" else 3**n, "seed": None}


@pytest.mark.parametrize("n", [3, 4])
def test_state_density_identity_is_exact_on_deeper_interval_levels(n):
    report = verify_state_density_identity(builtin_structure("interval"), n, ENUMERATE)

    assert report.passed
    assert report.verdicts[0].discrepancy <= 1e-9
    assert report.words["count"] == 2**n


def test_state_density_identity_interval_level_one():
    report = verify_state_density_identity(builtin_structure("interval"), 1, ENUMERATE)

    assert report.verdicts[0].discrepancy <= 1e-12
    assert report.verdicts[0].details["target_mass"] == pytest.approx(1.5)
    assert report.verdicts[0].details["average_mass"] == pytest.approx(1.5)


def test_state_density_identity_monte_carlo():
    words = WordsConfig(samples=200, seed=0)
    report = verify_state_density_identity(skew_interval(), 2, words)

    assert report.passed
    assert report.words == {"mode": "sample", "count": 200, "seed": 0}
    assert report.verdicts[0].details["max_stderr"] > 0


@pytest.mark.parametrize("n", [1, 2])
def test_nd_identity(n):
    report = verify_nd_identity(builtin_structure("sg3"), n, ENUMERATE)

    assert report.passed
    assert report.verdicts[0].check == "nd-identity"


def test_nd_identity_requires_positive_level():
    with pytest.raises(UsageError):
        verify_nd_identity(builtin_structure("sg3"), 0, ENUMERATE)


@pytest.mark.parametrize("name", list(STRUCTURES))
def test_trace_identity(name):
    report = verify_trace_identity(STRUCTURES[name](), 2)

    assert report.passed
    assert report.verdicts[0].details["traced_mass"] == pytest.approx(report.verdicts[0].details["counting_mass"])


def test_trace_identity_other_word():
    report = verify_trace_identity(skew_interval(), 2, BlowupWord((2, 1)))

    assert report.passed
    assert report.words["word"] == "2,1"


@pytest.mark.parametrize("n", [1, 2, 3])
def test_nd_replication(n):
    report = verify_nd_replication(builtin_structure("sg3"), n)

    assert report.passed
    assert [record.n for record in report.records] == [n, n + 1]


def test_compare_replication_detects_missing_copies():
    coarse = PointMeasure.from_values([-9.0], [1.0], cluster_tol=1e-9)
    fine = PointMeasure.from_values([-9.0], [2.0], cluster_tol=1e-9)

    verdict = compare_replication(coarse, fine, 3, match_tol=1e-7, level=2)
    assert not verdict.passed
    assert verdict.discrepancy == pytest.approx(1.0)
    assert verdict.details["missing"] == [{"lambda": -9.0, "required": 3.0, "found": 2.0}]

    assert compare_replication(coarse, fine.scaled(1.5), 3, match_tol=1e-7).passed


@pytest.mark.parametrize("name", list(STRUCTURES))
@pytest.mark.parametrize("n", [1, 2, 3])
def test_interlacing(name, n):
    report = interlacing_check(STRUCTURES[name](), n)

    assert report.passed
    assert report.verdicts[0].details["max_gap"] <= report.verdicts[0].details["boundary_size"]


@pytest.mark.parametrize("name,n", [("interval", 4), ("interval", 5), ("sg3", 4)])
def test_interlacing_on_deeper_levels(name, n):
    report = interlacing_check(builtin_structure(name), n)

    assert report.passed
    assert report.verdicts[0].details["max_gap"] <= len(builtin_structure(name).boundary_labels)


def test_counting_gap():
    assert counting_gap(np.array([-4.0, -2.0, 0.0]), np.array([-2.0]), 1e-9) == 1
    assert counting_gap(np.array([-1.0, 0.0]), np.array([-1.0, 0.0]), 1e-9) == 0
    assert counting_gap(np.array([-3.0, -2.0, -1.0]), np.zeros(0), 1e-9) == 3


def test_deficiency_interval():
    # no N-D eigenfunction on the interval, so d_n = |V_n| / 2^n = 1 + 2^-n
    expected = [1 + 2.0**-n for n in range(1, 7)]
    np.testing.assert_allclose(nd_deficiency(builtin_structure("interval"), 6), expected, rtol=1e-12)


def test_deficiency_sg3():
    sequence = nd_deficiency(builtin_structure("sg3"), 3)

    assert sequence[0] == pytest.approx(2.0)
    assert sequence[1] == pytest.approx(11 / 9)
    assert sequence[2] == pytest.approx(7 / 9)


@pytest.mark.parametrize("n,dimension", [(1, 0), (2, 4), (3, 21), (4, 82)])
def test_nd_dimension_sg3(n, dimension):
    op = level_operator(builtin_structure("sg3"), n)

    assert nd_subspace(op).dimension == dimension
    assert (op.n_vertices - dimension) / 3**n == pytest.approx(nd_deficiency(builtin_structure("sg3"), n)[-1])


@pytest.mark.parametrize("name", ["interval", "sg3"])
def test_verify_deficiency(name):
    report = verify_deficiency(builtin_structure(name), 3)

    assert report.passed
    assert len(report.records) == 3
    assert report.verdicts[0].details["sequence"] == [r.summary["deficiency"] for r in report.records]


@pytest.mark.parametrize("name,n,k0", [("interval", 3, 1), ("sg3", 2, 1), ("sg3", 3, 2)])
def test_projection_bound(name, n, k0):
    report = verify_projection_bound(builtin_structure(name), n, k0, ENUMERATE)

    assert report.passed
    assert report.verdicts[0].check == "projection"


def test_projection_bound_errors():
    with pytest.raises(UsageError):
        verify_projection_bound(builtin_structure("sg3"), 2, 3, ENUMERATE)
    with pytest.raises(UsageError):
        verify_projection_bound(builtin_structure("sg3"), 2, 0, ENUMERATE)


@pytest.mark.parametrize("name", list(STRUCTURES))
def test_norm_bound_sweep(name):
    assert verify_norm_bound(STRUCTURES[name](), 2, ENUMERATE).passed


@pytest.mark.parametrize("name", list(STRUCTURES))
def test_word_invariance(name):
    report = verify_word_invariance(STRUCTURES[name](), 3, ENUMERATE)

    assert report.passed
    assert report.verdicts[0].details["reference_word"] == "1,1,1"


def test_spectrum_overlap():
    structure = builtin_structure("sg3")
    caps = CapsConfig()
    words, info = select_words(structure, 2, ENUMERATE, caps)

    report = spectrum_overlap(structure, 2, words, caps=caps, words_info=info)

    assert report.passed
    assert report.words["count"] == 9
    assert set(report.verdicts[0].details["labels"]) == {"q1", "q2", "q3"}


def test_hausdorff_distance():
    assert hausdorff_distance(np.array([0.0, -1.0]), np.array([-1.0, 0.0])) == 0.0
    assert hausdorff_distance(np.array([0.0]), np.array([0.0, -2.0])) == pytest.approx(2.0)
    assert hausdorff_distance(np.zeros(0), np.zeros(0)) == 0.0
    assert hausdorff_distance(np.zeros(0), np.array([1.0])) == float("inf")


def test_select_words():
    structure = builtin_structure("interval")

    words, info = select_words(structure, 2, WordsConfig(word="2,1"), CapsConfig())
    assert [w.letters for w in words] == [(2, 1)]
    assert info == {"mode": "word", "count": 1, "seed": None, "word": "2,1"}

    with pytest.raises(LengthMismatch):
        select_words(structure, 3, WordsConfig(word="2,1"), CapsConfig())


def test_sweeps_do_not_depend_on_the_launcher():
    structure = builtin_structure("sg3")
    words = WordsConfig(samples=12, seed=3)
    tolerances = ToleranceConfig()

    inline = verify_state_density_identity(
        structure, 2, words, tolerances=tolerances, launcher=InlineLauncher(InlineConfig())
    )
    process = verify_state_density_identity(
        structure, 2, words, tolerances=tolerances, launcher=ProcessLauncher(ProcessConfig(jobs=2))
    )

    assert inline.to_dict() == process.to_dict()


def test_convergence_report_roundtrip(tmp_path):
    report = verify_deficiency(builtin_structure("sg3"), 2)
    path = str(tmp_path / report.default_filename)
    report.save_json(path)

    loaded = ConvergenceReport.from_json(path)
    assert loaded.to_dict() == report.to_dict()
    assert loaded.passed == report.passed


def test_convergence_report_flat_dict():
    report = verify_deficiency(builtin_structure("interval"), 3)
    flat = report.to_dict(flat=True)

    assert flat["check"] == "deficiency"
    assert flat["passed"] == report.passed
    assert not any(isinstance(value, dict) for value in flat.values())


def test_verdict_serialization():
    verdict = Verdict(check="identity", level=1, discrepancy=0.0, tolerance=1e-9, passed=True)

    assert verdict.to_dict() == {
        "check": "identity",
        "level": 1,
        "discrepancy": 0.0,
        "tolerance": 1e-9,
        "pass": True,
        "details": {},
    }
    assert Verdict.from_dict(verdict.to_dict()) == verdict


def test_report_invariants():
    with pytest.raises(ValueError):
        ConvergenceReport(
            check="dos", structure="sg3", records=[LevelRecord(n=2, n_vertices=15), LevelRecord(n=1, n_vertices=6)]
        )
    with pytest.raises(ValueError):
        ConvergenceReport(check="dos", structure="sg3", records=[LevelRecord(n=1, n_vertices=6, distance=-1.0)])
