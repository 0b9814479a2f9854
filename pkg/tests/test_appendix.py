import pytest

from fluidpricing.appendix import (
    EXAMPLE_IDS,
    example_5_demand,
    example_5_objective_grid,
    example_instance,
    run_example,
)
from fluidpricing.instance import InstanceError


@pytest.mark.parametrize("example_id", EXAMPLE_IDS)
def test_examples_pass(example_id):
    report = run_example(example_id)
    failing = [c for c in report["checks"] if not c["pass"]]
    assert report["passed"], f"example {example_id} failed checks: {failing}"


def test_unknown_example_rejected():
    with pytest.raises(InstanceError):
        example_instance(9)
    with pytest.raises(InstanceError):
        run_example(0)


def test_example5_grid_shape():
    axis, g = example_5_objective_grid(resolution=50)
    assert axis.shape == (50,)
    assert g.shape == (50, 50)
    d = example_5_demand()
    assert d.n_types == 2


def test_example5_reports_maxima_and_kinks():
    report = run_example(5)
    assert len(report["local_maxima"]) >= 2
    assert len(report["kinks"]) >= 1
    # the two dominant maxima sit on the diagonal near the known locations
    tops = sorted(report["local_maxima"], key=lambda m: -m["g"])[:2]
    for m in tops:
        assert m["lambda"][0] == pytest.approx(m["lambda"][1], abs=0.02)
