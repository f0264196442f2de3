import textwrap

import pytest

from pseudoanalytic.errors import ScenarioError
from pseudoanalytic.grid_calculus import GridDomain, ScalarField
from pseudoanalytic.scenarios import (
    Scenario,
    get_scenario,
    load_scenarios,
    resolve_scenario,
    validate_references,
)
from pseudoanalytic.vfld import write_field


def _ini(tmp_path, text: str, name: str = "scenarios.ini"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text))
    return path


def test_shipped_scenarios():
    scenarios = load_scenarios()
    assert set(scenarios) == {"trivial-f1", "cyl-f-r", "sph-inv-r", "exp-x1", "core"}
    cyl = scenarios["cyl-f-r"]
    assert cyl.origin == (1.0, 1.0, 0.0)
    assert cyl.resolutions == [17, 33]
    assert cyl.potential_resolutions == [16, 24]
    assert cyl.ratio_window == (3.5, 4.5)
    assert "triplet" in cyl.checks
    assert cyl.f_is_profile
    assert scenarios["core"].checks == ["algebra", "dirac-square", "plane", "rot-inverse"]
    assert scenarios["core"].potential_resolutions == [20, 28]


def test_unknown_scenario_name():
    with pytest.raises(ScenarioError, match="unknown scenario"):
        get_scenario("no-such-thing")


def test_resolve_named_section_in_a_file(tmp_path):
    path = _ini(
        tmp_path,
        """
        [a]
        origin = 0, 0, 0
        extent = 1, 1, 1
        f = one

        [b]
        origin = 0, 0, 0
        extent = 2, 2, 2
        f = exp-x1
        resolutions = 9, 17   # coarse
        """,
    )
    b = resolve_scenario(f"{path}:b")
    assert b.extent == (2.0, 2.0, 2.0)
    assert b.resolutions == [9, 17]
    assert b.domain(9) == GridDomain((0.0, 0.0, 0.0), (2.0, 2.0, 2.0), (9, 9, 9))
    with pytest.raises(ScenarioError, match="holds 2 scenarios"):
        resolve_scenario(str(path))


def test_single_section_file_resolves_without_a_name(tmp_path):
    path = _ini(tmp_path, "[only]\norigin = 0,0,0\nextent = 1,1,1\nf = one\n", name="one.ini")
    assert resolve_scenario(str(path)).name == "only"


@pytest.mark.parametrize(
    "body",
    [
        "resolutions = 33, 17",
        "checks = quartet, magic",
        "checks = conjugate",
        "checks = algebra, rot-inverse",
        "ratio_window = 4.5, 3.5",
        "origin = 0, 0",
        "f = missing.vfld",
        "gauge = missing.vfld",
    ],
    ids=[
        "decreasing",
        "unknown-check",
        "no-potential-grid",
        "rot-inverse-without-potential-grid",
        "window",
        "origin",
        "f-file",
        "gauge-file",
    ],
)
def test_invalid_scenarios(tmp_path, body):
    base = {"origin": "0, 0, 0", "extent": "1, 1, 1", "f": "one"}
    key = body.split("=")[0].strip()
    base[key] = body.split("=", 1)[1].strip()
    text = "[bad]\n" + "\n".join(f"{k} = {v}" for k, v in base.items()) + "\n"
    path = _ini(tmp_path, text)
    with pytest.raises(ScenarioError):
        load_scenarios(path)


def test_unreadable_scenario_files(tmp_path):
    with pytest.raises(ScenarioError):
        load_scenarios(tmp_path / "absent.ini")
    garbage = _ini(tmp_path, "origin = 0, 0, 0\n")
    with pytest.raises(ScenarioError):
        load_scenarios(garbage)


def test_file_based_f_is_resolved_next_to_the_scenario(tmp_path):
    domain = GridDomain.cube((1.0, 1.0, 0.0), (1.0, 1.0, 1.0), 9)
    write_field(tmp_path / "f.vfld", ScalarField.from_function(domain, lambda x, y, z: 1.0 + x * y))
    path = _ini(tmp_path, "[file-f]\norigin = 1,1,0\nextent = 1,1,1\nf = f.vfld\n")
    scenario = resolve_scenario(f"{path}:file-f")
    assert not scenario.f_is_profile
    assert scenario.fixed_domain() == domain
    F = scenario.factorizer(domain)
    assert F.f.domain == domain
    with pytest.raises(ScenarioError):
        scenario.factorizer(domain.with_resolution(11))


def test_bad_harmonic_spec_is_a_scenario_error():
    scenario = Scenario(name="s", origin=(0, 0, 0), extent=(1, 1, 1), f="one", rho="sinh")
    with pytest.raises(ScenarioError):
        validate_references(scenario)


def test_file_gauge_fixes_the_grid(tmp_path):
    domain = GridDomain.cube((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), 9)
    write_field(tmp_path / "h.vfld", ScalarField.from_function(domain, lambda x, y, z: x * y + z))
    path = _ini(tmp_path, "[gauged]\norigin = 0,0,0\nextent = 1,1,1\nf = one\ngauge = h.vfld\n")
    scenario = resolve_scenario(str(path))
    assert scenario.f_is_profile
    assert scenario.fixed_domain() == domain
    assert scenario.gauge_for(domain).h.domain == domain
    with pytest.raises(ScenarioError, match="gauge lives on"):
        scenario.gauge_for(domain.with_resolution(17))


def test_f_and_gauge_files_must_share_a_grid(tmp_path):
    coarse = GridDomain.cube((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), 9)
    write_field(tmp_path / "f.vfld", ScalarField.from_function(coarse, lambda x, y, z: 1.0 + x * y))
    write_field(tmp_path / "h.vfld", ScalarField.from_function(coarse.with_resolution(11), lambda x, y, z: x - z))
    path = _ini(tmp_path, "[mixed]\norigin = 0,0,0\nextent = 1,1,1\nf = f.vfld\ngauge = h.vfld\n")
    scenario = resolve_scenario(str(path))
    with pytest.raises(ScenarioError, match="different grids"):
        validate_references(scenario)
