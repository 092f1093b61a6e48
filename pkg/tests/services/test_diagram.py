# tests/services/test_diagram.py

import pytest

from autocat.errors import ParameterError
from autocat.programs.models_branch import Branch, FoldRecord
from autocat.services.diagram import PRESETS, describe, get_preset, gnuplot_script, preset_names


def test_lookup_ignores_case():
    assert get_preset("c4-critical") is PRESETS["C4-critical"]
    assert get_preset("C3").n == pytest.approx(1.25)


def test_unknown_preset():
    with pytest.raises(ParameterError):
        get_preset("C9")


def test_preset_names():
    assert preset_names() == list(PRESETS)
    assert set(describe()) == set(PRESETS)
    assert describe("c5") == {"C5": PRESETS["C5"].description}


def test_gnuplot_script_marks_folds():
    branch = Branch(folds=[FoldRecord(lam_star=0.25, index=3, index_before=2, index_after=4)])
    script = gnuplot_script(PRESETS["C1"], branch, "c1.csv")
    assert 'plot "c1.csv" skip 1 using 1:2' in script
    assert "set arrow 1 from 0.25, graph 0" in script
    assert script.endswith("\n")
