import math

import numpy as np
import pytest

from swansusy import fockspace as fs
from swansusy import superalgebra as sa
from swansusy.errors import GradeError, LayoutError
from swansusy.report import all_passed


@pytest.fixture(scope="module")
def gens32():
    return sa.su11_single_mode(fs.ModeLayout.of(fs.Boson(32), fs.Fermion()))


@pytest.fixture(scope="module")
def p32(gens32):
    return fs.interior_projector(gens32.layout, 8)


def test_single_mode_K0_diagonal():
    g = sa.su11_single_mode(fs.ModeLayout.of(fs.Boson(4), fs.Fermion()))
    assert np.allclose(g.K0.matrix, np.kron(np.diag([0.25, 0.75, 1.25, 1.75]), np.eye(2)), atol=0)


def test_su11_commutator_and_entry(gens32):
    lay = gens32.layout
    p = fs.interior_projector(lay, 4)
    lhs = fs.sandwich(p, fs.commutator(gens32.Kplus, gens32.Kminus))
    assert np.linalg.norm(lhs + 2 * fs.sandwich(p, gens32.K0)) < 1e-12
    # <1_B 1_F | V+ | 0_B 0_F>: basis index = 2*n_B + n_F
    assert gens32.Vplus.matrix[3, 0] == pytest.approx(1 / math.sqrt(2), abs=1e-16)


def test_layout_and_generator_errors():
    with pytest.raises(LayoutError):
        sa.su11_single_mode(fs.ModeLayout.of(fs.Boson(4), fs.Boson(4)))
    g = sa.su11_single_mode(fs.ModeLayout.of(fs.Boson(4), fs.Fermion()))
    with pytest.raises(GradeError):
        g.replace(Vplus=fs.TruncatedOperator(g.layout, g.Vplus.matrix, fs.EVEN))
    with pytest.raises(LayoutError):
        g.replace(K0=fs.identity(fs.ModeLayout.of(fs.Boson(5), fs.Fermion())))
    bos = sa.su11_single_mode(fs.ModeLayout.of(fs.Boson(4)))
    assert not bos.has_odd and bos.symbols() == ("K0", "K+", "K-")
    with pytest.raises(KeyError):
        bos["Y"]


def test_table_contents():
    t = sa.standard_relation_table()
    assert dict(t.find("V+", "W-").rhs) == {"K0": 1.0, "Y": -1.0}
    assert t.find("V+", "W-").kind == "anticommutator"
    assert dict(t.find("Y", "W+").rhs) == {"W+": -0.5}
    assert t.find("V+", "V-").rhs == ()
    assert t.find("K+", "K-").kind == "commutator"
    # every unordered pair (including odd squares) appears exactly once
    assert len(t) == 8 * 9 // 2 - 4  # no [X, X] for the four even generators
    for e in t:
        odd = {"V+", "V-", "W+", "W-"}
        assert (e.kind == "anticommutator") == (e.left in odd and e.right in odd)


def test_nonvanishing_list_matches_paper():
    t = sa.standard_relation_table()
    nonzero = {e.label: dict(e.rhs) for e in t if e.rhs}
    expected = {
        "[K0,K+]": {"K+": 1.0}, "[K0,K-]": {"K-": -1.0}, "[K+,K-]": {"K0": -2.0},
        "[K0,V+]": {"V+": 0.5}, "[K0,V-]": {"V-": -0.5},
        "[K0,W+]": {"W+": 0.5}, "[K0,W-]": {"W-": -0.5},
        "[K+,V-]": {"V+": -1.0}, "[K-,V+]": {"V-": 1.0},
        "[K+,W-]": {"W+": -1.0}, "[K-,W+]": {"W-": 1.0},
        "[Y,V+]": {"V+": 0.5}, "[Y,V-]": {"V-": 0.5},
        "[Y,W+]": {"W+": -0.5}, "[Y,W-]": {"W-": -0.5},
        "{V+,W+}": {"K+": 1.0}, "{V-,W-}": {"K-": 1.0},
        "{V+,W-}": {"K0": 1.0, "Y": -1.0}, "{V-,W+}": {"K0": 1.0, "Y": 1.0},
    }
    assert nonzero == expected


def test_check_relations_pass(gens32, p32):
    res = sa.check_relations(gens32, sa.standard_relation_table(), p32, 1e-10)
    assert len(res) == len(sa.standard_relation_table())
    assert all_passed(res), [r for r in res if not r.passed]
    assert sa.check_relations(gens32, sa.RelationTable(), p32, 1e-10) == []


def test_check_relations_detects_corruption(gens32, p32):
    m = gens32.Kplus.matrix.copy()
    m[4, 0] += 1e-3  # <2_B,0_F|K+|0_B,0_F>
    bad = gens32.replace(Kplus=fs.TruncatedOperator(gens32.layout, m))
    res = {r.name: r for r in sa.check_relations(bad, sa.standard_relation_table(), p32, 1e-10)}
    r = res["relation [K+,K-]"]
    assert not r.passed
    # the reported residual is relative to |PK+P|*|PK-P| + 1; undoing that
    # normalization recovers the injected 1e-3
    scale = (np.linalg.norm(fs.sandwich(p32, bad.Kplus))
             * np.linalg.norm(fs.sandwich(p32, bad.Kminus)) + 1.0)
    assert r.residual * scale == pytest.approx(1e-3, rel=1e-3)


def test_check_relations_missing_symbol():
    bos = sa.su11_single_mode(fs.ModeLayout.of(fs.Boson(8)))
    with pytest.raises(KeyError):
        sa.check_relations(bos, sa.standard_relation_table(), fs.identity(bos.layout), 1e-10)
    table = sa.standard_relation_table().restricted_to(bos.symbols())
    assert len(table) == 3
    assert all_passed(sa.check_relations(bos, table, fs.interior_projector(bos.layout, 2), 1e-10))


def test_hermiticity(gens32, p32):
    res = sa.check_hermiticity(gens32, p32, 1e-12)
    assert len(res) == 8 and all_passed(res)
    flipped = gens32.replace(Wminus=-gens32.Wminus, Wplus=-gens32.Wplus)
    bad = {r.name: r.passed for r in sa.check_hermiticity(flipped, p32, 1e-12)}
    assert not bad["hermiticity V+^dag=W-"] and not bad["hermiticity V-^dag=W+"]
    bos = sa.su11_single_mode(fs.ModeLayout.of(fs.Boson(8)))
    names = [r.name for r in sa.check_hermiticity(bos, fs.identity(bos.layout), 1e-12)]
    assert names == ["hermiticity K0^dag=K0", "hermiticity K+^dag=K-", "hermiticity K-^dag=K+"]


def test_casimir_constant(gens32):
    p = fs.interior_projector(gens32.layout, 2)
    const, dev = sa.casimir_constant(gens32, p)
    assert dev < 1e-10
    assert const.real == pytest.approx(-3 / 16, abs=1e-12)


def test_grade_defects_vanish(gens32):
    assert max(gens32.grade_defects().values()) <= 1e-12
