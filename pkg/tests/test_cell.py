"""Ternary cell: encoding, write transitions, read, scalar product, energy."""

import pytest

from stepcim import cell, ferro
from stepcim.device import DeviceStack, state_currents
from stepcim.errors import ConfigError, InvalidStateError

DEV = DeviceStack()
I_LRS, I_HRS, I_REF = state_currents(DEV)


def test_weight_encoding_table():
    assert (cell.TernaryWord.encode(0).p1, cell.TernaryWord.encode(0).p2) == (-1, -1)
    assert (cell.TernaryWord.encode(+1).p1, cell.TernaryWord.encode(+1).p2) == (+1, -1)
    assert (cell.TernaryWord.encode(-1).p1, cell.TernaryWord.encode(-1).p2) == (-1, +1)
    with pytest.raises(ConfigError):
        cell.TernaryWord.encode(2)


def test_forbidden_pair_rejected():
    with pytest.raises(InvalidStateError):
        cell.TernaryWord.decode(+1, +1)


def test_input_encoding_table():
    v = DEV.v_dd
    assert (cell.InputCode.encode(0, v).v_WL, cell.InputCode.encode(0, v).v_CWL) == (0.0, 0.0)
    assert (cell.InputCode.encode(+1, v).v_WL, cell.InputCode.encode(+1, v).v_CWL) == (v, 0.0)
    assert (cell.InputCode.encode(-1, v).v_WL, cell.InputCode.encode(-1, v).v_CWL) == (v, v)


def test_write_bias_phases_for_plus_one():
    phi1, phi2 = cell.write_biases(+1, DEV)
    # device 1 sees +v_dd across the film in phase 1, device 2 -v_dd in phase 2
    assert phi1.v_BL1 - phi1.v_CWL == pytest.approx(+0.8)
    assert phi2.v_BL2 - phi2.v_CWL == pytest.approx(-0.8)
    assert phi1.v_CWL == 0.0 and phi2.v_CWL == DEV.v_dd
    for b in (phi1, phi2):
        for v in (b.v_BL1, b.v_BL2, b.v_RBL1, b.v_RBL2, b.v_WL, b.v_CWL):
            assert -0.1 <= v <= DEV.v_dd + 0.5 + 0.1


@pytest.mark.parametrize("start", [-1, 0, +1])
@pytest.mark.parametrize("target", [-1, 0, +1])
def test_write_then_read_all_transitions(start, target):
    c = cell.fresh_cell(DEV, start)
    res = cell.write_word(c, target, DEV)
    assert res.cell.word == target
    assert cell.read_word(res.cell, DEV).w == target
    assert res.latency == pytest.approx(2 * DEV.write_phase_tau * DEV.ferro.tau_PE)


def test_rewrite_same_word_is_free_of_switching_energy():
    c = cell.fresh_cell(DEV, +1)
    first = cell.write_word(c, +1, DEV)
    assert first.energy_switching == 0.0
    assert (first.cell.p1, first.cell.p2) == (c.p1, c.p2)
    # a real transition spends switching energy on exactly the flipped films
    second = cell.write_word(first.cell, -1, DEV)
    assert second.energy_switching > 0.0


def test_write_energy_scale():
    # one full reversal moves ~2*P_R of charge at v_dd over the film area
    c = cell.fresh_cell(DEV, 0)
    res = cell.write_word(c, +1, DEV)  # flips device 1 only
    approx = 0.5 * DEV.ferro.A_PE * (2 * DEV.ferro.P_R) * DEV.v_dd
    assert res.energy_switching == pytest.approx(approx, rel=0.2)


def test_read_current_classes():
    got = {w: cell.read_word(cell.fresh_cell(DEV, w), DEV) for w in (-1, 0, +1)}
    assert got[+1].i_rbl1 == pytest.approx(I_LRS, rel=1e-9)
    assert got[+1].i_rbl2 == pytest.approx(I_HRS, rel=1e-9)
    assert got[-1].i_rbl1 == pytest.approx(I_HRS, rel=1e-9)
    assert got[-1].i_rbl2 == pytest.approx(I_LRS, rel=1e-9)
    assert got[0].i_rbl1 == pytest.approx(I_HRS, rel=1e-9)
    assert got[0].i_rbl2 == pytest.approx(I_HRS, rel=1e-9)


def test_read_rejects_forbidden_state():
    bad = cell.CellState(
        m1=ferro.FerroState.at_rest(DEV.ferro, +1),
        m2=ferro.FerroState.at_rest(DEV.ferro, +1),
    )
    with pytest.raises(InvalidStateError):
        cell.read_word(bad, DEV)


def test_scalar_product_truth_table():
    for w in (-1, 0, +1):
        c = cell.fresh_cell(DEV, w)
        for i in (-1, 0, +1):
            sp = cell.scalar_product(c, cell.InputCode.encode(i, DEV.v_dd), DEV)
            assert sp.o == w * i, (w, i)


def test_scalar_product_current_classes_reverse_with_input_sign():
    # stored +1 read with negative input polarity swaps the line classes
    c = cell.fresh_cell(DEV, +1)
    sp = cell.scalar_product(c, cell.InputCode.encode(-1, DEV.v_dd), DEV)
    assert sp.i_rbl1 == pytest.approx(I_HRS, rel=1e-9)
    assert sp.i_rbl2 == pytest.approx(I_LRS, rel=1e-9)
    # zero weight under negative input: both devices read low-resistance
    c0 = cell.fresh_cell(DEV, 0)
    sp0 = cell.scalar_product(c0, cell.InputCode.encode(-1, DEV.v_dd), DEV)
    assert sp0.i_rbl1 == pytest.approx(I_LRS, rel=1e-9)
    assert sp0.i_rbl2 == pytest.approx(I_LRS, rel=1e-9)
    assert sp0.o == 0


def test_compute_is_non_destructive():
    c = cell.fresh_cell(DEV, +1)
    m1, m2 = c.m1, c.m2
    for k in range(1000):
        inp = cell.InputCode.encode((-1, 0, 1)[k % 3], DEV.v_dd)
        cell.scalar_product(c, inp, DEV)
        cell.read_word(c, DEV)
    assert c.m1 is m1 and c.m2 is m2  # states untouched, bit for bit


def test_energy_is_additive_over_a_sequence():
    c = cell.fresh_cell(DEV, 0)
    seq = [+1, -1, 0, +1]
    total = 0.0
    for w in seq:
        res = cell.write_word(c, w, DEV)
        total += res.energy
        c = res.cell
    again = cell.fresh_cell(DEV, 0)
    check = 0.0
    for w in seq:
        res = cell.write_word(again, w, DEV)
        check += res.energy
        again = res.cell
    assert total == pytest.approx(check, rel=1e-12)


def test_segment_energy_scales_with_local_row_width():
    geom = (64, 256)
    seg = cell.segment_energy("write", geom, DEV)
    # local line drives 64 of 256 cells -> a quarter of the full-row term
    assert seg.lcwl_segmented == pytest.approx(seg.cwl_unsegmented * 64 / 256, rel=1e-12)
    wide = cell.segment_energy("write", geom, DEV, cell.SegmentCosts(seg_width=128))
    assert wide.lcwl_segmented == pytest.approx(2 * seg.lcwl_segmented, rel=1e-12)
    assert seg.total_segmented < seg.total_unsegmented


def test_segment_hold_costs_nothing():
    seg = cell.segment_energy("hold", (64, 256), DEV)
    assert seg.total_segmented == 0.0 and seg.total_unsegmented == 0.0


def test_segment_energy_rejects_unknown_op():
    with pytest.raises(ConfigError):
        cell.segment_energy("refresh", (64, 256), DEV)
    with pytest.raises(ConfigError):
        cell.segment_energy("read", (0, 256), DEV)


def test_truth_table_rows():
    rows = cell.truth_table(DEV)
    assert len(rows) == 9
    assert all(o == w * i for w, i, _, _, o in rows)
