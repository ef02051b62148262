"""Round-trips and error handling for the text file formats."""

import pytest

from arnnlab import (
    CANTOR4,
    ExactScalar,
    FormatError,
    Network,
    OracleTable,
    SpikeSchedule,
    dfa_budget,
    dfa_to_net,
    oracle_budget,
    oracle_consult,
    oracle_net,
    run,
    two_stack_budget,
    two_stack_to_net,
)
from arnnlab.compilers import OracleNetSpec
from arnnlab.formats import (
    format_network,
    format_schedule,
    load_dfa,
    load_language,
    load_lattice,
    load_network,
    load_oracle_table,
    load_schedule,
    load_two_stack,
    save_network,
    save_oracle_table,
    save_schedule,
)

from conftest import AB, abstar_language


def test_language_file_members(tmp_path):
    path = tmp_path / "L.lang"
    path.write_text(
        "# one a then b's, members up to length 4\n"
        "alphabet: ab\n"
        "member: a\n"
        "member: ab\n"
        "member: abb\n"
        "member: abbb\n",
        encoding="utf-8",
    )
    language = load_language(str(path))
    assert "ab" in language and "b" not in language


def test_language_file_rule(tmp_path):
    path = tmp_path / "parity.lang"
    path.write_text("alphabet: ab\nrule: parity b\n", encoding="utf-8")
    language = load_language(str(path))
    assert "bb" in language and "b" not in language


def test_language_file_empty_member_is_epsilon(tmp_path):
    path = tmp_path / "eps.lang"
    path.write_text("alphabet: ab\nmember:\n", encoding="utf-8")
    assert "" in load_language(str(path))


def test_language_file_errors(tmp_path):
    bad = tmp_path / "bad.lang"
    bad.write_text("member: a\n", encoding="utf-8")
    with pytest.raises(FormatError):
        load_language(str(bad))
    both = tmp_path / "both.lang"
    both.write_text("alphabet: ab\nmember: a\nrule: parity b\n", encoding="utf-8")
    with pytest.raises(FormatError):
        load_language(str(both))


def test_oracle_table_roundtrip(tmp_path):
    table = OracleTable.from_language(abstar_language(), 25)
    path = tmp_path / "L.tbl"
    save_oracle_table(table, str(path))
    assert load_oracle_table(str(path)) == table
    # sparse files default omitted indices to zero
    sparse = tmp_path / "sparse.tbl"
    sparse.write_text("horizon 4\nindex 2 1\n", encoding="utf-8")
    assert load_oracle_table(str(sparse)).bits == (0, 1, 0, 0)


def test_dfa_file(tmp_path):
    path = tmp_path / "parity.dfa"
    path.write_text(
        "state even start accept\n"
        "state odd\n"
        "trans even a even\n"
        "trans even b odd\n"
        "trans odd a odd\n"
        "trans odd b even\n",
        encoding="utf-8",
    )
    dfa = load_dfa(str(path))
    assert dfa.accepts("bb") and not dfa.accepts("b")


def test_dfa_file_requires_start(tmp_path):
    path = tmp_path / "broken.dfa"
    path.write_text("state q accept\ntrans q a q\ntrans q b q\n", encoding="utf-8")
    with pytest.raises(FormatError):
        load_dfa(str(path))


ANBN_FILE = """\
alphabet: ab
state S start accept
state T accept
state D
rule S a - - -> S 1 -
rule S b 1 - -> T - -
rule T b 1 - -> T - -
rule S - 1 - -> D - -
rule T - 1 - -> D - -
"""


def test_two_stack_file(tmp_path):
    path = tmp_path / "anbn.m2"
    path.write_text(ANBN_FILE, encoding="utf-8")
    machine = load_two_stack(str(path))
    assert machine.accepts("aabb") and not machine.accepts("aab")


def test_two_stack_rule_format_error(tmp_path):
    path = tmp_path / "bad.m2"
    path.write_text("alphabet: ab\nstate S start\nrule S a - -> S 1 -\n", encoding="utf-8")
    with pytest.raises(FormatError):
        load_two_stack(str(path))


def test_network_roundtrip_dfa(tmp_path):
    from conftest import parity_dfa

    net = dfa_to_net(parity_dfa())
    path = tmp_path / "parity.net"
    save_network(net, str(path))
    loaded = load_network(str(path))
    assert loaded.n_neurons == net.n_neurons
    assert loaded.input_symbols == net.input_symbols
    for w in ["", "b", "bb", "abab"]:
        assert (
            run(loaded, w, dfa_budget(len(w))).verdict
            == run(net, w, dfa_budget(len(w))).verdict
        )


def test_network_roundtrip_two_stack(tmp_path):
    from conftest import anbn_machine

    machine = anbn_machine()
    net = two_stack_to_net(machine)
    path = tmp_path / "anbn.net"
    save_network(net, str(path))
    loaded = load_network(str(path))
    for w in ["", "ab", "aabb", "aab"]:
        _, steps = machine.execute(w, 1000)
        budget = two_stack_budget(len(w), steps)
        assert run(loaded, w, budget).verdict == run(net, w, budget).verdict


def test_network_roundtrip_oracle_sidecar(tmp_path):
    table = OracleTable.from_language(abstar_language(), 25)
    spec = OracleNetSpec(ExactScalar.oracle(table, CANTOR4, "0'"), AB)
    net = oracle_net(spec)
    path = tmp_path / "oracle.net"
    save_network(net, str(path))
    assert (tmp_path / "oracle0.tbl").exists()
    loaded = load_network(str(path))
    bit, _ = oracle_consult(loaded, "ab", oracle_budget("ab", AB))
    assert bit == 1
    oracle_scalar = next(
        s for s in loaded.scalars() if s.kind.value == "oracle"
    )
    assert oracle_scalar.degree_label == "0'"


def test_network_omitted_weights_are_zero(tmp_path):
    path = tmp_path / "tiny.net"
    path.write_text(
        "neurons 2 inputs 0\n"
        "a 0 1 int:2\n"
        "c 1 rat:1/2\n"
        "activation 0 sig\n"
        "out_data 0\nout_valid 0\n",
        encoding="utf-8",
    )
    net = load_network(str(path))
    assert net.state_weights[(0, 1)].value == 2
    assert (1, 0) not in net.state_weights
    assert net.activations == ("sig", "sat")


def test_network_scalar_parse_errors(tmp_path):
    path = tmp_path / "bad.net"
    path.write_text("neurons 1 inputs 0\nc 0 float:0.5\n", encoding="utf-8")
    with pytest.raises(FormatError):
        load_network(str(path))


def test_stream_scalar_not_serialisable():
    from arnnlab import UnitReal

    net = Network(
        1,
        0,
        state_weights={
            (0, 0): ExactScalar.from_stream(UnitReal.from_digits([1, 0]))
        },
    )
    with pytest.raises(FormatError):
        format_network(net)


def test_lattice_file(tmp_path):
    path = tmp_path / "order.lat"
    path.write_text("label 0'\nlabel x\nbelow 0' x\n", encoding="utf-8")
    order = load_lattice(str(path))
    assert order.is_strictly_below("0'", "x")
    assert order.is_strictly_below("0", "x")


def test_schedule_roundtrip(tmp_path):
    schedule = SpikeSchedule((2, 5, 11, 23), 25, degree_label="0'")
    path = tmp_path / "s.spk"
    save_schedule(schedule, str(path))
    assert load_schedule(str(path)) == schedule
    assert "window 25" in format_schedule(schedule)
