import pytest
from hypothesis import given
from hypothesis import strategies as st

from nvoram.eoram.partition import partition
from nvoram.eoram.table import (ROW_BITS, TableFormatError, deserialize_table, pack_bits,
                                read_table_file, serialize_table, table_from_bytes,
                                table_to_bytes, unpack_bits, write_table_file)


def test_thirty_two_levels_fit_in_76_bytes():
    bits = serialize_table(partition(32))
    assert len(bits) == 608
    assert len(pack_bits(bits)) == 76
    assert len(table_to_bytes(partition(32))) == 6 + 76


def test_five_levels_is_95_bits():
    assert len(serialize_table(partition(5))) == 95


def test_five_level_rows():
    bits = serialize_table(partition(5))
    rows = [bits[i:i + ROW_BITS] for i in range(0, 95, ROW_BITS)]
    # levels 0 and 1 pair with level 4, level 2 pairs with level 3
    assert rows[0] == "1" + "000100" + "000000" + "000001"
    assert rows[2] == "1" + "000011" + "000010" + "000010"
    assert rows[3] == "0" + "000011" + "000010" + "000010"
    assert rows[4] == "0" + "000100" + "000000" + "000001"


def test_round_trip_sixteen():
    table = partition(16)
    assert deserialize_table(serialize_table(table), 16) == table


@given(st.integers(1, 64))
def test_round_trip_any_height(levels):
    table = partition(levels)
    assert table_from_bytes(table_to_bytes(table)) == table


def test_file_round_trip(tmp_path):
    path = tmp_path / "t.eorm"
    write_table_file(path, partition(20))
    assert read_table_file(path) == partition(20)


@given(st.text(alphabet="01", max_size=200))
def test_pack_unpack_inverse(bits):
    assert unpack_bits(pack_bits(bits), len(bits)) == bits


def test_pack_is_little_endian():
    assert pack_bits("1") == b"\x01"
    assert pack_bits("00000001") == b"\x80"
    assert pack_bits("000000001") == b"\x00\x01"


@pytest.mark.parametrize("bits,levels", [
    ("0" * 94, 5), ("0" * 96, 5), ("2" * 95, 5), ("", 0), ("0" * 19 * 65, 65),
])
def test_malformed_bit_strings(bits, levels):
    with pytest.raises(TableFormatError):
        deserialize_table(bits, levels)


@pytest.mark.parametrize("data", [
    b"", b"EORX\x01\x05" + bytes(12), b"EORM\x02\x05" + bytes(12), b"EORM\x01\x05" + bytes(11),
])
def test_malformed_containers(data):
    with pytest.raises(TableFormatError):
        table_from_bytes(data)
