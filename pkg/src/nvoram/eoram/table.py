"""Bit-exact lookup-table encoding (19 bits per level) and its file container.

Per level: 1 bit is_mfan, then partner_level, level_from, level_to as
6-bit unsigned fields, most significant bit first.  In the file the bit
stream is packed little-endian (stream bit k -> byte k//8, bit k%8) after a
6-byte header ``b"EORM" | version | levels``.
"""

from __future__ import annotations

import os

from nvoram.eoram.partition import MAX_LEVELS, LevelRow, PartitionTable

FIELD_BITS = 6
ROW_BITS = 1 + 3 * FIELD_BITS
MAGIC = b"EORM"
VERSION = 1


class TableFormatError(ValueError):
    pass


def serialize_table(table: PartitionTable) -> str:
    parts = []
    for row in table.rows:
        parts.append("1" if row.is_mfan else "0")
        for value in (row.partner_level, row.level_from, row.level_to):
            parts.append(format(value, f"0{FIELD_BITS}b"))
    return "".join(parts)


def deserialize_table(bits: str, levels: int) -> PartitionTable:
    if not 1 <= levels <= MAX_LEVELS:
        raise TableFormatError(f"levels must be in [1, {MAX_LEVELS}]")
    if len(bits) != ROW_BITS * levels:
        raise TableFormatError(
            f"expected {ROW_BITS * levels} bits for {levels} levels, got {len(bits)}"
        )
    if set(bits) - {"0", "1"}:
        raise TableFormatError("bit string may only contain '0' and '1'")
    rows = []
    for l in range(levels):
        chunk = bits[l * ROW_BITS:(l + 1) * ROW_BITS]
        fields = [int(chunk[1 + k * FIELD_BITS:1 + (k + 1) * FIELD_BITS], 2)
                  for k in range(3)]
        rows.append(LevelRow(chunk[0] == "1", *fields))
    return PartitionTable(levels, tuple(rows))


def pack_bits(bits: str) -> bytes:
    out = bytearray((len(bits) + 7) // 8)
    for k, b in enumerate(bits):
        if b == "1":
            out[k >> 3] |= 1 << (k & 7)
    return bytes(out)


def unpack_bits(data: bytes, nbits: int) -> str:
    if len(data) != (nbits + 7) // 8:
        raise TableFormatError(f"expected {(nbits + 7) // 8} payload bytes, got {len(data)}")
    return "".join("1" if data[k >> 3] >> (k & 7) & 1 else "0" for k in range(nbits))


def table_to_bytes(table: PartitionTable) -> bytes:
    return MAGIC + bytes([VERSION, table.levels]) + pack_bits(serialize_table(table))


def table_from_bytes(data: bytes) -> PartitionTable:
    if len(data) < 6 or data[:4] != MAGIC:
        raise TableFormatError("missing EORM header")
    if data[4] != VERSION:
        raise TableFormatError(f"unsupported table version {data[4]}")
    levels = data[5]
    return deserialize_table(unpack_bits(data[6:], ROW_BITS * levels), levels)


def write_table_file(path: str | os.PathLike, table: PartitionTable) -> None:
    with open(path, "wb") as f:
        f.write(table_to_bytes(table))


def read_table_file(path: str | os.PathLike) -> PartitionTable:
    with open(path, "rb") as f:
        return table_from_bytes(f.read())
