from nvoram.eoram.leveler import EoramLeveler, translate, translate_all
from nvoram.eoram.partition import (GroupRef, LevelRow, PartitionTable, array_index_to_node,
                                    group_of, node_groups, offset, partition)
from nvoram.eoram.remap import mfan_position, partner_position
from nvoram.eoram.schedule import SchedulerState, schedule, swaps_so_far
from nvoram.eoram.table import deserialize_table, serialize_table

__all__ = [
    "EoramLeveler", "GroupRef", "LevelRow", "PartitionTable", "SchedulerState",
    "array_index_to_node", "deserialize_table", "group_of", "mfan_position", "node_groups",
    "offset", "partition", "partner_position", "schedule", "serialize_table",
    "swaps_so_far", "translate", "translate_all",
]
