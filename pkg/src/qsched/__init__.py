"""Packet scheduling with weighted deadlines in a bounded buffer."""
from .model import (NULL_PACKET, Instance, LogEntry, Packet, QueuedPacket,
                    as_weight, format_weight, parse_instance, dump_instance,
                    total_weight, verify_schedule)
from .provisional import brute_force_provisional, ops_place, reassign_virtual_deadlines
from .schedulers import (Algorithm, RandomSource, SchedulerParams, rme_trials,
                         simulate)
from .offline import feasible, greedy_opt, oracle_opt
from .instances import (gen_best_effort_lb, gen_edf_nemesis, gen_greedy_lb,
                        gen_random)

__version__ = "0.1.0"
