"""Catalogued identities, the quotient ladder, and the l=3 and partition suites."""

from .catalog import CheckReport, IdentityEntry, load_catalog, run_catalog, run_identity
from .l3 import l3_suite
from .ladder import Ladder, LadderError, quotient_ladder
from .partition import partition_parity_check

__all__ = [
    "CheckReport",
    "IdentityEntry",
    "Ladder",
    "LadderError",
    "l3_suite",
    "load_catalog",
    "partition_parity_check",
    "quotient_ladder",
    "run_catalog",
    "run_identity",
]
