from tropabs.abstraction import TransitionSystem, build_transitions
from tropabs.config import Config
from tropabs.dbm import Dbm, box, canonical_form, from_constraints, full_space
from tropabs.pwa import PwaSystem, Region, generate_partition, generate_pwa
from tropabs.reach import DbmUnion, backward_reach, forward_reach, image_mpl, preimage_mpl

__all__ = [
    "Config",
    "Dbm",
    "DbmUnion",
    "PwaSystem",
    "Region",
    "TransitionSystem",
    "backward_reach",
    "box",
    "build_transitions",
    "canonical_form",
    "forward_reach",
    "from_constraints",
    "full_space",
    "generate_partition",
    "generate_pwa",
    "image_mpl",
    "preimage_mpl",
]
