from .constructions import (MinExtSpec, block_name, compose_chain, factor_minimal,
                            lift_relation, minimal_extensions, one_step_cover, pullback_amalgam,
                            quotient_by_partition)
from .core import (DEFAULT_MAX_POINTS, ContactFrame, DualAlgebra, KripkeModel, StableMap,
                   all_frames, bits, classify_map, dual_algebra, eval_mask, eval_modal,
                   frames_up_to, model_check)
from .io import (format_frame, format_map, frame_from_json, frame_to_json, map_to_json,
                 model_from_json, model_to_json, parse_frame, parse_frames)
from .splitting import PartitionSplit, SplitResult, partition_split_check, splitting_check
