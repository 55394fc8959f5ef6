# flake8: noqa
# isort:skip_file

from .argparse import ArgumentParser, boolean_flag
from .config import load_config, save_config
from .dict import merge_dicts
from .misc import atomic_write, format_metric, output_dir, pairwise
from .meters import AverageValueMeter, Meter
from .parallel import DumbPool, get_pool, parallel_imap, tqdm_parallel_imap
from .parser import parse_config_args, parse_args_uargs
from .seed import set_global_seed
from .time_manager import TimeManager
from .io import (
    OBSERVATION_COLUMNS, QUATERNION_TOL, observations_to_dataframe,
    pose_from_record, pose_to_record, read_control_points, read_observations,
    read_trajectory, write_control_points, write_observations, write_table,
    write_trajectory
)
