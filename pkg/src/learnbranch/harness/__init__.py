from .config import DEFAULT_SEEDS, RunConfig, agent_config
from .csvio import (EPISODE_COLUMNS, PROFILE_COLUMNS, TRAIN_CURVE_COLUMNS, CSVFormatError,
                    read_csv)
from .evaluate import (LEARNED, RESULT_COLUMNS, TIMING_COLUMNS, EvalRow, evaluate,
                       evaluate_solver, instance_seeds, load_instances, read_results,
                       write_results, write_timing)
from .plots import emit_plots, plot_curve, plot_profile
from .profile import (ProfileCurve, performance_profile, read_profile, table_from_results,
                      write_profile)
from .train import TrainOutcome, make_agent, train, validate_greedy
