ANKLE_FIXTURE = "ankle"
KNEE_FIXTURE = "knee"
SUPPORTED_FIXTURES = [ANKLE_FIXTURE, KNEE_FIXTURE]

SEED_ENV_NAME = "JOINT_FRICTION_ID_SEED"
FIXTURE_ENV_NAME = "JOINT_FRICTION_ID_FIXTURE"
RUNS_ROOT_ENV_NAME = "JOINT_FRICTION_ID_RUNS_ROOT"

DEFAULT_RUNS_ROOT = "runs"

# simulator
SIM_DT = 5e-5
KARNOPP_BAND = 1e-3
SUPPORTED_LOG_RATES = [500, 1000]
DEFAULT_LOG_RATE = 500
ENCODER_NOISE_STD = 5e-5
CURRENT_NOISE_STD = 5e-3

# signal processing
DATASET_RATE = 1000
CURRENT_CUTOFF_HZ = 20.0
BUTTERWORTH_ORDER = 2
KALMAN_JERK_PSD = 1e2

# identification
FIT_EPOCHS = 10000
FIT_LEARNING_RATE = 1e-2

# control
CONTROL_RATE = 1000
DEFAULT_KD = 4.0
RMSE_THRESHOLD = 0.05
KP_GRID_BOUNDS = (1.0, 2e4)
KP_POINTS_PER_DECADE = 16
DISTURBANCE_DURATION = 1.0
RECOVERY_WINDOW = 2.0
DISPLACEMENT_THRESHOLD = 0.02
MOMENT_SEARCH_ITERATIONS = 8

RAW_LOG_COLUMNS = ["t", "s", "theta", "i_m", "s_shadow", "theta_shadow"]
DATASET_COLUMNS = [
    "t",
    "s",
    "s_dot",
    "s_ddot",
    "theta",
    "theta_dot",
    "i_m",
    "tau",
    "tau_F_true",
]
TRACE_COLUMNS = [
    "t",
    "s_des",
    "s",
    "s_dot",
    "tau_des",
    "tau_F_hat",
    "i_ref",
    "disturbance",
    "saturated",
]
TRIAL_COLUMNS = [
    "trial",
    "seed",
    "batch",
    "h1",
    "h2",
    "lr",
    "L",
    "lambda",
    "dropout",
    "val_loss",
]
REPORT_COLUMNS = ["model", "rmse", "moment", "kp", "kd"]
RECOVERY_COLUMNS = ["model", "recovery_rmse", "moment", "kp", "kd"]
COMMON_RECOVERY_COLUMNS = ["model", "recovery_rmse", "kp", "kd"]
