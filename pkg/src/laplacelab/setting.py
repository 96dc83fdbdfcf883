"""Grid keys, defaults and numerical policy constants."""

GRID_KEYS = {
    'd_list': 'odd_ints',
    'n_list': 'ints',
    'c_rule': ('scaled', 'absolute', 'sqrt_d'),
    'c_values': 'floats',
    'seeds': 'ints',
    'f0': ('const_one', 'gauss_bump', 'coord_linear'),
    'm_test': 'int',
    'alpha_witness': 'float',
    'ridge': 'float'
}

_DEFAULT_GRID = {
    'd_list': (1, 3),
    'n_list': (100, 200, 400, 800, 1600),
    'c_rule': 'scaled',
    'c_values': (0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0),
    'seeds': tuple(range(1, 11)),
    'f0': 'const_one',
    'm_test': 20000,
    'alpha_witness': 0.4,
    'ridge': 0.0
}

# geometry
DUPLICATE_THRESHOLD = 1e-12
DUPLICATE_REDRAWS = 3
RADII_BLOCK_ROWS = 512

# interpolant
MAX_SUPPORT = 5000
JITTER_START = 1e-12
JITTER_STOP = 1e-6
JITTER_FACTOR = 10.0
PREDICT_BLOCK_ROWS = 2048

# bump
BUMP_MAX_DIM = 7
SMOOTHSTEP_ORDER = 4
QUADRATURE_RTOL = 1e-8

# sobolev_oracle
GRID_EDGE_FRACTION = 0.01
GRID_EDGE_TOLERANCE = 1e-8
GRID_DEFAULT_POINTS = 2 ** 18
GRID_DECAY_LENGTHS = 40.0
GRID_POINTS_PER_GAP = 32
GRID_MAX_POINTS = 2 ** 22

# experiments
INCONSISTENCY_FLOOR = 0.05
SPIKE_RATIO_CEILING = 0.1
SPIKE_MULTIPLIER = 32.0
TREND_FLOOR = -0.5
LOCAL_MASS_BETA = 0.5
LOCAL_MASS_PER_BALL = 16
CERTIFICATE_BULK = 0.9

# verification
RESOLUTION_REDRAWS = 40
SPIKE_CHECK_BANDWIDTH = 10.0
SPIKE_CHECK_POINTS = 20000
