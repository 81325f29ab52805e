import math

# Base parameterizations, as InstanceParams keyword arguments.
BINARY_TRANSITION = dict(k=2, n=30, alpha=0.8, r=3.0, p=0.2341)
TERNARY_TRANSITION = dict(k=3, n=20, alpha=1.0, r=1.0, p=0.6321)
BELOW_THRESHOLD_GROWTH = dict(k=2, n=20, alpha=0.8, r=1.5, p=0.4)
ABOVE_THRESHOLD_GROWTH = dict(k=2, n=20, alpha=0.8, r=1.5, p=0.45)
HEAVY_TAIL = dict(k=2, n=30, alpha=0.8, r=1.5, p=0.4134)
THRESHOLD_GAP = dict(k=2, n=30, alpha=0.8, r=3.0, p=0.2341)
COMPETITION = dict(k=2, n=40, alpha=0.8, r=0.8 / math.log(4 / 3), p=0.25)

# Tightness grids for phase-transition sweeps
BINARY_P_GRID = [0.15, 0.17, 0.19, 0.21, 0.22, 0.23, 0.24, 0.25, 0.26, 0.28, 0.30, 0.32]
TERNARY_P_GRID = [0.50, 0.55, 0.58, 0.60, 0.62, 0.63, 0.64, 0.66, 0.68, 0.70, 0.75]

# Problem sizes swept per transition family
BINARY_TRANSITION_N_VALUES = [20, 30]
TERNARY_TRANSITION_N_VALUES = [16, 20]

GROWTH_N_VALUES = [20, 25, 30]
BELOW_THRESHOLD_EPSILON = 0.01
ABOVE_THRESHOLD_TIGHTNESS = [0.45, 0.50]

# Threshold-difference sweeps
THRESHOLD_GAP_ALPHAS = [0.4, 0.6, 0.8, 1.0]
THRESHOLD_GAP_RS = [0.8, 1.2, 1.8, 2.5]
THRESHOLD_GAP_NS = [10, 20, 30, 40]

COMPETITION_N_VALUES = list(range(40, 60))

# Golden values: (alpha, r) -> p_cr, and n -> (d, m) for the competition family
GOLDEN_THRESHOLDS = {
    (0.8, 3.0): 0.2341,
    (1.0, 1.0): 0.6321,
    (0.8, 1.5): 0.4134,
    (0.8, 0.8 / math.log(4 / 3)): 0.25,
}
GOLDEN_DIMENSIONS = {
    40: (19, 410),
    50: (23, 544),
}
