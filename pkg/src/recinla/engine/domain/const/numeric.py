#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 24, 2025 09:44:37$"

NEWTON_TOLERANCE = 1e-8
NEWTON_MAX_ITERATIONS = 50
CURVATURE_FLOOR = 1e-12
INTRINSIC_JITTER_FACTOR = 1e-5

HESSIAN_STEP = 1e-3
DROP_THRESHOLD = 2.5
CCD_RADIUS_FACTOR = 1.1

DENSE_INVERSE_THRESHOLD = 5000
MAX_KRONECKER_DIM = 2_000_000

BOUNDARY_MASS_THRESHOLD = 0.2
MEASURE_TOLERANCE = 1e-9

# Default prior of the scaling parameter alpha (identity scale).
ALPHA_PRIOR_MEAN = 1.0
ALPHA_PRIOR_SD = 0.5

# Fixed-effect default prior precision.
FIXED_EFFECT_PRECISION = 1e-3

# Fixed log precision of expert observations whose error lives in the latent expert block.
EXPERT_OBSERVATION_LOG_PRECISION = 9.210340371976184
