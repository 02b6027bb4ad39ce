#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 24, 2025 09:52:18$"


class RecinlaError(Exception):
    pass


class ModelValidationError(RecinlaError, ValueError):
    """Invalid model inputs: shapes, bindings, families, regions."""


class NumericalError(RecinlaError, ArithmeticError):
    pass


class FactorizationError(NumericalError):
    """Matrix could not be factorized even after the maximum jitter."""


class ConvergenceError(NumericalError):
    pass


class DimensionOverflowError(NumericalError):
    pass
