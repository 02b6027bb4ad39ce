#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 27, 2025 17:20:41$"

from abc import ABC, abstractmethod
from pathlib import Path


class BaseResultStore(ABC):
    @abstractmethod
    def write_summary(self, summary, out_dir: Path, extra: dict = None) -> None:
        pass

    @abstractmethod
    def write_trace(self, state, out_dir: Path) -> None:
        pass

    @abstractmethod
    def write_report(self, report, out_dir: Path) -> None:
        pass

    @abstractmethod
    def write_dataset(self, dataset, out_dir: Path) -> None:
        pass
