# Copyright 2024 The causalfair Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
A unified tracking interface that supports logging metrics to different backends
"""

import json
import os
import sys
from abc import ABC, abstractmethod
from typing import Any, Optional, Union

from ..py_functional import convert_dict_to_str, unflatten_dict


class Logger(ABC):
    @abstractmethod
    def __init__(self, config: dict[str, Any]) -> None: ...

    @abstractmethod
    def log(self, data: dict[str, Any], step: int) -> None: ...

    def finish(self) -> None:
        pass


class ConsoleLogger(Logger):
    """Writes to stderr, stdout carries the command payload."""

    def __init__(self, config: dict[str, Any]) -> None:
        self.stream = sys.stderr

    def log(self, data: dict[str, Any], step: int) -> None:
        print(f"Step {step}\n" + convert_dict_to_str(unflatten_dict(data)), file=self.stream)


class FileLogger(Logger):
    def __init__(self, config: dict[str, Any]) -> None:
        log_dir = config.get("log_dir") or os.path.join("logs", "causalfair")
        os.makedirs(log_dir, exist_ok=True)
        self.log_path = os.path.join(log_dir, "experiment_log.jsonl")
        with open(os.path.join(log_dir, "experiment_config.json"), "w", encoding="utf-8") as f:
            json.dump(config, f, indent=2)

        with open(self.log_path, "w", encoding="utf-8"):
            pass

    def log(self, data: dict[str, Any], step: int) -> None:
        with open(self.log_path, "a", encoding="utf-8") as f:
            f.write(json.dumps({"step": step, **unflatten_dict(data)}) + "\n")


LOGGERS = {
    "console": ConsoleLogger,
    "file": FileLogger,
}


class Tracker:
    def __init__(
        self, loggers: Union[str, list[str], tuple[str, ...]] = "console", config: Optional[dict[str, Any]] = None
    ):
        if isinstance(loggers, str):
            loggers = [loggers]

        config = config or {}
        self.loggers: list[Logger] = []
        for logger in loggers:
            if logger not in LOGGERS:
                raise ValueError(f"{logger} is not supported.")

            self.loggers.append(LOGGERS[logger](config))

        self.step = 0

    def log(self, data: dict[str, Any], step: Optional[int] = None) -> None:
        """Log flat `a/b` keyed metrics; without `step` the tracker counts steps itself."""
        if step is None:
            step = self.step

        self.step = step + 1
        for logger in self.loggers:
            logger.log(data=data, step=step)

    def finish(self) -> None:
        for logger in self.loggers:
            logger.finish()

        self.loggers = []

    def __del__(self):
        self.finish()
