# Copyright 2026 The sfpa Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Simultaneous first-price auctions: equilibria, welfare, and dynamics."""

import json as _json

from sfpa import _core
from sfpa._core import PreconditionError, __version__

__all__ = [
    "PreconditionError",
    "andor_utilities",
    "andor_welfare",
    "optimal_welfare",
    "run",
    "single_minded_utility",
    "triangle_utility",
    "walrasian",
]

andor_utilities = _core.andor_utilities
triangle_utility = _core.triangle_utility
single_minded_utility = _core.single_minded_utility


def run(command, **params):
    """Runs one experiment; keyword names match the command-line flags."""
    spec = {"command": command}
    spec.update({key.replace("-", "_"): value for key, value in params.items()})
    return _json.loads(_core.run_experiment(_json.dumps(spec)))


def walrasian(valuations, m):
    """Walrasian search over a list of valuation dicts."""
    return _json.loads(_core.walrasian(_json.dumps(valuations), m))


def optimal_welfare(valuations, m):
    return _core.optimal_welfare(_json.dumps(valuations), m)


def andor_welfare(m, v, trials, seed):
    return _json.loads(_core.andor_welfare(m, v, trials, seed))
