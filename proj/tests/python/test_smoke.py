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

import math

import pytest

import sfpa


def test_version():
    assert sfpa.__version__.startswith("sfpa ")


def test_andor_equilibrium_utilities():
    m, v = 3, 0.5
    and_u, or_u = sfpa.andor_utilities(m, v, [0.1] * m, [1.0 / m] + [0.0] * (m - 1))
    assert abs(and_u) <= 1e-12
    assert abs(or_u - (v - 1.0 / m)) <= 1e-12


def test_triangle_utility():
    assert sfpa.triangle_utility(0.1, 0.4) == pytest.approx(-2 * 0.09, abs=1e-12)


def test_single_minded_diagonal():
    assert abs(sfpa.single_minded_utility(2, 2, [0.2, 0.2])) <= 1e-12
    assert sfpa.single_minded_utility(2, 2, [0.1, 0.3]) < 0


def test_walrasian_single_item():
    vals = [{"kind": "additive", "weights": [2.0]}, {"kind": "additive", "weights": [1.0]}]
    res = sfpa.walrasian(vals, 1)
    assert res["exists"]
    assert res["welfare"] == res["optimal_welfare"] == 2.0
    assert sfpa.optimal_welfare(vals, 1) == 2.0


def test_andor_welfare_deterministic():
    a = sfpa.andor_welfare(4, 0.5, 20000, 3)
    b = sfpa.andor_welfare(4, 0.5, 20000, 3)
    assert a == b
    assert 0 < a["welfare"]["mean"] <= 1.0 + 1e-9


def test_run_report_and_determinism():
    r1 = sfpa.run("poa", game="andor", m=4, v=0.5, trials=20000, seed=9)
    r2 = sfpa.run("poa", game="andor", m=4, v=0.5, trials=20000, seed=9)
    assert "error" not in r1
    r1.pop("wall_clock_seconds")
    r2.pop("wall_clock_seconds")
    assert r1 == r2
    assert math.isfinite(r1["results"]["welfare"]["mean"])


def test_run_error_object():
    r = sfpa.run("verify", game="nosuchgame")
    assert r["error"]["kind"] == "usage"


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        sfpa.walrasian([{"kind": "nonsense"}], 1)
    with pytest.raises(sfpa.PreconditionError):
        sfpa.andor_welfare(40, 0.5, 10, 1)
