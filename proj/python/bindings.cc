// Copyright 2026 The sfpa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings. Structured data crosses the boundary as JSON text; the
// package wrapper decodes it into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "sfpa/closed_form.h"
#include "sfpa/equilibrium.h"
#include "sfpa/experiment.h"

namespace py = pybind11;

namespace sfpa {
namespace {

std::vector<Valuation> ValuationsFromJson(const std::string& text, int m) {
  const Json j = Json::parse(text);
  if (!j.is_array()) Fail(ErrorKind::kUsage, "expected a JSON array of valuations");
  std::vector<Valuation> vals;
  for (const Json& v : j) vals.push_back(ValuationFromJson(v, m));
  return vals;
}

std::string RunSpec(const std::string& spec_json) {
  const ExperimentSpec spec = ExperimentSpec::FromJson(Json::parse(spec_json), ExperimentSpec{});
  return RunExperiment(spec).ToJson().dump();
}

std::string WalrasianJson(const std::string& valuations, int m) {
  const std::vector<Valuation> vals = ValuationsFromJson(valuations, m);
  const WelfareOptimum opt = OptimalWelfare(vals);
  Json out = {{"optimal_welfare", opt.value}};
  if (const auto we = WalrasianSearch(vals)) {
    out["exists"] = true;
    out["allocation"] = ToJson(we->allocation);
    out["prices"] = we->prices;
    out["welfare"] = Welfare(vals, we->allocation);
  } else {
    out["exists"] = false;
  }
  return out.dump();
}

std::string AndOrWelfareJson(int m, double v, int64_t trials, uint64_t seed) {
  const AndOrWelfareReport r = AndOrEquilibriumWelfare(AndOrEquilibrium(m, v), trials, seed);
  return Json{{"welfare", ToJson(r.welfare)}, {"and_atom_frequency", ToJson(r.and_atom_frequency)}}
      .dump();
}

}  // namespace
}  // namespace sfpa

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Simultaneous first-price auction equilibria and dynamics";
  mod.attr("__version__") = sfpa::kVersion;

  static py::exception<sfpa::Error> precondition_error(mod, "PreconditionError",
                                                       PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const sfpa::Error& e) {
      if (e.kind() == sfpa::ErrorKind::kUsage) {
        PyErr_SetString(PyExc_ValueError, e.what());
      } else {
        py::set_error(precondition_error, e.what());
      }
    } catch (const nlohmann::json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  mod.def("run_experiment", &sfpa::RunSpec, py::arg("spec_json"),
          "Runs one experiment and returns the report as JSON text.");
  mod.def("walrasian", &sfpa::WalrasianJson, py::arg("valuations_json"), py::arg("m"),
          "Walrasian equilibrium search and optimal welfare as JSON text.");
  mod.def(
      "optimal_welfare",
      [](const std::string& valuations, int m) {
        return sfpa::OptimalWelfare(sfpa::ValuationsFromJson(valuations, m)).value;
      },
      py::arg("valuations_json"), py::arg("m"));
  mod.def(
      "andor_utilities",
      [](int m, double v, const std::vector<double>& and_bids, const std::vector<double>& or_bids) {
        const sfpa::AndOrEquilibrium eq(m, v);
        return py::make_tuple(eq.AndUtility(and_bids).value, eq.OrUtility(or_bids).value);
      },
      py::arg("m"), py::arg("v"), py::arg("and_bids"), py::arg("or_bids"),
      "Deviation utilities of the AND and OR players against the equilibrium.");
  mod.def("andor_welfare", &sfpa::AndOrWelfareJson, py::arg("m"), py::arg("v"),
          py::arg("trials"), py::arg("seed"));
  mod.def(
      "triangle_utility", [](double y, double z) { return sfpa::TriangleUtility(y, z).value; },
      py::arg("y"), py::arg("z"));
  mod.def(
      "single_minded_utility",
      [](int k, int d, const std::vector<double>& bids) {
        return sfpa::SingleMindedSymmetric(k, d).Utility(bids).value;
      },
      py::arg("k"), py::arg("d"), py::arg("bids"));
}
