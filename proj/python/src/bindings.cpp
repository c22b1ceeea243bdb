// Copyright 2026 The amris Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "amris/channel.hpp"
#include "amris/config.hpp"
#include "amris/energy.hpp"
#include "amris/geometry.hpp"
#include "amris/harness.hpp"
#include "amris/signal.hpp"

namespace py = pybind11;
using namespace amris;

namespace {

py::dict record_dict(const SlotRow& row) {
  const MetricsRecord& r = row.record;
  py::dict d;
  d["slot"] = r.slot;
  d["episode"] = r.episode;
  d["ee"] = r.ee;
  d["reward"] = r.reward;
  d["sum_rate_dl"] = r.sum_rate_dl;
  d["sum_rate_ul"] = r.sum_rate_ul;
  d["bs_power"] = r.bs_power;
  d["ul_power"] = r.ul_power;
  d["rates_dl"] = r.rates_dl;
  d["rates_ul"] = r.rates_ul;
  std::vector<double> ris_total;
  for (const auto& s : r.ris) ris_total.push_back(s.total);
  d["ris_power"] = ris_total;
  d["penalties"] = std::vector<double>(r.penalties.c.begin(), r.penalties.c.end());
  py::dict h;
  for (int c = 0; c < HyperparamSet::kCount; ++c) h[HyperparamSet::names()[c]] = row.hyper[c];
  d["hyper"] = h;
  return d;
}

py::dict summary_dict(const RunSummary& s) {
  py::dict d;
  d["metrics_path"] = s.metrics_path;
  d["slots"] = s.slots;
  d["meta_steps"] = s.meta_steps;
  d["initial_ee"] = s.initial_ee;
  d["converged_ee"] = s.converged_ee;
  d["ee"] = s.ee;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Aerial multi-functional surface simulator and hierarchical learner";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);

  py::class_<ScenarioConfig>(m, "Config")
      .def(py::init<>())
      .def("__getitem__", [](const ScenarioConfig& c, const std::string& k) { return get_config_value(c, k); })
      .def("__setitem__", [](ScenarioConfig& c, const std::string& k, py::object v) {
        set_config_value(c, k, py::str(v));
      })
      .def("keys", [](const ScenarioConfig&) { return config_keys(); })
      .def("validate", [](const ScenarioConfig& c) { validate(c); })
      .def("to_text", [](const ScenarioConfig& c) { return serialize_config(c); })
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("total_slots", &ScenarioConfig::total_slots)
      .def_readwrite("attention", &ScenarioConfig::attention)
      .def_readwrite("meta", &ScenarioConfig::meta)
      .def_readwrite("eh_ratio", &ScenarioConfig::eh_ratio)
      .def_property_readonly("num_elements", &ScenarioConfig::num_elements);

  m.def("profile", &profile_defaults, py::arg("name") = "desk");
  m.def("parse_config", &parse_config, py::arg("text"), py::arg("base") = ScenarioConfig{});
  m.def("load_config", &load_config, py::arg("path"), py::arg("base") = ScenarioConfig{});

  m.def("aav_power", [](double speed, int parasite_exponent) {
    AavPowerParams p;
    p.parasite_exponent = parasite_exponent;
    return aav_power(speed, p);
  }, py::arg("speed"), py::arg("parasite_exponent") = 2);
  m.def("harvested_power", [](double p_rf, double z1, double c1, double c2) {
    return harvested_power(p_rf, EhParams{z1, c1, c2});
  }, py::arg("p_rf"), py::arg("z1") = 0.024, py::arg("c1") = 150.0, py::arg("c2") = 0.014);
  m.def("rate", &rate, py::arg("sinr"));
  m.def("los_probability", &los_probability, py::arg("elevation_deg"), py::arg("b1") = 12.08,
        py::arg("b2") = 0.11, py::arg("sign") = 1.0);
  m.def("ris_steering", [](int mx, int my, double spacing, double azimuth, double elevation, double wavelength) {
    return CVec(ris_steering(mx, my, spacing, AngleSet{azimuth, elevation}, wavelength));
  });
  m.def("draw_rician", [](int rows, int cols, double distance, const CMat& los, double h0, double kappa0,
                          double rician, std::uint64_t seed, bool los_present) {
    Rng rng = make_stream(seed, "python");
    return draw_rician(rows, cols, distance, los, h0, kappa0, rician, rng, los_present);
  }, py::arg("rows"), py::arg("cols"), py::arg("distance"), py::arg("los"), py::arg("h0") = 0.01,
        py::arg("kappa0") = 2.2, py::arg("rician") = db_to_linear(3.0), py::arg("seed") = 1,
        py::arg("los_present") = true);

  py::class_<Trainer>(m, "Trainer")
      .def(py::init<const ScenarioConfig&>(), py::arg("config"))
      .def("run_slot", [](Trainer& t) { return record_dict(t.run_slot()); })
      .def_property_readonly("slot", &Trainer::slot)
      .def_property_readonly("meta_steps", &Trainer::meta_steps)
      .def("save_checkpoints", &Trainer::save_checkpoints)
      .def("load_checkpoints", &Trainer::load_checkpoints);

  m.def("train", [](const ScenarioConfig& cfg, const std::string& out_dir, bool checkpoints) {
    RunSummary s;
    {
      py::gil_scoped_release release;
      s = run_training(cfg, out_dir, checkpoints);
    }
    return summary_dict(s);
  }, py::arg("config"), py::arg("out_dir"), py::arg("checkpoints") = true);

  m.def("sweep", [](const ScenarioConfig& cfg, const std::string& axis, const std::vector<std::string>& values,
                    const std::string& out_dir) {
    std::vector<SweepPoint> pts;
    {
      py::gil_scoped_release release;
      pts = run_sweep(cfg, axis, values, out_dir);
    }
    py::list out;
    for (const auto& p : pts) {
      py::dict d = summary_dict(p.summary);
      d["value"] = p.value;
      out.append(d);
    }
    return out;
  }, py::arg("config"), py::arg("axis"), py::arg("values"), py::arg("out_dir"));
  m.def("sweep_axes", &sweep_axes);

  m.def("emit_plot_data", &emit_plot_data, py::arg("figure"), py::arg("inputs"), py::arg("labels"),
        py::arg("out_path"), py::arg("window") = 100);
}
