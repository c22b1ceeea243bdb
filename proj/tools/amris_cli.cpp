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


// amris: train, sweep and plot-table front end.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "amris/config.hpp"
#include "amris/harness.hpp"

namespace {

amris::ScenarioConfig build_config(const std::string& profile, const std::string& path,
                                   const std::vector<std::string>& overrides) {
  amris::ScenarioConfig cfg = amris::profile_defaults(profile);
  if (!path.empty()) cfg = amris::load_config(path, cfg);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw amris::ConfigError("--set expects key=value, got '" + kv + "'");
    amris::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  amris::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aerial multi-functional RIS training harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string profile = "desk";
  std::string out_dir = "runs/train";
  std::vector<std::string> overrides;
  std::vector<std::string> ablate;
  long long seed = -1;
  bool no_checkpoints = false;

  auto* train = app.add_subcommand("train", "Run one training job");
  train->add_option("--config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
  train->add_option("--seed", seed, "override the config seed");
  train->add_option("--ablate", ablate, "disable a component")->check(CLI::IsMember({"attention", "meta"}));
  train->add_option("--profile", profile, "base profile")->check(CLI::IsMember({"desk", "paper"}));
  train->add_option("--out", out_dir, "output directory");
  train->add_option("--set", overrides, "extra key=value overrides");
  train->add_flag("--no-checkpoints", no_checkpoints, "skip writing checkpoints");

  std::string axis;
  std::vector<std::string> values;
  std::string sweep_out = "runs/sweep";
  int threads = 0;
  auto* sweep = app.add_subcommand("sweep", "One run per value of a config key");
  sweep->add_option("--axis", axis, "config key or alias to vary")->required();
  sweep->add_option("--values", values, "values to try")->required();
  sweep->add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  sweep->add_option("--seed", seed, "override the config seed");
  sweep->add_option("--ablate", ablate, "disable a component")->check(CLI::IsMember({"attention", "meta"}));
  sweep->add_option("--profile", profile, "base profile")->check(CLI::IsMember({"desk", "paper"}));
  sweep->add_option("--out", sweep_out, "output directory");
  sweep->add_option("--set", overrides, "extra key=value overrides");
  sweep->add_option("--threads", threads, "parallel runs (0 = one per core)");

  std::string figure;
  std::vector<std::string> inputs;
  std::vector<std::string> labels;
  std::string plot_out = "plot.csv";
  int window = 100;
  auto* plot = app.add_subcommand("emit-plot-data", "Write a tidy x,series,y table");
  plot->add_option("--figure", figure, "convergence | overlay | sweep")
      ->required()
      ->check(CLI::IsMember({"convergence", "overlay", "sweep"}));
  plot->add_option("--input", inputs, "metrics.csv or summary.csv files")->required();
  plot->add_option("--label", labels, "series name per input");
  plot->add_option("--out", plot_out, "output CSV");
  plot->add_option("--window", window, "moving-average window for overlay")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train || *sweep) {
      amris::ScenarioConfig cfg = build_config(profile, config_path, overrides);
      if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
      for (const auto& a : ablate) {
        if (a == "attention") cfg.attention = false;
        if (a == "meta") cfg.meta = false;
      }
      if (*train) {
        const auto s = amris::run_training(cfg, out_dir, !no_checkpoints);
        std::printf("slots %d  meta-steps %d  initial EE %.6g  converged EE %.6g\n%s\n", s.slots,
                    s.meta_steps, s.initial_ee, s.converged_ee, s.metrics_path.c_str());
      } else {
        const auto points = amris::run_sweep(cfg, axis, values, sweep_out, threads);
        for (const auto& p : points)
          std::printf("%s = %s  converged EE %.6g\n", axis.c_str(), p.value.c_str(),
                      p.summary.converged_ee);
      }
    } else if (*plot) {
      amris::emit_plot_data(figure, inputs, labels, plot_out, window);
      std::printf("%s\n", plot_out.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
