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


// Training orchestration: the nested meta/inner loop, metrics CSV output,
// parameter sweeps and tidy plot tables.

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "amris/agents.hpp"
#include "amris/config.hpp"
#include "amris/environment.hpp"

namespace amris {

struct SlotRow {
  MetricsRecord record;
  HyperparamSet hyper;
};

// Owns one world, its inner agents and the meta-controller.
class Trainer {
 public:
  explicit Trainer(const ScenarioConfig& cfg);

  // Runs one slot. Every meta_period slots the actors are updated on their
  // fresh trajectories and the meta-controller takes a step.
  SlotRow run_slot();

  const ScenarioConfig& config() const { return cfg_; }
  const World& world() const { return world_; }
  const HyperparamSet& hyper() const { return hyper_; }
  int slot() const { return slot_; }
  int meta_steps() const { return meta_.steps(); }
  std::vector<HybridAgent>& agents() { return agents_; }
  MetaAgent& meta() { return meta_; }

  void save_checkpoints(const std::string& dir);
  void load_checkpoints(const std::string& dir);

 private:
  ScenarioConfig cfg_;
  World world_;
  std::vector<HybridAgent> agents_;
  MetaAgent meta_;
  HyperparamSet hyper_;
  std::vector<AgentState> states_;
  std::vector<double> ee_window_;
  int slot_ = 0;
};

std::string metrics_header(const ScenarioConfig& cfg);
std::string metrics_row(const SlotRow& row);

struct RunSummary {
  std::string metrics_path;
  int slots = 0;
  int meta_steps = 0;
  double initial_ee = 0.0;    // mean over the first 10% of slots
  double converged_ee = 0.0;  // mean over the last 10% of slots
  std::vector<double> ee;
};

// Mean of the last (or first) ceil(10%) entries.
double converged_mean(const std::vector<double>& v);
double initial_mean(const std::vector<double>& v);

// Writes <out_dir>/metrics.csv and, when requested, per-agent checkpoints.
RunSummary run_training(const ScenarioConfig& cfg, const std::string& out_dir,
                        bool write_checkpoints = true);

// Keys accepted by run_sweep: every numeric config key plus the aliases
// "height" (fixed flight altitude) and "num_antennas" (N_T = N_R).
std::vector<std::string> sweep_axes();
ScenarioConfig apply_sweep_value(ScenarioConfig cfg, const std::string& axis,
                                 const std::string& value);

struct SweepPoint {
  std::string value;
  RunSummary summary;
};

// One run per value, in parallel, each in <out_dir>/<axis>_<index>/; writes
// <out_dir>/summary.csv with the converged EE of every point.
std::vector<SweepPoint> run_sweep(const ScenarioConfig& cfg, const std::string& axis,
                                  const std::vector<std::string>& values,
                                  const std::string& out_dir, int max_threads = 0);

// Reads a metrics CSV into column name -> values.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int column(const std::string& name) const;
};
CsvTable read_csv(const std::string& path);

// figure: "convergence" (slot, EE per input), "overlay" (moving average of
// EE, one series per input), "sweep" (axis value, converged EE from a sweep
// summary). Writes x,series,y.
void emit_plot_data(const std::string& figure, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& labels, const std::string& out_path,
                    int window = 100);

}  // namespace amris
