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


#include "amris/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace amris {

namespace fs = std::filesystem;

namespace {

void append(std::string& s, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), ",%.17g", v);
  s += buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string default_label(const std::string& path) {
  const fs::path p(path);
  if (p.filename() == "metrics.csv" && p.has_parent_path()) return p.parent_path().filename().string();
  return p.stem().string();
}

}  // namespace

// ---------------------------------------------------------------------------
// Trainer

Trainer::Trainer(const ScenarioConfig& cfg)
    : cfg_(cfg),
      world_(make_world(cfg)),
      meta_(MetaOptions::from_config(cfg), cfg.seed),
      hyper_(meta_.current()) {
  const AgentOptions opts = AgentOptions::from_config(cfg);
  for (int a = 0; a < world_.num_agents(); ++a)
    agents_.emplace_back(a, action_spec(world_, a), opts, cfg.seed);
  states_ = assemble_states(world_);
}

SlotRow Trainer::run_slot() {
  if (slot_ > 0 && slot_ % cfg_.episode_length == 0) {
    reset_episode(world_, world_.episode + 1);
    states_ = assemble_states(world_);
  }
  const int n = static_cast<int>(agents_.size());
  std::vector<HybridAction> actions(n);
  std::vector<ContinuousSample> samples(n);
  for (int a = 0; a < n; ++a) {
    const Mat& s = states_[a].tokens;
    actions[a].agent_id = a;
    actions[a].discrete = agents_[a].select_discrete(s, hyper_[HyperparamSet::kSigmaTh]);
    samples[a] = agents_[a].sample_continuous(s);
    actions[a].continuous = samples[a].action;
  }

  StepResult res = step(world_, actions);

  for (int a = 0; a < n; ++a) {
    const Mat& s = states_[a].tokens;
    const Mat& s_next = res.next_states[a].tokens;
    agents_[a].remember(ReplayEntry{s, actions[a].discrete, res.reward, s_next});
    agents_[a].dqn_train_step(hyper_);
    agents_[a].record(PpoSample{s, samples[a].u, samples[a].logp, res.reward, s_next});
  }

  SlotRow row{std::move(res.record), hyper_};
  states_ = std::move(res.next_states);
  ee_window_.push_back(row.record.ee);
  ++slot_;

  if (slot_ % cfg_.meta_period == 0) {
    for (auto& agent : agents_) agent.ppo_update(hyper_);
    hyper_ = meta_.step(ee_window_);
    ee_window_.clear();
  }
  return row;
}

void Trainer::save_checkpoints(const std::string& dir) {
  fs::create_directories(dir);
  for (auto& agent : agents_)
    nn::save_checkpoint((fs::path(dir) / ("agent" + std::to_string(agent.agent_id()))).string(),
                        agent.all_parameters());
  nn::save_checkpoint((fs::path(dir) / "meta").string(), meta_.parameters());
}

void Trainer::load_checkpoints(const std::string& dir) {
  for (auto& agent : agents_)
    nn::load_checkpoint((fs::path(dir) / ("agent" + std::to_string(agent.agent_id()))).string(),
                        agent.all_parameters());
  nn::load_checkpoint((fs::path(dir) / "meta").string(), meta_.parameters());
}

// ---------------------------------------------------------------------------
// Metrics

std::string metrics_header(const ScenarioConfig& cfg) {
  std::string h = "slot,episode,ee,reward,sum_rate_dl,sum_rate_ul,bs_power,ul_power";
  for (int k = 0; k < cfg.active_dl_users(); ++k) h += ",rate_dl" + std::to_string(k);
  for (int k = 0; k < cfg.active_ul_users(); ++k) h += ",rate_ul" + std::to_string(k);
  for (int i = 0; i < cfg.num_ris; ++i) {
    const std::string p = ",ris" + std::to_string(i) + "_";
    h += p + "mechanical" + p + "circuit" + p + "amplifier" + p + "harvested" + p + "total";
  }
  for (int c = 1; c <= 6; ++c) h += ",c" + std::to_string(c);
  for (const char* name : HyperparamSet::names()) h += std::string(",") + name;
  return h;
}

std::string metrics_row(const SlotRow& row) {
  const MetricsRecord& r = row.record;
  std::string s = std::to_string(r.slot) + "," + std::to_string(r.episode);
  for (double v : {r.ee, r.reward, r.sum_rate_dl, r.sum_rate_ul, r.bs_power, r.ul_power})
    append(s, v);
  for (double v : r.rates_dl) append(s, v);
  for (double v : r.rates_ul) append(s, v);
  for (const auto& p : r.ris)
    for (double v : {p.mechanical, p.circuit, p.amplifier, p.harvested, p.total}) append(s, v);
  for (double v : r.penalties.c) append(s, v);
  for (double v : row.hyper.values) append(s, v);
  return s;
}

double converged_mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const std::size_t n = std::max<std::size_t>(1, (v.size() + 9) / 10);
  double s = 0.0;
  for (std::size_t i = v.size() - n; i < v.size(); ++i) s += v[i];
  return s / static_cast<double>(n);
}

double initial_mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const std::size_t n = std::max<std::size_t>(1, (v.size() + 9) / 10);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += v[i];
  return s / static_cast<double>(n);
}

RunSummary run_training(const ScenarioConfig& cfg, const std::string& out_dir,
                        bool write_checkpoints) {
  validate(cfg);
  fs::create_directories(out_dir);
  RunSummary sum;
  sum.metrics_path = (fs::path(out_dir) / "metrics.csv").string();
  std::ofstream out(sum.metrics_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + sum.metrics_path);
  out << metrics_header(cfg) << '\n';

  Trainer trainer(cfg);
  for (int t = 0; t < cfg.total_slots; ++t) {
    const SlotRow row = trainer.run_slot();
    out << metrics_row(row) << '\n';
    sum.ee.push_back(row.record.ee);
  }
  out.close();
  {
    std::ofstream c(fs::path(out_dir) / "config.txt");
    c << serialize_config(cfg);
  }
  if (write_checkpoints) trainer.save_checkpoints((fs::path(out_dir) / "checkpoints").string());
  sum.slots = cfg.total_slots;
  sum.meta_steps = trainer.meta_steps();
  sum.initial_ee = initial_mean(sum.ee);
  sum.converged_ee = converged_mean(sum.ee);
  return sum;
}

// ---------------------------------------------------------------------------
// Sweeps

std::vector<std::string> sweep_axes() {
  std::vector<std::string> out{"height", "num_antennas"};
  const ScenarioConfig probe;
  for (const auto& k : config_keys()) {
    if (k == "duplex" || k == "fa_mode" || k == "bf_projection") continue;
    const std::string v = get_config_value(probe, k);
    if (v == "true" || v == "false") continue;
    out.push_back(k);
  }
  return out;
}

ScenarioConfig apply_sweep_value(ScenarioConfig cfg, const std::string& axis,
                                 const std::string& value) {
  const auto axes = sweep_axes();
  if (std::find(axes.begin(), axes.end(), axis) == axes.end())
    throw ConfigError("unknown sweep axis '" + axis + "'");
  if (axis == "height") {
    set_config_value(cfg, "z_min", value);
    set_config_value(cfg, "z_max", value);
    set_config_value(cfg, "ris_init_height", value);
  } else if (axis == "num_antennas") {
    set_config_value(cfg, "num_tx", value);
    set_config_value(cfg, "num_rx", value);
  } else {
    set_config_value(cfg, axis, value);
  }
  validate(cfg);
  return cfg;
}

std::vector<SweepPoint> run_sweep(const ScenarioConfig& cfg, const std::string& axis,
                                  const std::vector<std::string>& values,
                                  const std::string& out_dir, int max_threads) {
  std::vector<ScenarioConfig> cfgs;
  for (const auto& v : values) cfgs.push_back(apply_sweep_value(cfg, axis, v));
  fs::create_directories(out_dir);

  std::vector<SweepPoint> points(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  if (max_threads <= 0) max_threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  for (std::size_t start = 0; start < values.size(); start += max_threads) {
    std::vector<std::thread> pool;
    for (std::size_t k = start; k < std::min(values.size(), start + max_threads); ++k)
      pool.emplace_back([&, k] {
        try {
          const std::string dir = (fs::path(out_dir) / (axis + "_" + std::to_string(k))).string();
          points[k] = SweepPoint{values[k], run_training(cfgs[k], dir, false)};
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::ofstream sum(fs::path(out_dir) / "summary.csv", std::ios::binary);
  sum << "axis,value,converged_ee,initial_ee,metrics\n";
  for (const auto& p : points) {
    std::string line = axis + "," + p.value;
    append(line, p.summary.converged_ee);
    append(line, p.summary.initial_ee);
    sum << line << ',' << p.summary.metrics_path << '\n';
  }
  return points;
}

// ---------------------------------------------------------------------------
// Plot tables

int CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name) return static_cast<int>(c);
  throw std::runtime_error("missing column '" + name + "'");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty file '" + path + "'");
  t.header = split(line, ',');
  while (std::getline(in, line))
    if (!line.empty()) t.rows.push_back(split(line, ','));
  return t;
}

void emit_plot_data(const std::string& figure, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& labels, const std::string& out_path,
                    int window) {
  if (inputs.empty()) throw std::invalid_argument("emit_plot_data needs at least one input");
  if (!labels.empty() && labels.size() != inputs.size())
    throw std::invalid_argument("one label per input expected");
  auto label = [&](std::size_t k) { return labels.empty() ? default_label(inputs[k]) : labels[k]; };

  std::string body = "x,series,y\n";
  if (figure == "convergence" || figure == "overlay") {
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      const CsvTable t = read_csv(inputs[k]);
      const int cs = t.column("slot");
      const int ce = t.column("ee");
      const std::string name = label(k);
      double acc = 0.0;
      std::vector<double> ee;
      for (const auto& r : t.rows) ee.push_back(std::stod(r.at(ce)));
      for (std::size_t i = 0; i < t.rows.size(); ++i) {
        double y = ee[i];
        if (figure == "overlay") {
          acc += ee[i];
          if (i >= static_cast<std::size_t>(window)) acc -= ee[i - window];
          y = acc / static_cast<double>(std::min<std::size_t>(i + 1, window));
        }
        std::string line = t.rows[i].at(cs) + "," + name;
        append(line, y);
        body += line + "\n";
      }
    }
  } else if (figure == "sweep") {
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      const CsvTable t = read_csv(inputs[k]);
      const int ca = t.column("axis");
      const int cv = t.column("value");
      const int cc = t.column("converged_ee");
      for (const auto& r : t.rows) {
        const std::string series = labels.empty() ? r.at(ca) : labels[k];
        body += r.at(cv) + "," + series + "," + r.at(cc) + "\n";
      }
    }
  } else {
    throw std::invalid_argument("unknown figure '" + figure + "'");
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
  out << body;
}

}  // namespace amris
