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


#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "amris/harness.hpp"

using namespace amris;
namespace fs = std::filesystem;

namespace {

ScenarioConfig quick(int slots = 12) {
  ScenarioConfig c;
  c.hidden = 16;
  c.d_k = 8;
  c.attention_out = 8;
  c.batch_size = 4;
  c.total_slots = slots;
  c.episode_length = 7;
  return c;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& s) const { return (path / s).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int count_lines(const std::string& text) {
  return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("config round trip") {
  ScenarioConfig c = profile_defaults("paper");
  c.seed = 77;
  c.attention = false;
  c.fa_mode = FaMode::kPartial;
  c.duplex = DuplexMode::kUplinkOnly;
  c.rho4 = 1.2345678901234567e-5;
  const std::string text = serialize_config(c);
  const ScenarioConfig back = parse_config(text);
  CHECK(serialize_config(back) == text);
  CHECK(back.num_elements() == 32);
  CHECK(back.rho4 == c.rho4);
  for (const auto& k : config_keys()) CHECK(get_config_value(back, k) == get_config_value(c, k));
}

TEST_CASE("config errors") {
  CHECK_THROWS_WITH_AS(parse_config("nope = 3\n"), doctest::Contains("unknown config key 'nope'"), ConfigError);
  CHECK_THROWS_AS(parse_config("num_ris = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("p_bs = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("fa_mode = wobbly\n"), ConfigError);
  CHECK_THROWS_WITH(parse_config("# ok\n\nseed = 4\nbad_line\n"), doctest::Contains("line 4"));
  CHECK_THROWS_AS(profile_defaults("laptop"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/file.conf"), ConfigError);
  const auto c = parse_config("seed = 4  # trailing comment\nattention = false\n");
  CHECK(c.seed == 4);
  CHECK_FALSE(c.attention);
}

TEST_CASE("one meta step per meta period") {
  for (int t : {5, 23}) {
    TempDir dir("amris_meta_count_" + std::to_string(t));
    const auto s = run_training(quick(t), dir.path.string(), false);
    CHECK(s.meta_steps == t / 5);
    CHECK(s.slots == t);
  }
}

TEST_CASE("metrics file has one row per slot and a matching header") {
  TempDir dir("amris_rows");
  const auto cfg = quick(12);
  const auto s = run_training(cfg, dir.path.string(), true);
  const std::string text = slurp(s.metrics_path);
  CHECK(count_lines(text) == 12 + 1);
  std::istringstream in(text);
  std::string header, line;
  std::getline(in, header);
  CHECK(header == metrics_header(cfg));
  const auto cols = std::count(header.begin(), header.end(), ',');
  int slot = 0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == cols);
    CHECK(std::stoi(line.substr(0, line.find(','))) == ++slot);
  }
  CHECK(fs::exists(dir / "checkpoints/agent0.bin"));
  CHECK(fs::exists(dir / "checkpoints/agent2.manifest"));
  CHECK(fs::exists(dir / "checkpoints/meta.bin"));
  CHECK(fs::exists(dir / "config.txt"));
  CHECK(parse_config(slurp(dir / "config.txt")).total_slots == 12);
}

TEST_CASE("same seed gives byte-identical metrics, other seed does not") {
  TempDir a("amris_det_a"), b("amris_det_b"), c("amris_det_c");
  const auto ra = run_training(quick(15), a.path.string(), false);
  const auto rb = run_training(quick(15), b.path.string(), false);
  auto other = quick(15);
  other.seed = 2;
  const auto rc = run_training(other, c.path.string(), false);
  CHECK(slurp(ra.metrics_path) == slurp(rb.metrics_path));
  CHECK(slurp(ra.metrics_path) != slurp(rc.metrics_path));
}

TEST_CASE("attention off flattens the tokens") {
  auto cfg = quick();
  cfg.attention = false;
  Trainer t(cfg);
  auto& agent = t.agents()[0];
  CHECK_FALSE(agent.encoder.uses_attention());
  const auto spec = agent.spec();
  CHECK(agent.encoder.output_dim() == spec.num_tokens * spec.token_dim);
  CHECK(agent.encoder.parameters().empty());
  Mat tokens = Mat::Random(spec.num_tokens, spec.token_dim);
  nn::Graph g;
  const Mat flat = g.value(agent.encoder.encode(g, tokens, false, nullptr));
  for (int r = 0; r < spec.num_tokens; ++r)
    for (int c = 0; c < spec.token_dim; ++c) CHECK(flat(0, r * spec.token_dim + c) == tokens(r, c));
}

TEST_CASE("harvesting ratio pins that share of mode bits") {
  auto cfg = quick();
  cfg.eh_ratio = 0.9;
  Trainer t(cfg);
  for (int i = 0; i < cfg.num_ris; ++i) {
    const auto spec = action_spec(t.world(), i);
    int pinned = 0;
    for (int e = 0; e < cfg.num_elements(); ++e) pinned += spec.fixed[e] == 0;
    CHECK(pinned == 7);
  }
  for (int s = 0; s < 6; ++s) t.run_slot();
  for (int i = 0; i < cfg.num_ris; ++i)
    for (int e = 0; e < cfg.num_elements(); ++e)
      if (t.world().eh_forced[i][e]) CHECK(t.world().configs[i].alpha[e] == 0);
}

TEST_CASE("frozen meta keeps hyperparameters for a whole run") {
  auto cfg = quick(20);
  cfg.meta = false;
  Trainer t(cfg);
  for (int s = 0; s < 20; ++s) CHECK(t.run_slot().hyper.values == HyperparamSet::midpoint().values);
  CHECK(t.meta_steps() == 4);
}

TEST_CASE("checkpoint save and load restore every agent") {
  TempDir dir("amris_trainer_ckpt");
  Trainer a(quick());
  for (int s = 0; s < 6; ++s) a.run_slot();
  a.save_checkpoints(dir.path.string());
  auto other = quick();
  other.seed = 9;
  Trainer b(other);
  b.load_checkpoints(dir.path.string());
  for (std::size_t k = 0; k < a.agents().size(); ++k) {
    auto pa = a.agents()[k].all_parameters();
    auto pb = b.agents()[k].all_parameters();
    REQUIRE(pa.size() == pb.size());
    for (std::size_t p = 0; p < pa.size(); ++p) CHECK((pa[p]->value == pb[p]->value));
  }
}

TEST_CASE("sweeps") {
  CHECK_THROWS_AS(apply_sweep_value(quick(), "warp_factor", "3"), ConfigError);
  const auto h = apply_sweep_value(quick(), "height", "150");
  CHECK(h.z_min == 150.0);
  CHECK(h.z_max == 150.0);
  CHECK(h.ris_init_height == 150.0);
  const auto n = apply_sweep_value(quick(), "num_antennas", "6");
  CHECK(n.num_tx == 6);
  CHECK(n.num_rx == 6);
  CHECK(apply_sweep_value(quick(), "beta_max", "1").beta_max == 1.0);

  TempDir dir("amris_sweep");
  const auto pts = run_sweep(quick(10), "height", {"50", "150", "300", "500"}, dir.path.string(), 2);
  CHECK(pts.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(fs::exists(dir / ("height_" + std::to_string(k) + "/metrics.csv")));
  const CsvTable summary = read_csv(dir / "summary.csv");
  CHECK(summary.rows.size() == 4);
  CHECK(summary.rows[2].at(summary.column("value")) == "300");

  const std::string out = dir / "plot.csv";
  emit_plot_data("sweep", {dir / "summary.csv"}, {}, out);
  const CsvTable plot = read_csv(out);
  CHECK(plot.header == std::vector<std::string>{"x", "series", "y"});
  CHECK(plot.rows.size() == 4);
  CHECK(plot.rows[0][0] == "50");
  CHECK(plot.rows[0][1] == "height");
}

TEST_CASE("plot data for convergence and overlays") {
  TempDir a("amris_plot_a"), b("amris_plot_b");
  auto cfg = quick(10);
  const auto ra = run_training(cfg, a.path.string(), false);
  cfg.attention = false;
  const auto rb = run_training(cfg, b.path.string(), false);

  const std::string conv = a / "conv.csv";
  emit_plot_data("convergence", {ra.metrics_path}, {}, conv);
  const CsvTable c = read_csv(conv);
  CHECK(c.rows.size() == 10);
  CHECK(c.rows[0][0] == "1");
  CHECK(std::stod(c.rows[3][2]) == doctest::Approx(ra.ee[3]));

  const std::string over = a / "overlay.csv";
  emit_plot_data("overlay", {ra.metrics_path, rb.metrics_path}, {"full", "no_att"}, over, 3);
  const CsvTable o = read_csv(over);
  CHECK(o.rows.size() == 20);
  CHECK(o.rows[0][1] == "full");
  CHECK(o.rows[10][1] == "no_att");
  CHECK(std::stod(o.rows[5][2]) == doctest::Approx((ra.ee[3] + ra.ee[4] + ra.ee[5]) / 3));

  CHECK_THROWS(emit_plot_data("convergence", {a / "missing.csv"}, {}, conv));
  CHECK_THROWS(emit_plot_data("pie", {ra.metrics_path}, {}, conv));
}

TEST_CASE("converged and initial means use a tenth of the run") {
  std::vector<double> v;
  for (int i = 1; i <= 25; ++i) v.push_back(i);
  CHECK(converged_mean(v) == doctest::Approx((23 + 24 + 25) / 3.0));
  CHECK(initial_mean(v) == doctest::Approx(2.0));
}

TEST_CASE("paper profile dimensions") {
  const auto p = profile_defaults("paper");
  CHECK(p.num_ris == 4);
  CHECK(p.num_elements() == 32);
  CHECK(p.num_dl_users == 4);
  CHECK(p.num_tx == 16);
  const auto d = profile_defaults("desk");
  CHECK(d.num_ris == 2);
  CHECK(d.num_elements() == 8);
  CHECK(d.total_slots == 2000);
}
