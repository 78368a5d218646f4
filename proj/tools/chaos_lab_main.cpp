// chaos-lab: command-line front end for the operator-size dynamics toolkit.
//
// Subcommands: otoc, sizedist, mc-dot, mc-chain, mc-dr, scramblon-compare,
// verify. Runs are configured by flags or a JSON file (flags win); every run
// writes its series as CSV or JSON plus a manifest carrying the effective
// configuration, SHA-256 hashes of the outputs, wall time and seed.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sha256.hpp"

#include "chaoslab/analytics.hpp"
#include "chaoslab/dot_generator.hpp"
#include "chaoslab/evolve.hpp"
#include "chaoslab/rational.hpp"
#include "chaoslab/spectrum.hpp"
#include "chaoslab/stochastic.hpp"
#include "chaoslab/types.hpp"

using nlohmann::json;
using namespace chaoslab;

namespace {

std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct OutputSink {
  std::string prefix = "chaos_lab";
  std::string format = "csv";  // csv | json
  json config_echo;
  std::string command;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> hashes;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  void write_table(const std::string& stem,
                   const std::vector<std::string>& columns,
                   const std::vector<std::vector<double>>& rows) {
    std::string body;
    if (format == "csv") {
      for (std::size_t c = 0; c < columns.size(); ++c)
        body += (c ? "," : "") + columns[c];
      body += "\n";
      for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
          body += (c ? "," : "") + fmt_double(row[c]);
        body += "\n";
      }
    } else {
      json j;
      j["columns"] = columns;
      j["rows"] = rows;
      body = j.dump(1) + "\n";
    }
    const std::string name = prefix + "_" + stem + "." + format;
    std::ofstream out(name, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + name);
    out << body;
    hashes[name] = sha256::of_string(body);
  }

  void write_manifest() {
    json m;
    m["command"] = command;
    m["config"] = config_echo;
    m["seed"] = seed;
    m["outputs"] = hashes;
    m["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const std::string name = prefix + "_manifest.json";
    std::ofstream out(name, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + name);
    out << m.dump(1) << "\n";
  }
};

struct CommonOpts {
  std::string out_prefix;
  std::string format = "csv";
  std::string config_path;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& c, const std::string& default_prefix) {
  c.out_prefix = default_prefix;
  cmd->add_option("--out", c.out_prefix, "Output file prefix");
  cmd->add_option("--format", c.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--config", c.config_path,
                  "JSON config file; explicit flags override it");
  cmd->add_option("--threads", c.threads,
                  "Worker threads (0: CHAOS_LAB_THREADS or hardware)");
}

// ---------------------------------------------------------------- otoc ----

struct OtocOpts {
  CommonOpts common;
  int n_fermions = 10000;
  double coupling = 0.5;
  int r = 1;
  int n = 1;
  int s_star = 0;
  double t_max = 0.0;
  double dt = 0.0;
  int stride = 0;
  bool with_large_n = false;

  json echo() const {
    return {{"N", n_fermions}, {"J", coupling},   {"r", r},
            {"n", n},          {"s-star", s_star}, {"t-max", t_max},
            {"dt", dt},        {"stride", stride}, {"with-largeN", with_large_n}};
  }
};

void run_otoc(const OtocOpts& o, OutputSink& sink) {
  DotModel model(o.n_fermions, o.coupling);
  const double j = o.coupling;
  const double t_max =
      o.t_max > 0.0
          ? o.t_max
          : 1.25 * (std::log(static_cast<double>(o.n_fermions)) + 2.0) / (8.0 * j);
  EvolveConfig cfg;
  cfg.t_max = t_max;
  cfg.dt = o.dt;
  const double dt_eff = cfg.dt > 0.0 ? cfg.dt : 0.05 / (j * o.n_fermions);
  cfg.record_stride =
      o.stride > 0 ? o.stride
                   : std::max(1, static_cast<int>(t_max / dt_eff / 400));

  TimeSeries exact = otoc_curve(model, o.r, o.n, cfg);
  std::vector<std::vector<double>> rows;
  rows.reserve(exact.size());
  for (std::size_t k = 0; k < exact.size(); ++k)
    rows.push_back({exact.times[k], exact.values[k]});
  sink.write_table("exact", {"time", "value"}, rows);

  if (o.with_large_n) {
    LargeNJob job(o.n_fermions, j, o.r, o.n, o.s_star);
    std::vector<std::vector<double>> lrows;
    lrows.reserve(exact.size());
    for (double t : exact.times)
      lrows.push_back({t, otoc_large_n(t, job, OtocMode::closed)});
    sink.write_table("largeN", {"time", "value"}, lrows);
  }
}

// ------------------------------------------------------------ sizedist ----

struct SizedistOpts {
  CommonOpts common;
  int n_fermions = 1000;
  double coupling = 0.5;
  int r = 1;
  int s_star = 0;
  std::vector<double> times;
  double dt = 0.0;
  bool with_large_n = false;
  bool with_finite_n = false;

  json echo() const {
    return {{"N", n_fermions},  {"J", coupling},
            {"r", r},           {"s-star", s_star},
            {"t", times},       {"dt", dt},
            {"with-largeN", with_large_n}, {"with-finiteN", with_finite_n}};
  }
};

void run_sizedist(const SizedistOpts& o, OutputSink& sink) {
  DotModel model(o.n_fermions, o.coupling);
  if (o.times.empty())
    throw ConfigError("sizedist: at least one snapshot time (--t) required");
  std::vector<double> times(o.times);
  std::sort(times.begin(), times.end());
  if (times.front() <= 0.0) throw ConfigError("sizedist: times must be > 0");

  SizeGrid grid(o.n_fermions, o.r % 2);
  auto init = SizeDistribution::delta_at_s(grid, o.r);
  EvolveConfig cfg;
  cfg.t_max = times.back();
  cfg.dt = o.dt;
  const double dt_eff =
      cfg.dt > 0.0 ? cfg.dt : 0.05 / (o.coupling * o.n_fermions);
  cfg.record_stride = 1;

  std::vector<std::int64_t> marks;
  for (double t : times)
    marks.push_back(std::llround(t / dt_eff));
  std::vector<std::vector<double>> snapshots(times.size());
  std::int64_t step = -1;
  evolve_dot_observe(model, init, cfg,
                     [&](double, const std::vector<double>& p) {
                       ++step;
                       for (std::size_t k = 0; k < marks.size(); ++k)
                         if (marks[k] == step) snapshots[k] = p;
                     });

  std::unique_ptr<LargeNJob> job;
  if (o.with_large_n || o.with_finite_n)
    job = std::make_unique<LargeNJob>(o.n_fermions, o.coupling, o.r, 1, o.s_star);
  const double cell = 4.0 / o.n_fermions;  // xi spacing of the parity grid
  const double smear_hi = 5.0 / std::sqrt(static_cast<double>(o.n_fermions));
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (snapshots[k].empty())
      throw NumericError("sizedist: snapshot at t = " + fmt_double(times[k]) +
                         " was not captured (conservation guard tripped?)");
    std::vector<std::string> cols = {"xi", "exact"};
    if (o.with_large_n) cols.push_back("large_n");
    if (o.with_finite_n) cols.push_back("finite_n");
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < grid.size(); ++i) {
      const double xi = grid.xi_at(i);
      std::vector<double> row = {
          xi, snapshots[k][static_cast<std::size_t>(i)] / cell};
      if (o.with_large_n)
        row.push_back(xi > -1.0 && xi < 0.0
                          ? size_dist_large_n(xi, times[k], *job)
                          : 0.0);
      if (o.with_finite_n)
        row.push_back(xi < smear_hi ? size_dist_finite_n(xi, times[k], *job)
                                    : 0.0);
      rows.push_back(std::move(row));
    }
    sink.write_table("t" + std::to_string(k), cols, rows);
  }
}

// -------------------------------------------------------------- mc-dot ----

struct McDotOpts {
  CommonOpts common;
  double lambda = 1.0;
  int capacity = 1000;
  int m0 = 1;
  double t_max = 5.0;
  double dt = 0.0;
  std::int64_t ensemble = 10000;
  std::uint64_t seed = 1;
  std::string mode = "fixed-dt";
  int points = 51;

  json echo() const {
    return {{"lambda", lambda}, {"N", capacity}, {"m0", m0},
            {"t-max", t_max},   {"dt", dt},      {"ensemble", ensemble},
            {"seed", seed},     {"mode", mode},  {"points", points}};
  }
};

void run_mc_dot(const McDotOpts& o, OutputSink& sink) {
  const double dt = o.dt > 0.0 ? o.dt : 0.02 / (o.lambda * o.capacity);
  DRParams0d params(o.lambda, o.capacity, dt);
  const DrMode mode =
      o.mode == "gillespie" ? DrMode::gillespie : DrMode::fixed_dt;
  auto stats = mc_dot_dr(params, o.m0, o.t_max, o.ensemble, o.seed, mode,
                         o.points, o.common.threads);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < stats.times.size(); ++k)
    rows.push_back({stats.times[k], stats.mean[k][0],
                    stats.stderr_mean(static_cast<int>(k), 0)});
  sink.write_table("mean", {"time", "value", "stderr"}, rows);

  std::vector<std::vector<double>> hist;
  for (const auto& [m, count] : stats.final_histogram)
    hist.push_back({static_cast<double>(m), static_cast<double>(count)});
  sink.write_table("hist", {"m", "count"}, hist);
}

// ------------------------------------------------------------ mc-chain ----

struct McChainOpts {
  CommonOpts common;
  int sites = 3;
  int n_fermions = 8;
  double j1 = 1.0;
  double j2 = 1.0;
  std::vector<int> init;
  double t_max = 1.0;
  double dt = 0.0;
  std::int64_t ensemble = 10000;
  std::uint64_t seed = 1;
  std::string mode = "fixed-dt";
  int points = 21;

  json echo() const {
    return {{"L", sites},     {"N", n_fermions},    {"J1", j1},
            {"J2", j2},       {"init", init},       {"t-max", t_max},
            {"dt", dt},       {"ensemble", ensemble}, {"seed", seed},
            {"mode", mode},   {"points", points}};
  }
};

void run_mc_chain(const McChainOpts& o, OutputSink& sink) {
  ChainModel model(o.sites, o.n_fermions, o.j1, o.j2);
  std::vector<int> init = o.init;
  if (init.empty()) init.assign(static_cast<std::size_t>(o.sites), 1);
  // conservative default against the fastest reachable total rate
  const double rate_scale =
      (4.0 * o.j1 + 48.0 * o.j2) * o.n_fermions / 2.0 * o.sites;
  const double dt = o.dt > 0.0 ? o.dt : 0.08 / rate_scale;
  const DrMode mode =
      o.mode == "gillespie" ? DrMode::gillespie : DrMode::fixed_dt;
  auto stats = mc_chain_master(model, init, dt, o.t_max, o.ensemble, o.seed,
                               mode, o.points, o.common.threads);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < stats.times.size(); ++k)
    for (int x = 0; x < stats.sites; ++x)
      rows.push_back({static_cast<double>(x), stats.times[k],
                      stats.mean[k][static_cast<std::size_t>(x)],
                      stats.stderr_mean(static_cast<int>(k), x)});
  sink.write_table("mean", {"x", "time", "value", "stderr"}, rows);
}

// ---------------------------------------------------------------- mc-dr ----

struct McDrOpts {
  CommonOpts common;
  int sites = 60;
  double lambda_dt = 0.2;
  double p_dt = -1.0;
  double pl_dt = 0.1;
  double pr_dt = 0.1;
  int capacity = 1000;
  int steps = 150;
  int seed_site = -1;
  int seed_size = 1;
  bool uniform = false;
  int uniform_size = 0;
  std::int64_t ensemble = 10000;
  std::uint64_t seed = 1;
  int stride = 1;

  json echo() const {
    return {{"L", sites},          {"lambda-dt", lambda_dt},
            {"p-dt", p_dt},        {"pl-dt", pl_dt},
            {"pr-dt", pr_dt},      {"N", capacity},
            {"steps", steps},      {"seed-site", seed_site},
            {"seed-size", seed_size}, {"uniform", uniform},
            {"uniform-size", uniform_size}, {"ensemble", ensemble},
            {"seed", seed},        {"stride", stride}};
  }
};

DRParamsChain dr_params(const McDrOpts& o) {
  const double pl = o.p_dt >= 0.0 ? o.p_dt : o.pl_dt;
  const double pr = o.p_dt >= 0.0 ? o.p_dt : o.pr_dt;
  // probabilities are given per step; time is measured in steps (dt = 1)
  return DRParamsChain(o.lambda_dt, pl, pr, o.capacity, o.sites, 1.0);
}

std::vector<int> dr_init(const McDrOpts& o) {
  std::vector<int> init(static_cast<std::size_t>(o.sites), 0);
  if (o.uniform) {
    const int m = o.uniform_size > 0 ? o.uniform_size : o.capacity;
    for (int& v : init) v = m;
  } else {
    const int site = o.seed_site >= 0 ? o.seed_site : o.sites / 2;
    if (site >= o.sites) throw ConfigError("mc-dr: seed site outside lattice");
    init[static_cast<std::size_t>(site)] = o.seed_size;
  }
  return init;
}

void run_mc_dr(const McDrOpts& o, OutputSink& sink) {
  auto stats = mc_dr_chain(dr_params(o), dr_init(o), o.steps, o.ensemble,
                           o.seed, o.stride, o.common.threads);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < stats.times.size(); ++k)
    for (int x = 0; x < stats.sites; ++x)
      rows.push_back({static_cast<double>(x), stats.times[k],
                      stats.mean[k][static_cast<std::size_t>(x)],
                      stats.stderr_mean(static_cast<int>(k), x)});
  sink.write_table("mean", {"x", "t", "mean_size", "stderr"}, rows);
}

void run_scramblon_compare(const McDrOpts& o, OutputSink& sink) {
  const DRParamsChain params = dr_params(o);
  const std::vector<int> init = dr_init(o);
  auto stats = mc_dr_chain(params, init, o.steps, o.ensemble, o.seed, o.stride,
                           o.common.threads);
  std::vector<double> xi0(init.size());
  for (std::size_t x = 0; x < init.size(); ++x)
    xi0[x] = static_cast<double>(init[x]) / o.capacity;
  auto linear = single_scramblon(params, xi0, o.steps);

  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < stats.times.size(); ++k) {
    const int step = static_cast<int>(std::llround(stats.times[k]));
    for (int x = 0; x < stats.sites; ++x)
      rows.push_back({static_cast<double>(x), static_cast<double>(step),
                      stats.mean[k][static_cast<std::size_t>(x)] / o.capacity,
                      linear[static_cast<std::size_t>(step)]
                            [static_cast<std::size_t>(x)]});
  }
  sink.write_table("compare", {"x", "step", "mc_xi", "linear_xi"}, rows);
}

// --------------------------------------------------------------- verify ----

int run_verify() {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok,
                    const std::string& detail = "") {
    std::cout << (ok ? "PASS " : "FAIL ") << name
              << (ok || detail.empty() ? "" : " (" + detail + ")") << "\n";
    if (!ok) ++failures;
  };

  {
    bool ok = true;
    std::string detail;
    for (int n = 4; n <= 64 && ok; n += 2)
      for (int parity : {0, 1}) {
        SizeGrid grid(n, parity);
        const auto a = build_dot_generator_rational(n, grid);
        const auto b = build_dot_generator_from_algebra_rational(n, grid);
        for (int i = 0; i < grid.size(); ++i)
          for (int j = 0; j < grid.size(); ++j)
            if (!(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
                  b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])) {
              ok = false;
              detail = "mismatch at N = " + std::to_string(n);
            }
      }
    report("generator-equality (exact rational, N <= 64)", ok, detail);
  }
  {
    bool ok = true;
    for (int n = 4; n <= 64 && ok; n += 2)
      for (int parity : {0, 1}) {
        SizeGrid grid(n, parity);
        const auto g = build_dot_generator_rational(n, grid);
        for (int j = 0; j < grid.size(); ++j) {
          Rational col(0);
          for (int i = 0; i < grid.size(); ++i)
            col += g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
          if (!col.is_zero()) ok = false;
        }
      }
    report("column-sum conservation (exact rational)", ok);
  }
  {
    DotModel model(32, 1.0);
    SizeGrid grid(32, 1);
    auto init = SizeDistribution::delta_at_s(grid, 1);
    EvolveConfig rk;
    rk.t_max = 2.0;
    rk.record_stride = 1 << 20;
    auto t_rk = evolve_dot(model, init, rk);
    EvolveConfig ex;
    ex.t_max = 2.0;
    ex.method = Integrator::expm;
    ex.dt = 2.0;
    auto t_ex = evolve_dot(model, init, ex);
    double diff = 0.0;
    for (int i = 0; i < grid.size(); ++i)
      diff = std::max(diff, std::abs(t_rk.back().second.prob_at(i) -
                                     t_ex.back().second.prob_at(i)));
    report("rk4 vs matrix exponential (N = 32)", diff < 1e-8,
           "max diff " + fmt_double(diff));
  }
  {
    DotModel model(400, 0.5);
    SizeGrid grid(400, 1);
    auto init = SizeDistribution::delta_at_s(grid, 1);
    EvolveConfig cfg;
    cfg.t_max = 4.0;
    cfg.record_stride = 1000;
    double drift = 0.0, min_p = 0.0;
    evolve_dot_observe(model, init, cfg,
                       [&](double, const std::vector<double>& p) {
                         double sum = 0.0;
                         for (double v : p) {
                           sum += v;
                           min_p = std::min(min_p, v);
                         }
                         drift = std::max(drift, std::abs(sum - 1.0));
                       });
    report("conservation and positivity (N = 400, t <= 4)",
           drift < 1e-9 && min_p > -1e-10,
           "drift " + fmt_double(drift) + ", min " + fmt_double(min_p));
  }
  {
    double worst = 0.0;
    for (bool finite_n : {false, true}) {
      BidiagonalSpectrum spec(1, finite_n ? rates_finite_n_table(1, 41, 2000)
                                          : rates_large_n_table(1, 41));
      for (int h = 0; h < spec.points(); ++h)
        for (int hp = 0; hp < spec.points(); ++hp) {
          const double expect = h == hp ? 1.0 : 0.0;
          worst = std::max(worst, std::abs(spec.pairing(h, hp) - expect));
        }
    }
    report("biorthogonality (both rate tables, S_max = 41)", worst <= 1e-8,
           "worst " + fmt_double(worst));
  }
  {
    BidiagonalSpectrum spec(1, rates_large_n_table(1, 41));
    double worst = 0.0;
    for (double t : {0.5, 1.5, 3.0})
      for (int s = 1; s <= 15; s += 2)
        worst = std::max(worst, std::abs(spec.reconstruct(1, s, t) -
                                         small_dist_large_n(1, s, t, 0.5)));
    report("eigen reconstruction vs closed form", worst < 1e-8,
           "worst " + fmt_double(worst));
  }
  {
    double worst = 0.0;
    for (auto [a, z] : std::vector<std::pair<double, double>>{
             {0.5, 0.8}, {1.0, 2.0}, {1.5, 5.0}})
      worst = std::max(worst,
                       std::abs(tricomi_u(a, a + 1.0, z) - std::pow(z, -a)) *
                           std::pow(z, a));
    report("tricomi U closed-form checks", worst < 1e-8,
           "worst " + fmt_double(worst));
  }
  {
    LargeNJob job(4000, 0.5, 1, 1, 400);
    double total = 0.0;
    const double dt = 1e-3;
    for (double t = -2.0; t < 10.0; t += dt) total += flux_large_n(t, job) * dt;
    report("flux normalization", std::abs(total - 1.0) < 1e-3,
           "integral " + fmt_double(total));
  }
  std::cout << (failures == 0 ? "verify: all invariants hold\n"
                              : "verify: FAILURES present\n");
  return failures == 0 ? 0 : 3;
}

// ---------------------------------------------------------- config file ----

// Merge a JSON config file into the token stream: keys become --key tokens
// placed before the explicit flags, which therefore win. Unknown keys and
// non-scalar nonsense are rejected with the field named.
std::vector<std::string> merge_config_tokens(CLI::App* cmd,
                                             const std::string& path,
                                             const std::vector<std::string>& argv_tokens) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  if (!j.is_object())
    throw ConfigError("config root must be a JSON object in " + path);

  auto explicitly_set = [&](const std::string& flag) {
    for (const auto& tok : argv_tokens) {
      if (tok == flag) return true;
      if (tok.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };

  std::vector<std::string> merged;
  for (const auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    if (cmd->get_option_no_throw(flag) == nullptr)
      throw ConfigError("unknown config field \"" + key + "\" for subcommand " +
                        cmd->get_name());
    if (explicitly_set(flag)) continue;
    auto push_scalar = [&](const json& v) {
      if (v.is_boolean()) {
        if (v.get<bool>()) merged.push_back(flag);
      } else {
        merged.push_back(flag);
        merged.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
    };
    if (value.is_array())
      for (const auto& item : value) push_scalar(item);
    else
      push_scalar(value);
  }
  merged.insert(merged.end(), argv_tokens.begin(), argv_tokens.end());
  return merged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Operator-size dynamics toolkit for Brownian quantum dots and chains"};
  app.require_subcommand(1);

  OtocOpts otoc;
  auto* cmd_otoc = app.add_subcommand(
      "otoc", "Exact OTOC curve, optionally with the large-N closed form");
  cmd_otoc->add_option("--N", otoc.n_fermions, "Majorana flavors per dot");
  cmd_otoc->add_option("--J", otoc.coupling, "Coupling J (1/time)");
  cmd_otoc->add_option("--r", otoc.r, "Initial operator size");
  cmd_otoc->add_option("--n", otoc.n, "Moment order");
  cmd_otoc->add_option("--s-star", otoc.s_star, "Crossover size (0: default)");
  cmd_otoc->add_option("--t-max", otoc.t_max, "End time, units 1/J (0: auto)");
  cmd_otoc->add_option("--dt", otoc.dt, "Integrator step (0: auto)");
  cmd_otoc->add_option("--stride", otoc.stride, "Record stride (0: auto)");
  cmd_otoc->add_flag("--with-largeN", otoc.with_large_n,
                     "Also write the closed-form reference curve");
  add_common(cmd_otoc, otoc.common, "otoc");

  SizedistOpts sd;
  auto* cmd_sd =
      app.add_subcommand("sizedist", "Operator size distribution snapshots");
  cmd_sd->add_option("--N", sd.n_fermions, "Majorana flavors");
  cmd_sd->add_option("--J", sd.coupling, "Coupling J");
  cmd_sd->add_option("--r", sd.r, "Initial operator size");
  cmd_sd->add_option("--s-star", sd.s_star, "Crossover size (0: default)");
  cmd_sd->add_option("--t", sd.times, "Snapshot times (repeatable)");
  cmd_sd->add_option("--dt", sd.dt, "Integrator step (0: auto)");
  cmd_sd->add_flag("--with-largeN", sd.with_large_n, "Add large-N density column");
  cmd_sd->add_flag("--with-finiteN", sd.with_finite_n, "Add 1/N density column");
  add_common(cmd_sd, sd.common, "sizedist");

  McDotOpts md;
  auto* cmd_md =
      app.add_subcommand("mc-dot", "0d diffusion-reaction Monte Carlo");
  cmd_md->add_option("--lambda", md.lambda, "Growth rate");
  cmd_md->add_option("--N", md.capacity, "Capacity N");
  cmd_md->add_option("--m0", md.m0, "Initial size");
  cmd_md->add_option("--t-max", md.t_max, "End time, units 1/lambda");
  cmd_md->add_option("--dt", md.dt, "Step for fixed-dt mode (0: auto)");
  cmd_md->add_option("--ensemble", md.ensemble, "Trajectories");
  cmd_md->add_option("--seed", md.seed, "RNG seed");
  cmd_md->add_option("--mode", md.mode, "fixed-dt or gillespie")
      ->check(CLI::IsMember({"fixed-dt", "gillespie"}));
  cmd_md->add_option("--points", md.points, "Recorded checkpoints");
  add_common(cmd_md, md.common, "mc_dot");

  McChainOpts mc;
  auto* cmd_mc =
      app.add_subcommand("mc-chain", "Chain master-equation Monte Carlo");
  cmd_mc->add_option("--L", mc.sites, "Chain length");
  cmd_mc->add_option("--N", mc.n_fermions, "Majorana flavors per site");
  cmd_mc->add_option("--J1", mc.j1, "On-site coupling");
  cmd_mc->add_option("--J2", mc.j2, "Bond coupling");
  cmd_mc->add_option("--init", mc.init, "Initial sizes per site (default all 1)");
  cmd_mc->add_option("--t-max", mc.t_max, "End time");
  cmd_mc->add_option("--dt", mc.dt, "Fixed-dt step (0: auto)");
  cmd_mc->add_option("--ensemble", mc.ensemble, "Trajectories");
  cmd_mc->add_option("--seed", mc.seed, "RNG seed");
  cmd_mc->add_option("--mode", mc.mode, "fixed-dt or gillespie")
      ->check(CLI::IsMember({"fixed-dt", "gillespie"}));
  cmd_mc->add_option("--points", mc.points, "Recorded checkpoints");
  add_common(cmd_mc, mc.common, "mc_chain");

  McDrOpts dr;
  McDrOpts sc;
  auto add_dr_opts = [&](CLI::App* cmd, McDrOpts& o) {
    cmd->add_option("--L", o.sites, "Lattice sites");
    cmd->add_option("--lambda-dt", o.lambda_dt, "Branching probability per step");
    cmd->add_option("--p-dt", o.p_dt, "Symmetric hop probability per step");
    cmd->add_option("--pl-dt", o.pl_dt, "Left hop probability per step");
    cmd->add_option("--pr-dt", o.pr_dt, "Right hop probability per step");
    cmd->add_option("--N", o.capacity, "Capacity N");
    cmd->add_option("--steps", o.steps, "Number of steps");
    cmd->add_option("--seed-site", o.seed_site, "Seeded site (-1: center)");
    cmd->add_option("--seed-size", o.seed_size, "Seed size");
    cmd->add_flag("--uniform", o.uniform, "Uniform initial state instead of a seed");
    cmd->add_option("--uniform-size", o.uniform_size, "Uniform initial size (0: N)");
    cmd->add_option("--ensemble", o.ensemble, "Trajectories");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--stride", o.stride, "Record stride in steps");
  };
  auto* cmd_dr =
      app.add_subcommand("mc-dr", "Diffusion-reaction chain Monte Carlo");
  add_dr_opts(cmd_dr, dr);
  add_common(cmd_dr, dr.common, "mc_dr");

  auto* cmd_sc = app.add_subcommand(
      "scramblon-compare", "Diffusion-reaction chain vs the linear predictor");
  add_dr_opts(cmd_sc, sc);
  add_common(cmd_sc, sc.common, "scramblon_compare");

  app.add_subcommand("verify", "Run the oracle suite and print PASS/FAIL");

  try {
    // First pass: identify the subcommand and an optional --config file, then
    // re-parse with the file's tokens merged in.
    std::vector<std::string> tokens(argv + 1, argv + argc);
    std::string sub_name;
    std::string config_path;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (sub_name.empty() && !tokens[i].empty() && tokens[i][0] != '-')
        sub_name = tokens[i];
      if (tokens[i] == "--config" && i + 1 < tokens.size())
        config_path = tokens[i + 1];
      else if (tokens[i].rfind("--config=", 0) == 0)
        config_path = tokens[i].substr(9);
    }
    std::vector<std::string> final_tokens(tokens);
    if (!config_path.empty() && !sub_name.empty()) {
      CLI::App* cmd = app.get_subcommand_no_throw(sub_name);
      if (cmd == nullptr) throw ConfigError("unknown subcommand " + sub_name);
      std::vector<std::string> rest(tokens);
      rest.erase(std::find(rest.begin(), rest.end(), sub_name));
      final_tokens = merge_config_tokens(cmd, config_path, rest);
      final_tokens.insert(final_tokens.begin(), sub_name);
    }

    try {
      std::vector<std::string> reversed(final_tokens.rbegin(),
                                        final_tokens.rend());
      app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) return app.exit(e);  // --help
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    }

    CLI::App* active = app.get_subcommands().front();
    if (active->get_name() == "verify") return run_verify();

    OutputSink sink;
    if (active == cmd_otoc) {
      sink.prefix = otoc.common.out_prefix;
      sink.format = otoc.common.format;
      sink.command = "otoc";
      sink.config_echo = otoc.echo();
      run_otoc(otoc, sink);
    } else if (active == cmd_sd) {
      sink.prefix = sd.common.out_prefix;
      sink.format = sd.common.format;
      sink.command = "sizedist";
      sink.config_echo = sd.echo();
      run_sizedist(sd, sink);
    } else if (active == cmd_md) {
      sink.prefix = md.common.out_prefix;
      sink.format = md.common.format;
      sink.command = "mc-dot";
      sink.config_echo = md.echo();
      sink.seed = md.seed;
      run_mc_dot(md, sink);
    } else if (active == cmd_mc) {
      sink.prefix = mc.common.out_prefix;
      sink.format = mc.common.format;
      sink.command = "mc-chain";
      sink.config_echo = mc.echo();
      sink.seed = mc.seed;
      run_mc_chain(mc, sink);
    } else if (active == cmd_dr) {
      sink.prefix = dr.common.out_prefix;
      sink.format = dr.common.format;
      sink.command = "mc-dr";
      sink.config_echo = dr.echo();
      sink.seed = dr.seed;
      run_mc_dr(dr, sink);
    } else if (active == cmd_sc) {
      sink.prefix = sc.common.out_prefix;
      sink.format = sc.common.format;
      sink.command = "scramblon-compare";
      sink.config_echo = sc.echo();
      sink.seed = sc.seed;
      run_scramblon_compare(sc, sink);
    }
    sink.write_manifest();
    return 0;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
