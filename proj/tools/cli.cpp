// Copyright 2026 The PRW Authors.
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

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "prw/kernels.hpp"
#include "prw/oracle.hpp"
#include "prw/rng.hpp"
#include "report_json.hpp"

namespace prw::cli {
namespace {

using nlohmann::json;

struct InstanceSource {
  std::string hypercube;
  std::vector<std::string> points;
  std::vector<std::string> weights;
};

struct BenchConfig {
  double eta_min = 0.0;
  double gamma_w = 0.0;
  std::string label;
};

void add_source_options(CLI::App* app, InstanceSource& src) {
  app->add_option("--hypercube", src.hypercube,
                  "Fragmented hypercube: n=..,d=..,kstar=..");
  app->add_option("--points", src.points, "Point CSV files X.csv Y.csv")
      ->expected(2);
  app->add_option("--weights", src.weights, "Weight CSV files rx.csv cy.csv")
      ->expected(2);
}

void add_solver_options(CLI::App* app, SolverSettings& s) {
  app->add_option("--solver", s.solver, "realm, irbbs or fixed")
      ->check(CLI::IsMember({"realm", "irbbs", "fixed"}));
  app->add_option("--eta", s.eta, "Initial (realm) or fixed penalty eta");
  app->add_option("--eta-min", s.eta_min, "Smallest penalty parameter");
  app->add_option("--gamma-w", s.gamma_w, "Multiplier update threshold");
  app->add_option("--gamma-eta", s.gamma_eta, "Penalty decrease factor");
  app->add_option("--gamma-eps", s.gamma_eps, "Tolerance decrease factor");
  app->add_option("--theta", s.theta, "Sinkhorn tolerance scale");
  app->add_option("--tau", s.tau, "Initial or fixed stepsize");
  app->add_option("--mode", s.mode, "Sinkhorn form for irbbs/fixed")
      ->check(CLI::IsMember({"exp", "log"}));
}

PrwInstance build_instance(const InstanceSource& src, Eigen::Index k,
                           std::uint64_t instance_seed) {
  if (!src.hypercube.empty() == !src.points.empty()) {
    throw InvalidInput("give exactly one of --hypercube or --points");
  }
  if (!src.hypercube.empty()) {
    HypercubeSpec spec = parse_hypercube(src.hypercube);
    if (k > 0) spec.k = k;
    return fragmented_hypercube(spec, instance_seed);
  }
  std::optional<WeightFiles> w;
  if (!src.weights.empty()) w = WeightFiles{src.weights[0], src.weights[1]};
  return load_instance(src.points[0], src.points[1], k > 0 ? k : 2, w);
}

std::string fmt(double v, int prec = 17) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

const char* csv_header =
    "cell,n,d,kstar,config,eta_min,gamma_w,instance,init,instance_seed,"
    "init_seed,prw,prw_p,prw_p_exact,multiplier_updates,iterations,n_grad,"
    "n_sinkhorn_exp,n_sinkhorn_log,converged,stop_reason,e1,e2,grad_ok,"
    "comp_ok,seconds";

}  // namespace

RunSeeds run_seeds(std::uint64_t master, std::uint64_t cell,
                   std::uint64_t instance, std::uint64_t init) {
  return {derive_seed(master, cell, instance, 0),
          derive_seed(master, cell, instance, 1 + init)};
}

HypercubeSpec parse_hypercube(const std::string& text) {
  HypercubeSpec spec;
  bool have_k = false;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw InvalidInput("--hypercube: expected key=value, got '" + item + "'");
    }
    const std::string key = item.substr(0, eq);
    long long value = 0;
    try {
      std::size_t used = 0;
      value = std::stoll(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidInput("--hypercube: '" + item + "' is not an integer");
    }
    if (key == "n") {
      spec.n = value;
    } else if (key == "d") {
      spec.d = value;
    } else if (key == "kstar") {
      spec.kstar = value;
    } else if (key == "k") {
      spec.k = value;
      have_k = true;
    } else {
      throw InvalidInput("--hypercube: unknown key '" + key + "'");
    }
  }
  if (!have_k) spec.k = std::min<Eigen::Index>(spec.kstar, spec.d);
  return spec;
}

RunOutcome run_solver(const PrwInstance& inst, const SolverSettings& s,
                      std::uint64_t init_seed) {
  RunOutcome out;
  json rep;
  rep["solver"] = s.solver;
  rep["n"] = inst.n();
  rep["m"] = inst.m();
  rep["d"] = inst.d();
  rep["k"] = inst.k();
  rep["init_seed"] = init_seed;
  const auto t0 = std::chrono::steady_clock::now();
  StiefelPoint u;
  if (s.solver == "realm") {
    RealmConfig cfg;
    cfg.eta1 = s.eta.value_or(1.0);
    cfg.eta_min = s.eta_min;
    cfg.gamma_w = s.gamma_w;
    cfg.gamma_eta = s.gamma_eta;
    cfg.gamma_eps = s.gamma_eps;
    if (s.theta) cfg.exp_theta_scale = cfg.log_theta_scale = *s.theta;
    if (s.tau) cfg.irbbs.tau0 = *s.tau;
    cfg.keep_traces = s.keep_traces;
    const RealmResult r = realm_solve(inst, cfg, init_seed);
    out.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    out.prw = r.prw_value;
    out.converged = r.converged;
    out.stop_reason = r.stop_reason;
    out.iterations = r.iterations;
    out.multiplier_updates = r.multiplier_updates;
    out.n_grad = r.n_grad;
    out.n_sinkhorn_exp = r.n_sinkhorn_exp;
    out.n_sinkhorn_log = r.n_sinkhorn_log;
    out.e1 = r.e1;
    out.e2 = r.e2;
    out.certificate = r.certificate;
    u = r.x.u;
    rep["eta_min"] = cfg.eta_min;
    rep["gamma_w"] = cfg.gamma_w;
    rep["final_eta"] = r.eta;
    rep["w_norm"] = r.w_norm;
    rep["history"] = report::history_json(r.history);
    if (s.keep_traces) {
      json tr = json::array();
      for (const auto& t : r.traces) tr.push_back(report::trace_json(t));
      rep["traces"] = std::move(tr);
    }
  } else {
    const double eta = s.eta.value_or(1.0);
    const MultiplierState ones = MultiplierState::ones(inst.n(), inst.m());
    IrbbsConfig cfg;
    cfg.eps2 = 1e-6 * inst.marginal_inf();
    cfg.eps1 = 2.0 * inst.cost_inf() * cfg.eps2;
    cfg.mode = s.mode == "log" ? SinkhornMode::kLog : SinkhornMode::kExp;
    if (s.theta) cfg.theta_scale = *s.theta;
    if (s.solver == "fixed") {
      cfg.fixed_step = s.tau.value_or(1e-3);
    } else if (s.tau) {
      cfg.tau0 = *s.tau;
    }
    cfg.record_trace = s.keep_traces;
    const DualIterate x0 = initial_point(inst, ones, eta, init_seed);
    IrbbsResult r = irbbs_solve(inst, ones, eta, x0, cfg);
    out.certificate = certify(inst, ones, eta, r.x);
    out.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    out.prw = out.certificate.primal;
    out.converged = r.converged;
    out.stop_reason = r.converged ? "tolerance" : "max_outer";
    out.iterations = static_cast<int>(r.iterations);
    out.n_grad = r.n_grad;
    out.n_sinkhorn_exp = r.n_sinkhorn_exp;
    out.n_sinkhorn_log = r.n_sinkhorn_log;
    out.e1 = r.e1;
    out.e2 = r.x.e2();
    u = r.x.u;
    rep["eta"] = eta;
    rep["backtracks"] = r.backtracks;
    rep["forced_steps"] = r.forced_steps;
    if (s.keep_traces) rep["trace"] = report::trace_json(r.trace);
  }
  const PrimalValue pv = prw_primal(inst, u);
  out.prw_p = pv.value;
  out.prw_p_gap = pv.gap;
  out.prw_p_exact = pv.exact;

  rep["converged"] = out.converged;
  rep["stop_reason"] = out.stop_reason;
  rep["prw"] = out.prw;
  rep["prw_p"] = out.prw_p;
  rep["prw_p_exact"] = out.prw_p_exact;
  rep["prw_p_gap"] = out.prw_p_gap;
  rep["iterations"] = out.iterations;
  rep["multiplier_updates"] = out.multiplier_updates;
  rep["n_grad"] = out.n_grad;
  rep["n_sinkhorn_exp"] = out.n_sinkhorn_exp;
  rep["n_sinkhorn_log"] = out.n_sinkhorn_log;
  rep["e1"] = out.e1;
  rep["e2"] = out.e2;
  rep["certificate"] = report::certificate_json(out.certificate);
  rep["U"] = report::matrix_json(u.matrix());
  out.report = std::move(rep);
  return out;
}

namespace {

int cmd_gen(const InstanceSource& src, std::uint64_t seed,
            const std::string& dir, std::ostream& out) {
  if (src.hypercube.empty()) throw InvalidInput("gen needs --hypercube");
  const RunSeeds seeds = run_seeds(seed, 0, 0, 0);
  const PrwInstance inst =
      fragmented_hypercube(parse_hypercube(src.hypercube), seeds.instance);
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  write_points_csv((base / "X.csv").string(), inst.x());
  write_points_csv((base / "Y.csv").string(), inst.y());
  write_weights_csv((base / "r.csv").string(), inst.r());
  write_weights_csv((base / "c.csv").string(), inst.c());
  out << "wrote " << inst.n() << " + " << inst.m() << " points in R^"
      << inst.d() << " to " << dir << "\n";
  return 0;
}

int cmd_solve(const InstanceSource& src, const SolverSettings& s,
              Eigen::Index k, std::uint64_t seed, const std::string& trace,
              const std::string& csv, std::ostream& out, std::ostream& err) {
  const RunSeeds seeds = run_seeds(seed, 0, 0, 0);
  const PrwInstance inst = build_instance(src, k, seeds.instance);
  SolverSettings settings = s;
  settings.keep_traces = !trace.empty();
  RunOutcome r = run_solver(inst, settings, seeds.init);
  if (!trace.empty()) {
    std::ofstream f(trace);
    if (!f) throw InvalidInput(trace + ": cannot write");
    f << r.report.dump(2) << "\n";
    r.report.erase("traces");
    r.report.erase("trace");
  }
  r.report.erase("history");
  if (!csv.empty()) {
    std::ofstream f(csv);
    if (!f) throw InvalidInput(csv + ": cannot write");
    f << "prw,prw_p,converged,multiplier_updates,iterations,n_grad,"
         "n_sinkhorn_exp,n_sinkhorn_log\n"
      << fmt(r.prw) << ',' << fmt(r.prw_p) << ',' << r.converged << ','
      << r.multiplier_updates << ',' << r.iterations << ',' << r.n_grad << ','
      << r.n_sinkhorn_exp << ',' << r.n_sinkhorn_log << "\n";
  }
  out << r.report.dump(2) << "\n";
  err << "solve: " << r.seconds << " s, kernels "
      << kernels::backend_name(kernels::active_backend()) << "\n";
  return r.converged ? 0 : 1;
}

struct BenchRun {
  std::size_t cell = 0;
  std::size_t config = 0;
  int instance = 0;
  int init = 0;
  RunSeeds seeds;
  RunOutcome outcome;
};

int cmd_bench(const std::vector<std::string>& grid, Eigen::Index kstar,
              Eigen::Index k, int instances, int inits,
              const std::vector<std::string>& config_text,
              const SolverSettings& s, std::uint64_t seed, int jobs,
              const std::string& csv, std::ostream& out, std::ostream& err) {
  std::vector<HypercubeSpec> cells;
  for (const auto& g : grid) {
    const auto x = g.find('x');
    if (x == std::string::npos) throw InvalidInput("--grid expects NxD");
    HypercubeSpec spec;
    try {
      spec.n = std::stoll(g.substr(0, x));
      spec.d = std::stoll(g.substr(x + 1));
    } catch (const std::exception&) {
      throw InvalidInput("--grid expects NxD, got '" + g + "'");
    }
    spec.kstar = kstar;
    spec.k = k > 0 ? k : kstar;
    cells.push_back(spec);
  }
  std::vector<BenchConfig> configs;
  for (const auto& c : config_text) {
    const auto colon = c.find(':');
    if (colon == std::string::npos) {
      throw InvalidInput("--config expects eta_min:gamma_w");
    }
    BenchConfig bc;
    bc.eta_min = std::stod(c.substr(0, colon));
    bc.gamma_w = std::stod(c.substr(colon + 1));
    bc.label = c;
    configs.push_back(bc);
  }
  if (configs.empty()) {
    configs.push_back({s.eta_min, s.gamma_w,
                       fmt(s.eta_min, 6) + ":" + fmt(s.gamma_w, 6)});
  }

  std::vector<BenchRun> runs;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t f = 0; f < configs.size(); ++f) {
      for (int i = 0; i < instances; ++i) {
        for (int j = 0; j < inits; ++j) {
          BenchRun br;
          br.cell = c;
          br.config = f;
          br.instance = i;
          br.init = j;
          br.seeds = run_seeds(seed, c, static_cast<std::uint64_t>(i),
                               static_cast<std::uint64_t>(j));
          runs.push_back(br);
        }
      }
    }
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(runs.size());
  auto worker = [&]() {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= runs.size()) return;
      BenchRun& br = runs[idx];
      try {
        const PrwInstance inst =
            fragmented_hypercube(cells[br.cell], br.seeds.instance);
        SolverSettings rs = s;
        rs.eta_min = configs[br.config].eta_min;
        rs.gamma_w = configs[br.config].gamma_w;
        br.outcome = run_solver(inst, rs, br.seeds.init);
      } catch (const std::exception& e) {
        errors[idx] = e.what();
      }
    }
  };
  const int nthreads = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) throw SolverError("run " + std::to_string(i) +
                                              ": " + errors[i]);
  }

  std::ostringstream table;
  table << csv_header << "\n";
  for (const auto& br : runs) {
    const auto& o = br.outcome;
    const auto& cell = cells[br.cell];
    const auto& cf = configs[br.config];
    table << br.cell << ',' << cell.n << ',' << cell.d << ',' << cell.kstar
          << ',' << cf.label << ',' << fmt(cf.eta_min) << ','
          << fmt(cf.gamma_w) << ',' << br.instance << ',' << br.init << ','
          << br.seeds.instance << ',' << br.seeds.init << ',' << fmt(o.prw)
          << ',' << fmt(o.prw_p) << ',' << o.prw_p_exact << ','
          << o.multiplier_updates << ',' << o.iterations << ',' << o.n_grad
          << ',' << o.n_sinkhorn_exp << ',' << o.n_sinkhorn_log << ','
          << o.converged << ',' << o.stop_reason << ',' << fmt(o.e1) << ','
          << fmt(o.e2) << ',' << o.certificate.grad_ok() << ','
          << o.certificate.comp_ok() << ',' << fmt(o.seconds, 6) << "\n";
  }
  if (!csv.empty()) {
    std::ofstream f(csv);
    if (!f) throw InvalidInput(csv + ": cannot write");
    f << table.str();
  } else {
    out << table.str();
  }

  bool all_converged = true;
  std::ostream& summary = csv.empty() ? err : out;
  summary << "n,d,config,PRW_p,K1/K,nGrad,nSk_exp,nSk_log,converged,seconds\n";
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t f = 0; f < configs.size(); ++f) {
      double prw = 0, k1 = 0, kk = 0, ng = 0, se = 0, sl = 0, sec = 0;
      int conv = 0, cnt = 0;
      for (const auto& br : runs) {
        if (br.cell != c || br.config != f) continue;
        const auto& o = br.outcome;
        prw += o.prw_p;
        k1 += o.multiplier_updates;
        kk += o.iterations;
        ng += static_cast<double>(o.n_grad);
        se += static_cast<double>(o.n_sinkhorn_exp);
        sl += static_cast<double>(o.n_sinkhorn_log);
        sec += o.seconds;
        conv += o.converged ? 1 : 0;
        ++cnt;
      }
      if (cnt == 0) continue;
      all_converged = all_converged && conv == cnt;
      summary << std::fixed << std::setprecision(4) << cells[c].n << ','
              << cells[c].d << ',' << configs[f].label << ',' << prw / cnt
              << ',' << std::setprecision(1) << k1 / cnt << '/' << kk / cnt
              << ',' << std::setprecision(0) << ng / cnt << ',' << se / cnt
              << ',' << sl / cnt << ',' << conv << '/' << cnt << ','
              << std::setprecision(2) << sec << "\n"
              << std::defaultfloat;
    }
  }
  return all_converged ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Projection robust Wasserstein distance solver"};
  app.require_subcommand(1);

  InstanceSource src;
  SolverSettings settings;
  Eigen::Index k = 0;
  std::uint64_t seed = 1;
  std::string trace, csv, gen_dir = ".";
  int jobs = 1;
  std::vector<std::string> grid{"100x20"};
  std::vector<std::string> configs;
  Eigen::Index kstar = 2;
  int instances = 10, inits = 5;

  CLI::App* gen = app.add_subcommand("gen", "Write a hypercube instance");
  add_source_options(gen, src);
  gen->add_option("--seed", seed, "Master seed");
  gen->add_option("--out", gen_dir, "Output directory");

  CLI::App* solve = app.add_subcommand("solve", "Solve one instance");
  add_source_options(solve, src);
  add_solver_options(solve, settings);
  solve->add_option("--k", k, "Subspace dimension");
  solve->add_option("--seed", seed, "Master seed");
  solve->add_option("--trace", trace, "Write report and trace JSON");
  solve->add_option("--out", csv, "Write a one-row CSV summary");

  CLI::App* bench = app.add_subcommand("bench", "Hypercube sweep");
  add_solver_options(bench, settings);
  bench->add_option("--grid", grid, "Cells NxD (repeatable)");
  bench->add_option("--kstar", kstar, "Planted dimension");
  bench->add_option("--k", k, "Subspace dimension (default kstar)");
  bench->add_option("--instances", instances, "Instances per cell");
  bench->add_option("--inits", inits, "Initial points per instance");
  bench->add_option("--config", configs, "eta_min:gamma_w (repeatable)");
  bench->add_option("--seed", seed, "Master seed");
  bench->add_option("--jobs", jobs, "Worker threads");
  bench->add_option("--out", csv, "Write the per-run CSV table");

  std::vector<std::string> argv_store{"prw"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }
  try {
    if (*gen) return cmd_gen(src, seed, gen_dir, out);
    if (*solve) {
      return cmd_solve(src, settings, k, seed, trace, csv, out, err);
    }
    if (*bench) {
      return cmd_bench(grid, kstar, k, instances, inits, configs, settings,
                       seed, jobs, csv, out, err);
    }
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace prw::cli
