#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "polysplit/a3check.hpp"
#include "polysplit/admm.hpp"
#include "polysplit/errors.hpp"
#include "polysplit/json_io.hpp"
#include "polysplit/mpc.hpp"
#include "polysplit/operator.hpp"
#include "polysplit/oracle.hpp"
#include "polysplit/problem.hpp"
#include "polysplit/solver.hpp"

namespace polysplit::cli {
namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kNoConverge = 2;
constexpr int kInputError = 3;
constexpr int kInfeasible = 4;

// 53-bit mantissa mapping, so studies replicate from the documented
// generator (mt19937_64) in any language
double uniform(std::mt19937_64& gen, double lo, double hi) {
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt_ms(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

json vec_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void emit(const ExperimentSpec& spec, const std::string& text) {
  if (spec.out.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(spec.out, std::ios::binary);
  if (!f) throw ParseError("cannot open output path: " + spec.out);
  f << text;
}

// run f(0..n-1) on a bounded pool; results must be written by index so the
// aggregation order never depends on scheduling
void parallel_for(int n, int jobs, const std::function<void(int)>& f) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mtx;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          f(i);
        } catch (...) {
          std::scoped_lock lk(err_mtx);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

int default_jobs(const ExperimentSpec& spec, int fallback) {
  if (spec.jobs > 0) return spec.jobs;
  if (fallback > 0) return fallback;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

struct Input {
  std::optional<PwaSystem> sys;
  ConsensusProblem prob;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot read input: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Input load(const ExperimentSpec& spec, bool need_system) {
  Input in;
  const std::string text = read_file(spec.input);
  const int N = spec.horizons.empty() ? 0 : spec.horizons.front();
  if (detect_input_kind(text) == InputKind::PwaSystem) {
    in.sys = parse_pwa_json(text);
    in.prob = build_consensus(*in.sys, N);
  } else {
    if (need_system)
      throw ParseError(spec.command + " needs a piecewise-affine system input, not a bare problem");
    if (N > 0) throw ParseError("--N applies to system inputs only");
    in.prob = parse_problem_json(text);
    if (!in.prob.validated) validate(in.prob);
  }
  return in;
}

VectorXd theta_of(const ExperimentSpec& spec, const ConsensusProblem& prob) {
  if (spec.theta.empty()) return VectorXd::Ones(prob.p);
  if (static_cast<Eigen::Index>(spec.theta.size()) != prob.p)
    throw ParseError("--theta needs " + std::to_string(prob.p) + " entries, got " +
                     std::to_string(spec.theta.size()));
  VectorXd th(prob.p);
  for (Eigen::Index i = 0; i < prob.p; ++i) th(i) = spec.theta[static_cast<std::size_t>(i)];
  return th;
}

SolverConfig solver_cfg(const ExperimentSpec& spec) {
  SolverConfig c;
  c.gamma = spec.gamma;
  c.eps_tol = spec.eps;
  c.max_iter = spec.max_iter;
  return c;
}

AdmmConfig admm_cfg(const ExperimentSpec& spec) {
  AdmmConfig c;
  c.rho = spec.rho;
  c.eps_tol = spec.eps;
  c.max_iter = spec.max_iter;
  return c;
}

bool converged(SolveStatus s) {
  return s == SolveStatus::Converged || s == SolveStatus::TrivialGlobal;
}

int exit_for(SolveStatus s) {
  if (converged(s)) return kOk;
  if (s == SolveStatus::StageInfeasible) return kInfeasible;
  return kNoConverge;
}

int run_oracle(const ExperimentSpec& spec, const ConsensusProblem& prob, const VectorXd& th) {
  FixedStages fs = instantiate_stages(prob, th);
  const auto t0 = std::chrono::steady_clock::now();
  OracleResult r = global_solve(prob, fs, spec.cap);
  const double ms = ms_since(t0);
  json out{{"method", "oracle"},
           {"status", r.feasible ? "Optimal" : "Infeasible"},
           {"qps_solved", r.solved},
           {"runtime_ms", ms}};
  if (r.feasible) {
    out["objective"] = r.objective;
    out["assignment"] = r.assignment;
    out["z"] = vec_json(r.z);
  }
  emit(spec, out.dump(2));
  return r.feasible ? kOk : kInfeasible;
}

int cmd_solve(const ExperimentSpec& spec) {
  Input in = load(spec, false);
  const VectorXd th = theta_of(spec, in.prob);
  if (spec.method == "oracle") return run_oracle(spec, in.prob, th);

  FixedStages fs = instantiate_stages(in.prob, th);
  const double weight = spec.method == "admm" ? spec.rho : spec.xi;
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult r;
  if (spec.method == "admm") {
    r = solve_admm(in.prob, fs, admm_cfg(spec));
  } else {
    OperatorData op = build_operator(in.prob, spec.xi);
    r = solve(in.prob, fs, op, solver_cfg(spec));
  }
  const double ms = ms_since(t0);

  json residuals{{"iterate", r.residual}};
  if (converged(r.status)) {
    KktResidual kkt = verify_proximal_kkt(in.prob, fs, r.z, r.lambda, weight);
    residuals["stationarity"] = kkt.stationarity;
    residuals["projection"] = kkt.projection;
  }
  json out{{"method", spec.method},
           {"status", to_string(r.status)},
           {"objective", r.objective},
           {"iterations", r.iterations},
           {"runtime_ms", ms},
           {"residuals", residuals}};
  if (r.status == SolveStatus::StageInfeasible) out["infeasible_stage"] = r.infeasible_stage;
  emit(spec, out.dump(2));
  return exit_for(r.status);
}

Controller controller_of(const std::string& method) {
  if (method == "admm") return Controller::Admm;
  if (method == "oracle") return Controller::Oracle;
  return Controller::FixedPoint;
}

int cmd_mpc_sim(const ExperimentSpec& spec) {
  Input in = load(spec, true);
  const VectorXd th = theta_of(spec, in.prob);

  ClosedLoopConfig cfg;
  cfg.steps = spec.steps;
  cfg.xi = spec.xi;
  cfg.solver = solver_cfg(spec);
  cfg.admm = admm_cfg(spec);
  cfg.oracle_cap = spec.cap;
  Trajectory tr = closed_loop(*in.sys, in.prob, controller_of(spec.method), th, cfg);

  const Eigen::Index nx = in.sys->n_x;
  const Eigen::Index nu = in.sys->n_u;
  std::ostringstream csv;
  csv << "step";
  for (Eigen::Index j = 0; j < nx; ++j) csv << ",x" << j + 1;
  for (Eigen::Index j = 0; j < nu; ++j) csv << ",u" << j + 1;
  csv << ",status,iterations,objective\n";
  for (std::size_t k = 0; k < tr.u.size(); ++k) {
    csv << k;
    for (Eigen::Index j = 0; j < nx; ++j) csv << ',' << fmt(tr.x[k](j));
    for (Eigen::Index j = 0; j < nu; ++j) csv << ',' << fmt(tr.u[k](j));
    csv << ',' << to_string(tr.status[k]) << ',' << tr.iterations[k] << ','
        << fmt(tr.objective[k]) << '\n';
  }
  if (tr.x.size() == tr.u.size() + 1) {
    // terminal state row; no input or solve belongs to it
    csv << tr.u.size();
    for (Eigen::Index j = 0; j < nx; ++j) csv << ',' << fmt(tr.x.back()(j));
    for (Eigen::Index j = 0; j < nu; ++j) csv << ',';
    csv << ",,,\n";
  }
  emit(spec, csv.str());

  int code = tr.completed ? kOk : kNoConverge;
  for (SolveStatus s : tr.status) {
    if (s == SolveStatus::StageInfeasible) return kInfeasible;
    if (!converged(s)) code = kNoConverge;
  }
  return code;
}

int cmd_multistart(const ExperimentSpec& spec) {
  Input in = load(spec, false);
  const VectorXd th = theta_of(spec, in.prob);
  FixedStages fs = instantiate_stages(in.prob, th);
  OperatorData op = build_operator(in.prob, spec.xi);

  const Eigen::Index n = in.prob.n;
  const int K = spec.K;
  if (K <= 0) throw ParseError("--K must be positive");

  // all draws come from one sequential stream: per run, n state coordinates
  // on [-1, 1], then n multiplier coordinates on [-10, 10]
  std::mt19937_64 gen(spec.seed);
  std::vector<VectorXd> s0(static_cast<std::size_t>(K));
  for (int i = 0; i < K; ++i) {
    VectorXd z0(n), l0(n);
    for (Eigen::Index j = 0; j < n; ++j) z0(j) = uniform(gen, -1.0, 1.0);
    for (Eigen::Index j = 0; j < n; ++j) l0(j) = uniform(gen, -10.0, 10.0);
    s0[static_cast<std::size_t>(i)] = z0 - l0 / spec.xi;
  }

  struct Run {
    bool conv = false;
    bool kkt = false;
    double objective = 0.0;
    int iterations = 0;
  };
  std::vector<Run> runs(static_cast<std::size_t>(K));
  const double st_tol = 1e-6 * (1.0 + in.prob.h.norm());
  const double pr_tol = std::max(1e-6, 10.0 * spec.eps);
  parallel_for(K, default_jobs(spec, 0), [&](int i) {
    SolverConfig c = solver_cfg(spec);
    c.s0 = s0[static_cast<std::size_t>(i)];
    SolveResult r = solve(in.prob, fs, op, c);
    Run& row = runs[static_cast<std::size_t>(i)];
    row.conv = converged(r.status);
    row.objective = r.objective;
    row.iterations = r.iterations;
    if (row.conv) {
      KktResidual kkt = verify_proximal_kkt(in.prob, fs, r.z, r.lambda, spec.xi);
      row.kkt = kkt.stationarity <= st_tol && kkt.projection <= pr_tol;
    }
  });

  int conv = 0, kkt_pass = 0;
  std::vector<double> objs;
  objs.reserve(static_cast<std::size_t>(K));
  for (const Run& r : runs) {
    if (!r.conv) continue;
    ++conv;
    kkt_pass += r.kkt ? 1 : 0;
    objs.push_back(r.objective);
  }

  // fixed-width histogram over the converged objectives
  constexpr int kBins = 50;
  json bins = json::array();
  std::string csv = "bin_lo,bin_hi,count\n";
  if (!objs.empty()) {
    const auto [lo_it, hi_it] = std::minmax_element(objs.begin(), objs.end());
    const double lo = *lo_it, hi = *hi_it;
    const double width = hi > lo ? (hi - lo) / kBins : 1.0;
    std::vector<int> count(kBins, 0);
    for (double v : objs) {
      int b = hi > lo ? static_cast<int>((v - lo) / width) : 0;
      b = std::clamp(b, 0, kBins - 1);
      ++count[static_cast<std::size_t>(b)];
    }
    for (int b = 0; b < kBins; ++b) {
      const double bl = lo + b * width, bh = lo + (b + 1) * width;
      bins.push_back(json{{"lo", bl}, {"hi", bh}, {"count", count[static_cast<std::size_t>(b)]}});
      csv += fmt(bl);
      csv += ',';
      csv += fmt(bh);
      csv += ',';
      csv += std::to_string(count[static_cast<std::size_t>(b)]);
      csv += '\n';
    }
  }

  json out{{"runs", K},
           {"converged", conv},
           {"convergence_rate", K > 0 ? static_cast<double>(conv) / K : 0.0},
           {"kkt_pass_rate", conv > 0 ? static_cast<double>(kkt_pass) / conv : 0.0},
           {"seed", spec.seed},
           {"xi", spec.xi},
           {"eps", spec.eps},
           {"histogram", bins}};
  if (!objs.empty()) {
    out["objective_min"] = *std::min_element(objs.begin(), objs.end());
    out["objective_max"] = *std::max_element(objs.begin(), objs.end());
  }
  std::cout << out.dump(2) << "\n";
  if (!spec.out.empty()) emit(spec, csv);
  return conv > 0 ? kOk : kNoConverge;
}

int cmd_bench(const ExperimentSpec& spec) {
  Input in = load(spec, true);
  std::vector<int> horizons = spec.horizons;
  if (horizons.empty()) horizons.push_back(in.sys->N);

  struct Row {
    int N = 0;
    Eigen::Index n = 0;
    std::string status;
    int iterations = 0;
    double build_ms = 0.0;
    double solve_ms = 0.0;
    double objective = 0.0;
    int code = kOk;
  };
  const int nN = static_cast<int>(horizons.size());
  std::vector<Row> rows(static_cast<std::size_t>(nN));
  // timing fidelity beats throughput here, hence a serial default
  parallel_for(nN, default_jobs(spec, 1), [&](int i) {
    Row& row = rows[static_cast<std::size_t>(i)];
    row.N = horizons[static_cast<std::size_t>(i)];
    ConsensusProblem prob = build_consensus(*in.sys, row.N);
    row.n = prob.n;
    const VectorXd th = theta_of(spec, prob);
    FixedStages fs = instantiate_stages(prob, th);
    if (spec.method == "oracle") {
      const auto t0 = std::chrono::steady_clock::now();
      OracleResult r = global_solve(prob, fs, spec.cap);
      row.solve_ms = ms_since(t0);
      row.status = r.feasible ? "Optimal" : "Infeasible";
      row.objective = r.objective;
      row.code = r.feasible ? kOk : kInfeasible;
    } else if (spec.method == "admm") {
      const auto t0 = std::chrono::steady_clock::now();
      SolveResult r = solve_admm(prob, fs, admm_cfg(spec));
      row.solve_ms = ms_since(t0);
      row.status = to_string(r.status);
      row.iterations = r.iterations;
      row.objective = r.objective;
      row.code = exit_for(r.status);
    } else {
      const auto t0 = std::chrono::steady_clock::now();
      OperatorData op = build_operator(prob, spec.xi);
      row.build_ms = ms_since(t0);
      const auto t1 = std::chrono::steady_clock::now();
      SolveResult r = solve(prob, fs, op, solver_cfg(spec));
      row.solve_ms = ms_since(t1);
      row.status = to_string(r.status);
      row.iterations = r.iterations;
      row.objective = r.objective;
      row.code = exit_for(r.status);
    }
  });

  std::ostringstream csv;
  csv << "method,N,n,status,iterations,build_ms,solve_ms,objective\n";
  int code = kOk;
  for (const Row& row : rows) {
    csv << spec.method << ',' << row.N << ',' << row.n << ',' << row.status << ','
        << row.iterations << ',' << fmt_ms(row.build_ms) << ',' << fmt_ms(row.solve_ms) << ','
        << fmt(row.objective) << '\n';
    if (row.code == kInfeasible) return kInfeasible;
    if (row.code != kOk) code = row.code;
  }
  emit(spec, csv.str());
  return code;
}

int cmd_oracle(const ExperimentSpec& spec) {
  Input in = load(spec, false);
  return run_oracle(spec, in.prob, theta_of(spec, in.prob));
}

int cmd_check_a3(const ExperimentSpec& spec) {
  Input in = load(spec, false);
  A3Config cfg;
  cfg.max_structures = spec.max_structures;
  const auto t0 = std::chrono::steady_clock::now();
  A3Report rep = check_a3(in.prob, cfg);
  const double ms = ms_since(t0);

  json viols = json::array();
  for (const A3Violation& v : rep.violations) {
    viols.push_back(json{{"stage", v.stage},
                         {"components", v.structure.comps},
                         {"active_rows", v.structure.rows},
                         {"z", vec_json(v.z)},
                         {"theta", vec_json(v.theta)},
                         {"direction", vec_json(v.w)},
                         {"step", cfg.step},
                         {"escape_point", vec_json(VectorXd(v.z + cfg.step * v.w))}});
  }
  json out{{"verdict", rep.satisfied ? "satisfied" : "violated"},
           {"stages", in.prob.stages.size()},
           {"runtime_ms", ms},
           {"violations", viols}};
  emit(spec, out.dump(2));
  return rep.satisfied ? kOk : kNoConverge;
}

int cmd_compare(const ExperimentSpec& spec) {
  Input in = load(spec, false);
  const VectorXd th = theta_of(spec, in.prob);
  FixedStages fs = instantiate_stages(in.prob, th);

  const auto t0 = std::chrono::steady_clock::now();
  OracleResult oc = global_solve(in.prob, fs, spec.cap);
  const double oracle_ms = ms_since(t0);
  if (!oc.feasible) {
    std::cerr << "compare: instance infeasible at this parameter\n";
    return kInfeasible;
  }

  const auto t1 = std::chrono::steady_clock::now();
  OperatorData op = build_operator(in.prob, spec.xi);
  SolveResult fp = solve(in.prob, fs, op, solver_cfg(spec));
  const double fp_ms = ms_since(t1);
  const auto t2 = std::chrono::steady_clock::now();
  SolveResult ad = solve_admm(in.prob, fs, admm_cfg(spec));
  const double ad_ms = ms_since(t2);

  const auto rel = [&](double f) { return (f - oc.objective) / std::max(1.0, std::abs(oc.objective)); };
  std::ostringstream csv;
  csv << "method,status,iterations,runtime_ms,objective,rel_suboptimality\n";
  csv << "fixed_point," << to_string(fp.status) << ',' << fp.iterations << ',' << fmt_ms(fp_ms)
      << ',' << fmt(fp.objective) << ',' << fmt(rel(fp.objective)) << '\n';
  csv << "admm," << to_string(ad.status) << ',' << ad.iterations << ',' << fmt_ms(ad_ms) << ','
      << fmt(ad.objective) << ',' << fmt(rel(ad.objective)) << '\n';
  csv << "oracle,Optimal,0," << fmt_ms(oracle_ms) << ',' << fmt(oc.objective) << ",0\n";
  emit(spec, csv.str());

  if (!converged(fp.status) || !converged(ad.status)) return kNoConverge;
  return kOk;
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
  ExperimentSpec spec;
  CLI::App app{"operator-splitting toolkit for consensus-structured control"};
  app.require_subcommand(1);

  const auto add_common = [&spec](CLI::App* cmd) {
    cmd->add_option("--problem", spec.input, "problem or system JSON path")->required();
    cmd->add_option("--theta", spec.theta, "parameter values, comma separated (default: all ones)")
        ->delimiter(',');
    cmd->add_option("--N", spec.horizons, "horizon (bench accepts a comma-separated sweep)")
        ->delimiter(',');
    cmd->add_option("--xi", spec.xi, "proximal weight of the fixed-point operator");
    cmd->add_option("--gamma", spec.gamma, "relaxation step in (0, 1)");
    cmd->add_option("--eps", spec.eps, "termination tolerance");
    cmd->add_option("--max-iter", spec.max_iter, "iteration budget");
    cmd->add_option("--rho", spec.rho, "alternating-direction penalty");
    cmd->add_option("--seed", spec.seed, "64-bit generator seed");
    cmd->add_option("--jobs", spec.jobs, "worker pool size (0 = per-command default)");
    cmd->add_option("--cap", spec.cap, "exhaustive-enumeration budget");
    cmd->add_option("--out", spec.out, "artifact path (default: stdout)");
  };
  const auto add_method = [&spec](CLI::App* cmd) {
    cmd->add_option("--method", spec.method, "fixed_point | admm | oracle")
        ->check(CLI::IsMember({"fixed_point", "admm", "oracle"}));
  };

  CLI::App* solve_cmd = app.add_subcommand("solve", "one solve; JSON report on stdout");
  add_common(solve_cmd);
  add_method(solve_cmd);

  CLI::App* mpc_cmd = app.add_subcommand("mpc-sim", "closed loop; trajectory CSV");
  add_common(mpc_cmd);
  add_method(mpc_cmd);
  mpc_cmd->add_option("--steps", spec.steps, "closed-loop length");

  CLI::App* multi_cmd =
      app.add_subcommand("multistart", "random-start sweep; rate JSON plus histogram CSV");
  add_common(multi_cmd);
  multi_cmd->add_option("--K", spec.K, "number of random starts");

  CLI::App* bench_cmd = app.add_subcommand("bench", "horizon sweep; per-solve runtime CSV");
  add_common(bench_cmd);
  add_method(bench_cmd);

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "exhaustive global solve; JSON report");
  add_common(oracle_cmd);

  CLI::App* a3_cmd =
      app.add_subcommand("check-a3", "union-geometry regularity check; JSON verdict");
  add_common(a3_cmd);
  a3_cmd->add_option("--max-structures", spec.max_structures, "active-structure budget");

  CLI::App* cmp_cmd =
      app.add_subcommand("compare", "fixed-point vs admm vs oracle suboptimality table");
  add_common(cmp_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints help or the usage error itself
    return rc == 0 ? kOk : kInputError;
  }
  spec.command = app.get_subcommands().front()->get_name();

  try {
    if (spec.command == "solve") return cmd_solve(spec);
    if (spec.command == "mpc-sim") return cmd_mpc_sim(spec);
    if (spec.command == "multistart") return cmd_multistart(spec);
    if (spec.command == "bench") return cmd_bench(spec);
    if (spec.command == "oracle") return cmd_oracle(spec);
    if (spec.command == "check-a3") return cmd_check_a3(spec);
    if (spec.command == "compare") return cmd_compare(spec);
    std::cerr << "unknown command: " << spec.command << "\n";
    return kInputError;
  } catch (const NoActiveRegion& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace polysplit::cli
