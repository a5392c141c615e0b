// Command-line surface for the phase-plane trajectory planner.
//
// Exit codes: 0 success, 1 config error, 2 planning failure.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "topp/config.hpp"
#include "topp/pipeline.hpp"

namespace fs = std::filesystem;
using namespace topp;

namespace {

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

int thread_budget() {
  if (const char* env = std::getenv("TOPP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

void write_trajectory_csv(const fs::path& file, const Trajectory& tr) {
  std::ofstream out(file);
  const int m = static_cast<int>(tr.act_vel.rows());
  out << "t,s,s_dot,s_ddot";
  for (int i = 1; i <= m; ++i) out << ",v_" << i;
  for (int i = 1; i <= m; ++i) out << ",a_" << i;
  out << "\n";
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    out << fmt(tr.t[k]) << ',' << fmt(tr.s[k]) << ',' << fmt(tr.sdot[k]) << ','
        << fmt(tr.sddot[k]);
    for (int i = 0; i < m; ++i) out << ',' << fmt(tr.act_vel(i, static_cast<int>(k)));
    for (int i = 0; i < m; ++i) out << ',' << fmt(tr.act_acc(i, static_cast<int>(k)));
    out << "\n";
  }
}

void write_metrics(const fs::path& file, double epsilon, const PlanOutput& out,
                   double precompute_ms) {
  std::ofstream js(file);
  js << "{\n"
     << "  \"epsilon\": " << fmt(epsilon) << ",\n"
     << "  \"traveling_time_s\": " << fmt(out.metric.traveling_time) << ",\n"
     << "  \"cruise_proportion\": " << fmt(out.metric.cruise_proportion) << ",\n"
     << "  \"comp_time_ms\": " << fmt(out.cni_ms + out.bio_ms) << ",\n"
     << "  \"precompute_ms\": " << fmt(precompute_ms) << ",\n"
     << "  \"cruise_proportion_definition\": \"path-length fraction on switch arcs\"\n"
     << "}\n";
}

std::vector<double> sweep_grid(const PlanConfig& cfg, const Precomputed& pre) {
  const auto& sw = *cfg.sweep;
  const int steps = static_cast<int>(sw[2]);
  if (steps < 2) throw config_error("sweep needs at least 2 grid points");
  const double floor = std::max(cfg.sdot0, cfg.sdote);
  double lo = sw[0], hi = sw[1];
  if (lo < floor || hi > pre.tables.max_mvc) {
    lo = std::max(lo, floor);
    hi = std::min(hi, pre.tables.max_mvc);
    std::cerr << "warning: sweep grid clipped to valid epsilon interval ["
              << fmt(lo) << ", " << fmt(hi) << "]\n";
  }
  std::vector<double> eps(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) eps[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
  return eps;
}

double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

double p95(std::vector<double> v) {
  const std::size_t idx = std::min(v.size() - 1, static_cast<std::size_t>(0.95 * v.size()));
  std::nth_element(v.begin(), v.begin() + static_cast<long>(idx), v.end());
  return v[idx];
}

int cmd_plan(const PlanConfig& cfg, const fs::path& out_dir, double epsilon) {
  const Problem prob = make_problem(cfg);
  const Precomputed pre = precompute(prob);
  const PlanOutput out = plan(prob, pre, epsilon);
  if (!out.ok) {
    std::cout << "failure reason=" << to_string(out.reason) << " s=" << fmt(out.failure_s)
              << "\n";
    return 2;
  }
  fs::create_directories(out_dir);
  write_trajectory_csv(out_dir / "trajectory.csv", out.trajectory);
  write_metrics(out_dir / "metrics.json", epsilon, out, pre.precompute_ms);
  std::cout << "traveling_time_s=" << fmt(out.metric.traveling_time)
            << " cruise_proportion=" << fmt(out.metric.cruise_proportion)
            << " comp_time_ms=" << fmt(out.cni_ms + out.bio_ms) << "\n";
  return 0;
}

int cmd_curves(const PlanConfig& cfg, const fs::path& out_dir, double epsilon) {
  const Problem prob = make_problem(cfg);
  const Precomputed pre = precompute(prob);
  const LimitCurves c = reconstruct(pre.tables, epsilon, std::max(cfg.sdot0, cfg.sdote));
  fs::create_directories(out_dir);
  std::ofstream out(out_dir / "curves.csv");
  out << "s,mvc_v,mvc_a,mvc,cvb,mvc_star\n";
  for (int k = 0; k <= c.grid_size(); ++k) {
    out << fmt(k * c.ds) << ',' << fmt(c.mvc_v[k]) << ',' << fmt(c.mvc_a[k]) << ','
        << fmt(c.mvc[k]) << ',' << fmt(c.cvb[k]) << ',' << fmt(c.mvc_star[k]) << "\n";
  }
  std::cout << "wrote " << (out_dir / "curves.csv").string() << "\n";
  return 0;
}

int cmd_sweep(const PlanConfig& cfg, const fs::path& out_dir) {
  if (!cfg.sweep) throw config_error("sweep subcommand needs a 'sweep' field");
  const Problem prob = make_problem(cfg);
  const Precomputed pre = precompute(prob);
  const std::vector<double> eps = sweep_grid(cfg, pre);

  struct Row {
    double eps;
    bool ok = false;
    std::string reason;
    double time = 0, comp_ms = 0, cruise = 0;
  };
  std::vector<Row> rows(eps.size());

  // Rows are independent planning queries; TOPP_THREADS caps parallelism.
  const int budget = thread_budget();
  std::vector<std::future<void>> tasks;
  std::atomic<std::size_t> next{0};
  for (int w = 0; w < std::min<int>(budget, static_cast<int>(eps.size())); ++w) {
    tasks.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next.fetch_add(1); i < eps.size(); i = next.fetch_add(1)) {
        Row& r = rows[i];
        r.eps = eps[i];
        const PlanOutput out = plan(prob, pre, eps[i]);
        if (!out.ok) {
          r.reason = to_string(out.reason);
          continue;
        }
        r.ok = true;
        r.time = out.metric.traveling_time;
        r.cruise = out.metric.cruise_proportion;
        r.comp_ms = out.cni_ms + out.bio_ms;
      }
    }));
  }
  for (auto& t : tasks) t.get();

  bool mono_time = true, mono_cruise = true;
  const double cell = pre.table.path_length / prob.grid / pre.table.path_length;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!rows[i].ok || !rows[i - 1].ok) continue;
    if (rows[i].time > rows[i - 1].time + 1e-6) mono_time = false;
    if (rows[i].cruise > rows[i - 1].cruise + cell) mono_cruise = false;
  }

  fs::create_directories(out_dir);
  std::ofstream out(out_dir / "sweep.csv");
  out << "epsilon,traveling_time,comp_time_ms,cruise_proportion,status\n";
  for (const Row& r : rows) {
    if (r.ok) {
      out << fmt(r.eps) << ',' << fmt(r.time) << ',' << fmt(r.comp_ms) << ','
          << fmt(r.cruise) << ",ok\n";
    } else {
      out << fmt(r.eps) << ",,,," << "failed:" << r.reason << "\n";
    }
  }
  out << "# traveling_time non-increasing: " << (mono_time ? "pass" : "fail") << "\n";
  out << "# cruise_proportion non-increasing: " << (mono_cruise ? "pass" : "fail") << "\n";
  std::cout << "wrote " << (out_dir / "sweep.csv").string() << " (traveling_time "
            << (mono_time ? "pass" : "fail") << ", cruise_proportion "
            << (mono_cruise ? "pass" : "fail") << ")\n";
  return 0;
}

int cmd_bench(const PlanConfig& cfg, const fs::path& out_dir, int reps) {
  const Problem prob = make_problem(cfg);
  const Precomputed pre = precompute(prob);
  std::vector<double> eps;
  if (cfg.sweep) {
    eps = sweep_grid(cfg, pre);
  } else if (cfg.epsilon) {
    eps = {*cfg.epsilon};
  } else {
    throw config_error("bench needs 'epsilon' or 'sweep'");
  }

  fs::create_directories(out_dir);
  std::ofstream out(out_dir / "bench.csv");
  out << "epsilon,normalized,precompute_med_ms,precompute_p95_ms,cni_med_ms,cni_p95_ms,"
         "bio_med_ms,bio_p95_ms\n";
  const double lo = eps.front(), hi = eps.back();
  for (double e : eps) {
    std::vector<double> tp, tc, tb;
    for (int r = 0; r < reps; ++r) {
      const PlanOutput o = plan(prob, pre, e);
      tp.push_back(o.reconstruct_ms);
      tc.push_back(o.cni_ms);
      tb.push_back(o.bio_ms);
    }
    const double norm = hi > lo ? (e - lo) / (hi - lo) : 0.0;
    out << fmt(e) << ',' << fmt(norm) << ',' << fmt(median(tp)) << ',' << fmt(p95(tp))
        << ',' << fmt(median(tc)) << ',' << fmt(p95(tc)) << ',' << fmt(median(tb)) << ','
        << fmt(p95(tb)) << "\n";
  }
  std::cout << "wrote " << (out_dir / "bench.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceleration-continuous path-constrained trajectory planner"};
  app.require_subcommand(1);

  std::string config_file, out_dir = "out";
  int grid_override = 0;
  double eps_override = 0.0;
  bool has_eps_override = false;
  std::uint64_t seed = 0;
  int bench_reps = 20;

  app.add_option("--config", config_file, "problem config file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--grid", grid_override, "override grid size N");
  auto* eps_opt = app.add_option("--epsilon", eps_override, "override epsilon");
  app.add_option("--seed", seed, "seed (outputs are deterministic per config+seed)");

  auto* plan_cmd = app.add_subcommand("plan", "plan one trajectory");
  auto* sweep_cmd = app.add_subcommand("sweep", "epsilon sweep table");
  auto* curves_cmd = app.add_subcommand("curves", "dump limit curves");
  auto* bench_cmd = app.add_subcommand("bench", "timing report");
  bench_cmd->add_option("--reps", bench_reps, "repetitions per epsilon");

  CLI11_PARSE(app, argc, argv);
  has_eps_override = eps_opt->count() > 0;

  try {
    PlanConfig cfg = load_config(config_file);
    if (grid_override > 0) cfg.grid = grid_override;
    if (has_eps_override) cfg.epsilon = eps_override;

    if (plan_cmd->parsed() || curves_cmd->parsed()) {
      if (!cfg.epsilon) throw config_error("missing required field 'epsilon'");
      return plan_cmd->parsed() ? cmd_plan(cfg, out_dir, *cfg.epsilon)
                                : cmd_curves(cfg, out_dir, *cfg.epsilon);
    }
    if (sweep_cmd->parsed()) return cmd_sweep(cfg, out_dir);
    return cmd_bench(cfg, out_dir, bench_reps);
  } catch (const zero_length_error& e) {
    std::cout << "failure reason=zero-length-path s=0\n";
    return 2;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
