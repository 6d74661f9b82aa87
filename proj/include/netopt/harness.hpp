// Experiment orchestration: algorithm dispatch by name, timed runs with
// trajectory CSV and summary JSON, accuracy curves against a long-run
// reference, two-link rate-region sweeps with optional multi-start, mean
// curves over channel realizations, and the invariant check suite used by
// the command-line tool.  Rates are reported in bits; CSV floats round-trip.

#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "netopt/algorithms.hpp"
#include "netopt/io.hpp"
#include "netopt/rates.hpp"
#include "netopt/scenario.hpp"

namespace netopt {

inline RunReport run_algorithm(const std::string& algo, const Network& net,
                               const RunOpts& opts = {}) {
  if (algo == "p") return algorithm_p(net, opts);
  if (algo == "p1") return algorithm_p1(net, opts);
  if (algo == "pt") return algorithm_pt(net, opts);
  if (algo == "pp") return algorithm_pp(net, opts);
  if (algo == "selfish") return selfish_waterfill(net, opts);
  throw std::invalid_argument("run_algorithm: unknown algorithm '" + algo +
                              "' (expected p, p1, pt, pp, or selfish)");
}

/// Trajectory rows as emitted by the optimizers, rates converted to bits.
inline std::string trajectory_csv(const RunReport& rep) {
  std::ostringstream out;
  out << "eff_iter,wsr_bits,sum_power,kkt_residual\n";
  for (const TrajectoryPoint& p : rep.trajectory)
    out << format_double(p.eff_iter) << ',' << format_double(nats_to_bits(p.wsr))
        << ',' << format_double(p.sum_power) << ',' << format_double(p.kkt)
        << '\n';
  return out.str();
}

inline Json run_summary(const std::string& algo, const RunReport& rep,
                        double wall_time_s) {
  Json j;
  j["algorithm"] = algo;
  j["converged"] = rep.converged;
  j["iterations"] = rep.iterations;
  j["restarts_used"] = rep.restarts_used;
  j["effective_iterations"] =
      rep.trajectory.empty() ? 0.0 : rep.trajectory.back().eff_iter;
  j["wsr_bits"] = nats_to_bits(rep.wsr);
  j["best_wsr_bits"] = nats_to_bits(rep.best_wsr);
  j["sum_power"] = trace_sum(rep.covs);
  j["kkt_residual"] = rep.kkt;
  j["mu"] = rep.mu;
  j["wall_time_s"] = wall_time_s;
  return j;
}

struct RunArtifacts {
  RunReport report;
  std::string trajectory;  // CSV text
  Json summary;
};

inline RunArtifacts run_network(const std::string& algo, const Network& net,
                                const RunOpts& opts = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  RunArtifacts out;
  out.report = run_algorithm(algo, net, opts);
  const std::chrono::duration<double> dt =
      std::chrono::steady_clock::now() - t0;
  out.trajectory = trajectory_csv(out.report);
  out.summary = run_summary(algo, out.report, dt.count());
  return out;
}

inline RunArtifacts run_scenario(const Scenario& sc, const std::string& algo,
                                 const RunOpts& opts = {}) {
  RunArtifacts out = run_network(algo, generate(sc), opts);
  out.summary["topology"] = sc.topology;
  out.summary["seed"] = sc.seed;
  return out;
}

/// Converged objective estimate for accuracy curves: the best final or
/// intermediate value of long tightly-stopped runs of both alternating
/// algorithms.
inline double reference_wsr(const Network& net, const RunOpts& opts = {}) {
  RunOpts ref = opts;
  ref.max_iter = std::max(4 * opts.max_iter, 800);
  ref.rel_tol = std::min(opts.rel_tol, 1e-12);
  ref.init_covs.clear();
  ref.init_duals.clear();
  double best = -std::numeric_limits<double>::infinity();
  for (const char* algo : {"pt", "pp"}) {
    RunReport rep = run_algorithm(algo, net, ref);
    best = std::max(best, std::max(rep.wsr, rep.best_wsr));
  }
  return best;
}

/// Gap-to-maximum curve (suitable for log-scale plots): wsr_max is the
/// larger of the supplied/computed reference and the run's own best value,
/// so the gap is nonnegative and reaches zero when the run wins.
inline std::string accuracy_curve_csv(
    const Network& net, const std::string& algo, const RunOpts& opts = {},
    double reference_nats = std::numeric_limits<double>::quiet_NaN()) {
  RunReport rep = run_algorithm(algo, net, opts);
  double wsr_max =
      std::isfinite(reference_nats) ? reference_nats : reference_wsr(net, opts);
  for (const TrajectoryPoint& p : rep.trajectory)
    wsr_max = std::max(wsr_max, p.wsr);
  std::ostringstream out;
  out << "eff_iter,wsr_gap_bits\n";
  for (const TrajectoryPoint& p : rep.trajectory)
    out << format_double(p.eff_iter) << ','
        << format_double(nats_to_bits(std::max(0.0, wsr_max - p.wsr))) << '\n';
  return out.str();
}

/// Mean weighted sum-rate over several runs of the same algorithm at matched
/// effective iterations; runs that stopped early hold their final value.
inline std::string mean_trajectory_csv(const std::vector<RunReport>& runs) {
  std::ostringstream out;
  out << "eff_iter,wsr_bits_mean\n";
  const RunReport* longest = nullptr;
  for (const RunReport& r : runs)
    if (!r.trajectory.empty() &&
        (!longest || r.trajectory.size() > longest->trajectory.size()))
      longest = &r;
  if (!longest) return out.str();
  for (std::size_t i = 0; i < longest->trajectory.size(); ++i) {
    double sum = 0.0;
    for (const RunReport& r : runs) {
      if (r.trajectory.empty()) continue;
      sum += i < r.trajectory.size() ? r.trajectory[i].wsr
                                     : r.trajectory.back().wsr;
    }
    out << format_double(longest->trajectory[i].eff_iter) << ','
        << format_double(nats_to_bits(sum / static_cast<double>(runs.size())))
        << '\n';
  }
  return out.str();
}

struct RegionPoint {
  double mu = 0.0;
  double r1_bits = 0.0;
  double r2_bits = 0.0;
};

/// Two-link rate-region sweep: for each mu the links are weighted (mu, 1-mu)
/// and the best of `starts` runs is kept (start 0 uses the algorithm's
/// default initialization, later starts are seeded random points at full
/// power).  Cancellation orders inside pseudo groups follow the weights, so
/// e.g. a two-user multiaccess network flips its decode order at mu = 1/2.
inline std::vector<RegionPoint> rate_region_sweep(
    const Network& base, const std::string& algo,
    const std::vector<double>& mu_grid, const RunOpts& opts = {},
    int starts = 1) {
  if (base.L != 2)
    throw std::invalid_argument("rate_region_sweep: base must have 2 links");
  std::vector<RegionPoint> out;
  out.reserve(mu_grid.size());
  for (double mu : mu_grid) {
    Network net = base;
    net.weights = {mu, 1.0 - mu};
    apply_orders(net);
    RunReport best;
    bool have = false;
    for (int s = 0; s < std::max(1, starts); ++s) {
      RunOpts o = opts;
      if (s > 0) {
        o.init_covs = detail::random_restart(net, opts.seed, 1000 + s);
        for (CMat& c : o.init_covs) c *= 2.0;  // restart draws use half power
        o.init_duals.clear();
      }
      RunReport rep = run_algorithm(algo, net, o);
      if (!have || rep.wsr > best.wsr) {
        best = std::move(rep);
        have = true;
      }
    }
    std::vector<double> rates = all_rates_nats(net, best.covs);
    out.push_back({mu, nats_to_bits(rates[0]), nats_to_bits(rates[1])});
  }
  return out;
}

inline std::string region_csv(const std::vector<RegionPoint>& points) {
  std::ostringstream out;
  out << "mu,r1_bits,r2_bits\n";
  for (const RegionPoint& p : points)
    out << format_double(p.mu) << ',' << format_double(p.r1_bits) << ','
        << format_double(p.r2_bits) << '\n';
  return out.str();
}

struct CheckItem {
  std::string name;
  bool pass = false;
  double value = 0.0;  // measured residual or margin
  double bound = 0.0;  // tolerance it is compared against
};

struct CheckReport {
  bool ok = true;
  std::vector<CheckItem> items;
};

/// Duality invariant suite on one network/covariance pair: generalized power
/// conservation, per-link equivalent-power equality, reverse-rate dominance,
/// stream-rate consistency, and the power budget.
inline CheckReport check_covariances(const Network& net,
                                     const std::vector<CMat>& covs) {
  CheckReport rep;
  auto add = [&](const std::string& name, double value, double bound,
                 bool pass) {
    rep.items.push_back({name, pass, value, bound});
    rep.ok = rep.ok && pass;
  };
  TransformReport tr = covariance_transform(net, covs);
  {
    const double scale = std::max(1.0, std::abs(tr.power_in));
    const double v = std::abs(tr.power_in - tr.power_out) / scale;
    add("power_conservation", v, 1e-9, v <= 1e-9);
  }
  {
    double v = 0.0;
    for (const auto& [q, qhat] : tr.equiv_power)
      v = std::max(v, std::abs(q - qhat) / std::max(1.0, std::abs(q)));
    add("equivalent_power_per_link", v, 1e-8, v <= 1e-8);
  }
  {
    double margin = std::numeric_limits<double>::infinity();
    for (int l = 0; l < net.L; ++l)
      margin = std::min(margin, tr.reverse_rates[l] - tr.forward_rates[l]);
    add("reverse_rate_dominance", margin, -1e-9, margin >= -1e-9);
  }
  {
    double v = 0.0;
    for (int l = 0; l < net.L; ++l) {
      double sum = 0.0;
      for (double s : tr.streams.link[l].sinr) sum += std::log1p(s);
      v = std::max(v, std::abs(sum - tr.forward_rates[l]));
    }
    add("stream_rate_sum", v, 1e-9, v <= 1e-9);
  }
  {
    double spent = 0.0;
    for (int l = 0; l < net.L; ++l)
      spent += (covs[l] * net.constraint(l)).trace().real();
    add("power_budget", spent, net.power + 1e-9, spent <= net.power + 1e-9);
  }
  return rep;
}

inline Json check_to_json(const CheckReport& rep) {
  Json j;
  j["ok"] = rep.ok;
  Json items = Json::array();
  for (const CheckItem& it : rep.items) {
    Json e;
    e["name"] = it.name;
    e["pass"] = it.pass;
    e["value"] = it.value;
    e["bound"] = it.bound;
    items.push_back(std::move(e));
  }
  j["checks"] = std::move(items);
  return j;
}

}  // namespace netopt
