// netopt: command-line front end for the optimization library.
//
//   netopt gen    — materialize a seeded scenario into a network JSON file
//   netopt run    — run an algorithm, emitting trajectory CSV + summary JSON
//   netopt sweep  — repeat a run over consecutive seeds
//   netopt check  — duality invariant suite on a network (+ covariance) file
//   netopt region — two-link rate-region sweep over a weight grid
//
// Exit codes: 0 success, 1 input/usage errors, 2 when a run (or any run of a
// sweep) did not converge — outputs are still written in that case.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <netopt/harness.hpp>

namespace {

using netopt::Json;
using netopt::Network;
using netopt::RunOpts;
using netopt::RunReport;
using netopt::Scenario;

struct ScenarioFlags {
  std::string fixture;
  Scenario sc;
  std::vector<int> nt{2};
  std::vector<int> nr{2};
  double gain_db = 0.0;
  double cross_db = 0.0;
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& sf) {
  cmd->add_option("--topology", sf.sc.topology,
                  "mac | bc | ifc | x | z | itree-fig3")
      ->default_val("ifc");
  cmd->add_option("--fixture", sf.fixture,
                  "named fixture phi-a..phi-d | fig3-a | fig3-b "
                  "(overrides --topology)");
  cmd->add_option("--users", sf.sc.users, "link count for mac/bc/ifc")
      ->default_val(2);
  cmd->add_option("--nt", sf.nt, "transmit antennas (one value or one per link)")
      ->expected(-1);
  cmd->add_option("--nr", sf.nr, "receive antennas (one value or one per link)")
      ->expected(-1);
  cmd->add_option("--gain-db", sf.gain_db, "direct gain in dB")->default_val(0.0);
  cmd->add_option("--cross-db", sf.cross_db, "cross gain in dB")
      ->default_val(0.0);
  cmd->add_option("--weights", sf.sc.weights, "fixed weights, one per link")
      ->expected(-1);
  cmd->add_option("--weight-rule", sf.sc.weight_rule,
                  "fixed | uniform (U(0.8,1.2))")
      ->default_val("fixed");
  cmd->add_option("--power-db", sf.sc.power_db, "total power in dB")
      ->default_val(10.0);
  cmd->add_option("--variant", sf.sc.variant, "itree-fig3 coupling: a | b")
      ->default_val("a");
}

Scenario build_scenario(const ScenarioFlags& sf, std::uint64_t seed) {
  Scenario sc = sf.fixture.empty() ? sf.sc : netopt::named_scenario(sf.fixture);
  if (!sf.fixture.empty()) {
    // Fixtures fix topology/coupling; tunable knobs still apply.
    sc.weight_rule = sf.sc.weight_rule;
    sc.weights = sf.sc.weights;
    sc.power_db = sf.sc.power_db;
    if (sf.sc.topology == "itree-fig3") sc.variant = sf.sc.variant;
  }
  sc.nt = sf.nt;
  sc.nr = sf.nr;
  sc.seed = seed;
  // Resolve the gain grid once the link count is known.
  Scenario probe = sc;
  probe.gains_db = Eigen::MatrixXd();
  Network shape = netopt::generate(probe);
  Eigen::MatrixXd g =
      Eigen::MatrixXd::Constant(shape.L, shape.L, sf.cross_db);
  g.diagonal().setConstant(sf.gain_db);
  sc.gains_db = g;
  return sc;
}

Json trajectory_json(const RunReport& rep) {
  Json arr = Json::array();
  for (const netopt::TrajectoryPoint& p : rep.trajectory) {
    Json e;
    e["eff_iter"] = p.eff_iter;
    e["wsr_bits"] = netopt::nats_to_bits(p.wsr);
    e["sum_power"] = p.sum_power;
    e["kkt_residual"] = p.kkt;
    arr.push_back(std::move(e));
  }
  Json j;
  j["trajectory"] = std::move(arr);
  return j;
}

void write_trajectory(const std::filesystem::path& dir, const std::string& stem,
                      const RunReport& rep, const std::string& format) {
  if (format == "json")
    netopt::write_text_atomic(dir / (stem + ".json"),
                              trajectory_json(rep).dump(2) + "\n");
  else
    netopt::write_text_atomic(dir / (stem + ".csv"),
                              netopt::trajectory_csv(rep));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmitter optimization for one-hop MIMO interference "
               "networks"};
  app.require_subcommand(1);
  int rc = 0;

  // Options shared by the running subcommands.
  std::string algo = "pt", out_dir = ".", format = "csv", net_file, covs_file;
  std::string out_file = "network.json";
  std::uint64_t seed = 0;
  int realizations = 1, seeds = 10, mu_points = 25, starts = 1;
  RunOpts opts;
  auto add_run_flags = [&](CLI::App* cmd, bool with_algo = true) {
    if (with_algo)
      cmd->add_option("--algo", algo, "p | p1 | pt | pp | selfish")
          ->default_val("pt");
    cmd->add_option("--max-iter", opts.max_iter, "iteration budget")
        ->default_val(200);
    cmd->add_option("--tol", opts.rel_tol, "relative objective-change stop")
        ->default_val(1e-8);
    cmd->add_option("--cov-tol", opts.cov_tol,
                    "additional relative covariance-step stop (0 = off)")
        ->default_val(0.0);
    cmd->add_option("--restarts", opts.restarts,
                    "extra attempts after numerical failure")
        ->default_val(3);
    cmd->add_option("--out-dir", out_dir, "output directory")->default_val(".");
    cmd->add_option("--format", format, "trajectory format: csv | json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->default_val("csv");
  };

  ScenarioFlags sf;
  CLI::App* gen = app.add_subcommand("gen", "emit a network file");
  add_scenario_flags(gen, sf);
  gen->add_option("--seed", seed, "scenario seed")->default_val(0);
  gen->add_option("--out", out_file, "output path")->default_val("network.json");
  gen->callback([&] {
    Network net = netopt::generate(build_scenario(sf, seed));
    netopt::write_text_atomic(out_file,
                              netopt::network_to_json(net).dump(2) + "\n");
    std::cout << "wrote " << out_file << " (" << net.L << " links)\n";
  });

  CLI::App* run = app.add_subcommand("run", "run one algorithm");
  add_scenario_flags(run, sf);
  run->add_option("--net", net_file, "network JSON file (instead of a scenario)");
  run->add_option("--seed", seed, "scenario seed")->default_val(0);
  run->add_option("--realizations", realizations,
                  "average over this many consecutive seeds")
      ->default_val(1);
  add_run_flags(run);
  run->callback([&] {
    opts.seed = seed;
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    if (!net_file.empty() && realizations > 1)
      throw CLI::ValidationError(
          "--realizations needs a scenario; a fixed --net file is "
          "deterministic");
    if (realizations <= 1) {
      netopt::RunArtifacts art;
      if (!net_file.empty()) {
        Network net =
            netopt::network_from_json(netopt::read_json_file(net_file));
        art = netopt::run_network(algo, net, opts);
      } else {
        art = netopt::run_scenario(build_scenario(sf, seed), algo, opts);
      }
      write_trajectory(dir, "trajectory", art.report, format);
      netopt::write_text_atomic(dir / "summary.json",
                                art.summary.dump(2) + "\n");
      if (!art.report.converged) rc = 2;
    } else {
      std::vector<RunReport> reports;
      Json summaries = Json::array();
      bool all_converged = true;
      for (int i = 0; i < realizations; ++i) {
        Scenario sc = build_scenario(sf, seed + static_cast<std::uint64_t>(i));
        opts.seed = sc.seed;
        netopt::RunArtifacts art = netopt::run_scenario(sc, algo, opts);
        write_trajectory(dir, "run_" + std::to_string(sc.seed), art.report,
                         format);
        all_converged = all_converged && art.report.converged;
        summaries.push_back(std::move(art.summary));
        reports.push_back(std::move(art.report));
      }
      netopt::write_text_atomic(dir / "mean.csv",
                                netopt::mean_trajectory_csv(reports));
      Json top;
      top["converged_all"] = all_converged;
      top["runs"] = std::move(summaries);
      netopt::write_text_atomic(dir / "summary.json", top.dump(2) + "\n");
      if (!all_converged) rc = 2;
    }
  });

  CLI::App* sweep = app.add_subcommand("sweep", "run consecutive seeds");
  add_scenario_flags(sweep, sf);
  sweep->add_option("--seed", seed, "first scenario seed")->default_val(0);
  sweep->add_option("--seeds", seeds, "number of seeds")->default_val(10);
  add_run_flags(sweep);
  sweep->callback([&] {
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    std::ostringstream table;
    table << "seed,converged,iterations,wsr_bits,kkt_residual\n";
    Json summaries = Json::array();
    bool all_converged = true;
    for (int i = 0; i < seeds; ++i) {
      Scenario sc = build_scenario(sf, seed + static_cast<std::uint64_t>(i));
      opts.seed = sc.seed;
      netopt::RunArtifacts art = netopt::run_scenario(sc, algo, opts);
      write_trajectory(dir, "trajectory_" + std::to_string(sc.seed),
                       art.report, format);
      table << sc.seed << ',' << (art.report.converged ? 1 : 0) << ','
            << art.report.iterations << ','
            << netopt::format_double(netopt::nats_to_bits(art.report.wsr))
            << ',' << netopt::format_double(art.report.kkt) << '\n';
      all_converged = all_converged && art.report.converged;
      summaries.push_back(std::move(art.summary));
    }
    netopt::write_text_atomic(dir / "sweep.csv", table.str());
    Json top;
    top["converged_all"] = all_converged;
    top["runs"] = std::move(summaries);
    netopt::write_text_atomic(dir / "summary.json", top.dump(2) + "\n");
    if (!all_converged) rc = 2;
  });

  CLI::App* check = app.add_subcommand(
      "check", "duality invariant suite on a network file");
  check->add_option("--net", net_file, "network JSON file")->required();
  check->add_option("--covs", covs_file,
                    "covariance JSON file (default: uniform full power)");
  check->add_option("--out-dir", out_dir, "output directory")->default_val(".");
  check->callback([&] {
    Network net = netopt::network_from_json(netopt::read_json_file(net_file));
    std::vector<netopt::CMat> covs;
    if (!covs_file.empty()) {
      covs = netopt::covs_from_json(netopt::read_json_file(covs_file));
      if (static_cast<int>(covs.size()) != net.L)
        throw CLI::ValidationError("--covs must hold one matrix per link");
      for (int l = 0; l < net.L; ++l)
        if (covs[l].rows() != net.nt[l])
          throw CLI::ValidationError(
              "--covs matrix sizes must match the transmit antennas");
    } else {
      for (int l = 0; l < net.L; ++l)
        covs.push_back(netopt::CMat::Identity(net.nt[l], net.nt[l]) *
                       (net.power / (net.L * net.nt[l])));
    }
    netopt::CheckReport report = netopt::check_covariances(net, covs);
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    netopt::write_text_atomic(dir / "check.json",
                              netopt::check_to_json(report).dump(2) + "\n");
    for (const netopt::CheckItem& it : report.items)
      std::cout << (it.pass ? "pass " : "FAIL ") << it.name << " (value "
                << it.value << ", bound " << it.bound << ")\n";
    if (!report.ok) rc = 2;
  });

  CLI::App* region = app.add_subcommand(
      "region", "two-link rate-region sweep over weights (mu, 1-mu)");
  add_scenario_flags(region, sf);
  region->add_option("--net", net_file,
                     "network JSON file (instead of a scenario)");
  region->add_option("--seed", seed, "scenario seed")->default_val(0);
  region->add_option("--mu-points", mu_points, "weight grid size")
      ->default_val(25);
  region->add_option("--starts", starts, "initial points per weight (best-of)")
      ->default_val(1);
  add_run_flags(region);
  region->callback([&] {
    opts.seed = seed;
    Network net;
    if (!net_file.empty())
      net = netopt::network_from_json(netopt::read_json_file(net_file));
    else
      net = netopt::generate(build_scenario(sf, seed));
    if (mu_points < 2) throw CLI::ValidationError("--mu-points must be >= 2");
    std::vector<double> grid(mu_points);
    for (int i = 0; i < mu_points; ++i)
      grid[i] = 0.01 + (0.99 - 0.01) * i / (mu_points - 1);
    std::vector<netopt::RegionPoint> points =
        netopt::rate_region_sweep(net, algo, grid, opts, starts);
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    netopt::write_text_atomic(dir / "region.csv", netopt::region_csv(points));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Collapse CLI11's per-error codes onto the documented contract:
    // 0 for --help, 1 for any usage problem.
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
