// Command-line front end: `run` executes one configured scenario, `sweep`
// executes a predefined measurement campaign across protocols, node counts
// and seeds. Exit codes: 0 success, 1 usage/config error, 2 violated
// run-time invariant.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <manetsim/manetsim.hpp>

namespace {

using namespace manetsim;

std::vector<Protocol> parse_protocols(const std::string& csv) {
  std::vector<Protocol> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(protocol_from_string(item));
  }
  if (out.empty()) throw std::invalid_argument("no protocols given");
  return out;
}

int do_run(const std::string& config_path, std::uint64_t seed, const std::string& out_dir,
           bool trace, bool force) {
  ScenarioConfig cfg = load_config(config_path);
  Simulation sim(cfg, seed);

  std::filesystem::path dir;
  std::ofstream motion, events;
  if (!out_dir.empty()) {
    dir = out_dir;
    prepare_out_dir(dir, force);
    nlohmann::json meta;
    meta["tool"] = "manetsim";
    meta["version"] = kVersion;
    meta["mode"] = "run";
    meta["seed"] = seed;
    meta["config"] = config_to_json(cfg);
    write_metadata(dir, meta);
    if (trace) {
      motion.open(dir / "motion.csv");
      events.open(dir / "events.csv");
      if (!motion || !events) throw std::runtime_error("cannot create trace files in " + out_dir);
      events << "t,event,node,frame_uid,kind,bytes\n";
      sim.trace_positions_to(motion);
      sim.trace_link_events_to(events);
    }
  } else if (trace) {
    throw std::runtime_error("--trace needs --out DIR to hold the trace files");
  }

  sim.run();
  RunMetrics m = sim.metrics();

  if (!dir.empty()) {
    ResultRow row{to_string(cfg.protocol), cfg.node_count, cfg.area_m,
                  cfg.duration_s,          std::to_string(seed), m};
    std::ofstream csv(dir / "metrics.csv");
    if (!csv) throw std::runtime_error("cannot write metrics.csv in " + out_dir);
    write_results_csv(csv, {row});
  }

  const RunCounters& c = sim.counters();
  std::cout << "protocol          " << to_string(cfg.protocol) << "\n"
            << "nodes             " << cfg.node_count << "\n"
            << "area_m            " << fmt_g(cfg.area_m) << "\n"
            << "duration_s        " << fmt_g(cfg.duration_s) << "\n"
            << "seed              " << seed << "\n"
            << "originated        " << c.data_originated << "\n"
            << "delivered         " << c.data_delivered << "\n"
            << "dropped           " << c.data_dropped << "\n";
  for (const auto& [reason, count] : c.drop_reasons)
    std::cout << "  drop." << reason << "  " << count << "\n";
  std::cout << "pdr               " << fmt_opt(m.pdr) << "\n"
            << "ro                " << fmt_opt(m.ro) << "\n"
            << "throughput_kbps   " << fmt_g(m.throughput_kbps) << "\n"
            << "e_tx_j            " << fmt_g(m.e_tx_j) << "\n"
            << "e_rx_j            " << fmt_g(m.e_rx_j) << "\n"
            << "e_idle_j          " << fmt_g(m.e_idle_j) << "\n"
            << "e_over_j          " << fmt_g(m.e_over_j) << "\n"
            << "avg_remaining_j   " << fmt_g(m.avg_remaining_j) << "\n"
            << "event_hash        " << sim.event_hash() << "\n";
  if (!dir.empty()) std::cout << "results           " << (dir / "metrics.csv").string() << "\n";
  return 0;
}

int do_sweep(const std::string& scenario, const std::string& protocols_csv, int seed_count,
             std::string out_dir, bool plots, bool force, int jobs, bool quiet) {
  if (seed_count < 1) throw std::invalid_argument("--seeds must be at least 1");
  Campaign campaign = campaign_by_name(scenario);
  std::vector<Protocol> protocols = parse_protocols(protocols_csv);
  std::vector<std::uint64_t> seeds;
  for (int s = 1; s <= seed_count; ++s) seeds.push_back(static_cast<std::uint64_t>(s));

  if (out_dir.empty()) out_dir = "sweep_" + scenario;
  std::filesystem::path dir = out_dir;
  prepare_out_dir(dir, force);

  nlohmann::json meta;
  meta["tool"] = "manetsim";
  meta["version"] = kVersion;
  meta["mode"] = "sweep";
  meta["scenario"] = scenario;
  meta["node_counts"] = campaign.node_counts;
  meta["duration_s"] = campaign.duration_s;
  meta["mobility"] = to_string(campaign.model);
  meta["v_min"] = campaign.v_min;
  meta["v_max"] = campaign.v_max;
  meta["seeds"] = seeds;
  {
    auto& arr = meta["protocols"] = nlohmann::json::array();
    for (Protocol p : protocols) arr.push_back(to_string(p));
  }
  write_metadata(dir, meta);

  auto progress = [&](const std::string& line) {
    if (!quiet) std::cerr << "done: " << line << "\n";
  };
  std::vector<ResultRow> rows = run_sweep(campaign, protocols, seeds, jobs, progress);

  {
    std::ofstream csv(dir / "metrics.csv");
    if (!csv) throw std::runtime_error("cannot write metrics.csv in " + out_dir);
    write_results_csv(csv, rows);
  }
  std::cout << "wrote " << (dir / "metrics.csv").string() << " (" << rows.size() << " rows)\n";

  if (plots) {
    std::vector<ResultRow> avg;
    for (const ResultRow& r : rows)
      if (r.seed == "avg") avg.push_back(r);
    std::filesystem::path plot_dir = dir / "plots";
    std::filesystem::create_directories(plot_dir);
    std::vector<std::string> charts = write_charts(plot_dir, avg);
    for (const std::string& name : charts)
      std::cout << "wrote " << (plot_dir / (name + ".svg")).string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic simulator for mobile ad-hoc routing protocols"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 1;
  std::string run_out;
  bool run_trace = false, run_force = false;
  CLI::App* run_cmd = app.add_subcommand("run", "execute one scenario from a JSON config");
  run_cmd->add_option("--config", config_path, "scenario config file (JSON)")->required();
  run_cmd->add_option("--seed", seed, "random seed (default 1)");
  run_cmd->add_option("--out", run_out, "directory for metrics.csv, metadata.json and traces");
  run_cmd->add_flag("--trace", run_trace, "write motion.csv and events.csv (needs --out)");
  run_cmd->add_flag("--force", run_force, "write into a non-empty output directory");

  std::string scenario, protocols_csv = "aodv,dsdv,dsr", sweep_out;
  int seed_count = 5;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  bool plots = false, sweep_force = false, quiet = false;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "execute a predefined campaign");
  sweep_cmd->add_option("--scenario", scenario, "campaign name: sim1 or sim2")->required();
  sweep_cmd->add_option("--protocols", protocols_csv, "comma list (default aodv,dsdv,dsr)");
  sweep_cmd->add_option("--seeds", seed_count, "seeds 1..N per configuration (default 5)");
  sweep_cmd->add_option("--out", sweep_out, "output directory (default sweep_<scenario>)");
  sweep_cmd->add_option("--jobs", jobs, "parallel workers (default: hardware threads)");
  sweep_cmd->add_flag("--plots", plots, "also write per-metric SVG charts");
  sweep_cmd->add_flag("--force", sweep_force, "write into a non-empty output directory");
  sweep_cmd->add_flag("--quiet", quiet, "suppress per-run progress on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << e.what() << "\n";
    return 1;
  }

  try {
    if (run_cmd->parsed()) return do_run(config_path, seed, run_out, run_trace, run_force);
    if (sweep_cmd->parsed())
      return do_sweep(scenario, protocols_csv, seed_count, sweep_out, plots, sweep_force, jobs,
                      quiet);
  } catch (const manetsim::invariant_error& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
