// Command-line front end: log generation and splitting, protocol runs and
// the measurement sweeps.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "confine/error.hpp"
#include "confine/harness/experiment.hpp"
#include "confine/harness/log_io.hpp"
#include "confine/harness/regression.hpp"
#include "confine/harness/scenario.hpp"
#include "confine/harness/split.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace confine;
using namespace confine::harness;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> seg_size;
  std::optional<std::string> algorithm;
  std::optional<std::string> variant;
  std::optional<std::string> transport;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> capacity;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "JSON run configuration (defaults: generated scenario)");
  cmd->add_option("--seed", o.seed, "scheduler seed");
  cmd->add_option("--seg-size", o.seg_size, "segment budget in bytes");
  cmd->add_option("--algorithm", o.algorithm, "heuristics | declare");
  cmd->add_option("--variant", o.variant, "incremental | non-incremental");
  cmd->add_option("--transport", o.transport, "sim | tcp");
  cmd->add_option("--capacity", o.capacity, "simulated enclave capacity in bytes");
  cmd->add_option("-o,--out-dir", o.out_dir, "output directory");
}

ExperimentConfig load_config(const Overrides& o) {
  ExperimentConfig cfg;
  if (!o.config.empty()) {
    const fs::path p = o.config;
    cfg = experiment_config_from_json(read_file(p), p.parent_path());
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.seg_size) cfg.seg_sizes = {*o.seg_size};
  if (o.algorithm) cfg.algorithm = algorithm_from_string(*o.algorithm);
  if (o.variant) cfg.variant = variant_from_string(*o.variant);
  if (o.transport) cfg.transport = *o.transport == "tcp" ? TransportKind::kTcp : TransportKind::kSimulated;
  if (o.capacity) cfg.capacity = *o.capacity;
  if (o.out_dir) cfg.output_dir = *o.out_dir;
  return cfg;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_run(const fs::path& dir, const ExperimentConfig& cfg, const RunResult& r) {
  write_file(dir / "metrics.csv", metrics_csv(r.metrics));
  write_file(dir / "transcript.jsonl", transcript_jsonl(r.transcript));
  if (!r.output.empty())
    write_file(dir / (cfg.algorithm == Algorithm::kHeuristics ? "model.pnml" : "fitness.json"), r.output);
  nlohmann::ordered_json s;
  s["completed"] = r.completed;
  if (!r.error.empty()) s["error"] = r.error;
  s["algorithm"] = std::string(to_string(cfg.algorithm));
  s["variant"] = std::string(to_string(cfg.variant));
  s["peak_bytes"] = r.metrics.peak_bytes;
  s["mean_bytes"] = r.metrics.mean_bytes;
  s["messages"] = r.metrics.message_count;
  s["segments"] = r.cases_res_delivered;
  s["yields"] = r.yields;
  s["wall_seconds"] = r.metrics.wall_seconds;
  write_file(dir / "summary.json", s.dump(2) + "\n");
  std::cout << s.dump(2) << "\n";
}

int cmd_generate(std::size_t cases, std::uint64_t seed, unsigned x_loop, unsigned orgs, const std::string& out,
                 const std::string& org_map_out, const std::string& declare_out) {
  const auto sc = generate_scenario_log({cases, seed, x_loop, orgs});
  save_log(out, sc.log);
  if (!org_map_out.empty()) write_file(org_map_out, to_json(sc.org_map));
  if (!declare_out.empty()) write_file(declare_out, mining::declare_model_to_json(scenario_declare_model()));
  std::cout << "wrote " << sc.log.size() << " events in " << iid_set(sc.log).size() << " cases to " << out << "\n";
  return 0;
}

int cmd_split(const std::string& log_path, const std::string& map_path, const std::string& iid_attr,
              const std::string& out_dir) {
  const auto log = load_log(log_path, format_from_path(log_path), LoadOptions{iid_attr, ""});
  const auto parts = split_log(log, org_map_from_json(read_file(map_path)));
  std::vector<ProvisionerRef> refs;
  for (const auto& [org, part] : parts) {
    save_log(fs::path(out_dir) / (org + ".csv"), part);
    refs.push_back({org, "file:" + org + ".csv", "case"});
    std::cout << org << ": " << part.size() << " events\n";
  }
  write_file(fs::path(out_dir) / "providers.json", to_json(refs));
  return 0;
}

RunResult run_one(const ExperimentConfig& cfg) {
  const auto spec = session_from_config(cfg);
  return cfg.transport == TransportKind::kTcp ? run_session_tcp(spec) : run_session(spec);
}

int cmd_run(const Overrides& o) {
  const auto cfg = load_config(o);
  const auto r = run_one(cfg);
  write_run(cfg.output_dir, cfg, r);
  return r.completed ? 0 : 1;
}

int cmd_sweep(const Overrides& o, const std::string& sizes) {
  auto cfg = load_config(o);
  std::vector<std::int64_t> seg_sizes;
  for (const auto& s : split_list(sizes)) seg_sizes.push_back(std::stoll(s));
  if (seg_sizes.empty()) seg_sizes = cfg.seg_sizes;
  const auto points = sweep_segsize(session_from_config(cfg), seg_sizes);
  std::string csv = "seg_size,messages,segments,peak_bytes,mean_bytes\n";
  for (const auto& p : points) {
    csv += std::to_string(p.seg_size) + "," + std::to_string(p.messages) + "," + std::to_string(p.segments) + "," +
           std::to_string(p.peak_bytes) + "," + std::to_string(p.mean_bytes) + "\n";
  }
  write_file(cfg.output_dir / "sweep.csv", csv);
  std::cout << csv;
  return 0;
}

void print_stats(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto st = fit_stats(xs, ys);
  std::printf("r2_linear=%.6f r2_log=%.6f slope=%.6g\n", st.r2_linear, st.r2_log, st.slope);
}

int cmd_scale(const Overrides& o, const std::string& dim, const std::string& xs_text) {
  const auto cfg = load_config(o);
  auto spec = session_from_config(cfg);
  std::vector<unsigned> xs;
  for (const auto& s : split_list(xs_text)) xs.push_back(static_cast<unsigned>(std::stoul(s)));
  const auto points = scale_run(scale_dimension_from_string(dim), xs, cfg.scenario, spec);
  std::string csv = "x,events,peak_bytes,mean_bytes,messages\n";
  std::vector<double> vx, vy;
  for (const auto& p : points) {
    csv += std::to_string(p.x) + "," + std::to_string(p.events) + "," + std::to_string(p.peak_bytes) + "," +
           std::to_string(p.mean_bytes) + "," + std::to_string(p.messages) + "\n";
    vx.push_back(p.x);
    vy.push_back(p.mean_bytes);
  }
  write_file(cfg.output_dir / ("scale-" + dim + ".csv"), csv);
  std::cout << csv;
  if (vx.size() >= 3) print_stats(vx, vy);
  return 0;
}

int cmd_stats(const std::string& csv_path, const std::string& xcol, const std::string& ycol) {
  std::istringstream in(read_file(csv_path));
  std::string line;
  std::getline(in, line);
  const auto header = split_list(line);
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw Error(Errc::kMissingAttribute, "no column '" + name + "' in " + csv_path);
  };
  const auto xi = col(xcol), yi = col(ycol);
  std::vector<double> xs, ys;
  while (std::getline(in, line)) {
    const auto cells = split_list(line);
    if (cells.size() != header.size()) continue;
    xs.push_back(std::stod(cells[xi]));
    ys.push_back(std::stod(cells[yi]));
  }
  print_stats(xs, ys);
  return 0;
}

int cmd_verify(const Overrides& o) {
  const auto cfg = load_config(o);
  const auto spec = session_from_config(cfg);
  std::vector<EventLog> parts;
  for (const auto& [org, p] : spec.partitions) parts.push_back(p);
  const auto direct = mine_directly(merge_all(parts), spec);
  const auto r = cfg.transport == TransportKind::kTcp ? run_session_tcp(spec) : run_session(spec);
  const bool same = r.completed && r.output == direct;
  std::cout << (same ? "converged" : "DIVERGED") << ": " << to_string(cfg.algorithm) << ", "
            << to_string(cfg.variant) << ", " << direct.size() << " bytes of output\n";
  return same ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidential inter-organizational process mining: protocol simulator and experiments"};
  app.require_subcommand(1);

  std::size_t cases = 1000;
  std::uint64_t gen_seed = 1;
  unsigned x_loop = 1, orgs = 3;
  std::string gen_out = "scenario.csv", gen_map_out, gen_declare_out;
  auto* gen = app.add_subcommand("generate", "simulate the care-process scenario log");
  gen->add_option("--cases", cases, "number of cases");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--x-loop", x_loop, "loop iterations per case");
  gen->add_option("--orgs", orgs, "number of organizations");
  gen->add_option("-o,--out", gen_out, "output CSV");
  gen->add_option("--org-map-out", gen_map_out, "write the org map JSON here");
  gen->add_option("--declare-out", gen_declare_out, "write the scenario Declare model JSON here");

  std::string split_log_path, split_map, split_iid = "case", split_out = ".";
  auto* split = app.add_subcommand("split", "split a log into per-organization partitions");
  split->add_option("--log", split_log_path, "CSV or XES log")->required();
  split->add_option("--org-map", split_map, "org map JSON")->required();
  split->add_option("--iid-attribute", split_iid, "iid column / attribute");
  split->add_option("-o,--out-dir", split_out, "output directory");

  Overrides run_o, sweep_o, scale_o, verify_o;
  auto* run = app.add_subcommand("run", "run one protocol session");
  add_overrides(run, run_o);

  std::string sweep_sizes = "50000,100000,500000,1000000,5000000";
  auto* sweep = app.add_subcommand("sweep-segsize", "one session per segment size");
  add_overrides(sweep, sweep_o);
  sweep->add_option("--seg-sizes", sweep_sizes, "comma-separated byte budgets");

  std::string scale_dim, scale_xs;
  auto* scale = app.add_subcommand("scale", "scalability runs over the scenario log");
  add_overrides(scale, scale_o);
  scale->add_option("dimension", scale_dim, "events | cases | orgs")->required();
  scale->add_option("--xs", scale_xs, "comma-separated x values")->required();

  std::string stats_csv, stats_x = "x", stats_y = "mean_bytes";
  auto* stats = app.add_subcommand("stats", "linear and logarithmic fits of a CSV series");
  stats->add_option("csv", stats_csv, "CSV file")->required();
  stats->add_option("--x", stats_x, "x column");
  stats->add_option("--y", stats_y, "y column");

  auto* verify = app.add_subcommand("verify-convergence", "compare protocol output with direct mining");
  add_overrides(verify, verify_o);

  CLI11_PARSE(app, argc, argv);
  try {
    if (gen->parsed()) return cmd_generate(cases, gen_seed, x_loop, orgs, gen_out, gen_map_out, gen_declare_out);
    if (split->parsed()) return cmd_split(split_log_path, split_map, split_iid, split_out);
    if (run->parsed()) return cmd_run(run_o);
    if (sweep->parsed()) return cmd_sweep(sweep_o, sweep_sizes);
    if (scale->parsed()) return cmd_scale(scale_o, scale_dim, scale_xs);
    if (stats->parsed()) return cmd_stats(stats_csv, stats_x, stats_y);
    if (verify->parsed()) return cmd_verify(verify_o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
