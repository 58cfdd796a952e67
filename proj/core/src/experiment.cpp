#include "confine/harness/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>

#include "confine/error.hpp"
#include "confine/harness/log_io.hpp"
#include "confine/log_codec.hpp"
#include "confine/protocol/log_processor.hpp"
#include "confine/transport/tcp.hpp"
#include "json.hpp"

namespace confine::harness {
namespace {

using protocol::Message;
using protocol::Phase;
using Clock = std::chrono::steady_clock;

const OrgId kMinerId = "miner";

struct Parties {
  std::unique_ptr<protocol::LogProcessor> processor;
  std::unique_ptr<protocol::SecureMiner> miner;
  std::map<OrgId, std::unique_ptr<protocol::Provisioner>> provisioners;
};

std::string provisioner_label(const OrgId& org) { return "confine provisioner " + org; }

Parties make_parties(const SessionSpec& spec) {
  if (spec.partitions.contains(kMinerId))
    throw Error(Errc::kInvalidConfig, "'" + kMinerId + "' is reserved for the Secure Miner");
  Parties p;
  if (spec.algorithm == Algorithm::kHeuristics)
    p.processor = std::make_unique<protocol::HeuristicsProcessor>(spec.heuristics);
  else
    p.processor = std::make_unique<protocol::DeclareProcessor>(spec.declare_model);

  const auto reference = expected_measurement(spec.algorithm);
  protocol::MinerConfig mc;
  mc.id = kMinerId;
  mc.session_id = "session-1";
  mc.identity_proof = spec.miner_identity_proof.value_or(kMinerId);
  mc.seg_size = static_cast<std::uint64_t>(spec.seg_size);
  mc.do_yield_cases = spec.variant == Variant::kIncremental;
  mc.measurement = spec.miner_measurement.value_or(reference);
  mc.root = spec.miner_root;
  mc.capacity = spec.capacity;

  for (const auto& [org, partition] : spec.partitions) {
    protocol::ProvisionerConfig pc;
    pc.id = org;
    pc.partition = partition;
    pc.allowed_miners = {kMinerId};
    pc.allowed_orgs = {kMinerId};
    pc.reference = reference;
    auto prov = std::make_unique<protocol::Provisioner>(std::move(pc),
                                                        enclave::Signer::from_label(provisioner_label(org)));
    mc.provisioners.push_back(org);
    mc.provisioner_keys[org] = prov->public_key();
    p.provisioners[org] = std::move(prov);
  }
  p.miner = std::make_unique<protocol::SecureMiner>(std::move(mc), *p.processor);
  return p;
}

class MetricsRecorder {
 public:
  explicit MetricsRecorder(const protocol::SecureMiner& miner) : miner_(miner), start_(Clock::now()) {
    sample(0);
  }

  void sample(std::size_t messages) {
    const auto& acct = miner_.accountant();
    MetricSample s{m_.samples.size(), miner_.phase(), acct.current(), acct.peak(), messages};
    m_.phase_starts.try_emplace(s.phase, s.step);
    m_.samples.push_back(s);
  }

  RunMetrics finish(std::size_t messages) {
    m_.message_count = messages;
    m_.peak_bytes = miner_.accountant().peak();
    double sum = 0;
    for (const auto& s : m_.samples) sum += static_cast<double>(s.current_bytes);
    m_.mean_bytes = sum / static_cast<double>(m_.samples.size());
    m_.wall_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    return std::move(m_);
  }

 private:
  const protocol::SecureMiner& miner_;
  Clock::time_point start_;
  RunMetrics m_;
};

void collect_outcome(const SessionSpec& spec, Parties& p, RunResult& r) {
  r.yields = p.miner->yields();
  r.completed = p.miner->done();
  if (!r.completed) {
    try {
      p.miner->finish();
    } catch (const Error& e) {
      r.error = e.what();
    }
  } else if (spec.algorithm == Algorithm::kHeuristics) {
    auto& hp = static_cast<protocol::HeuristicsProcessor&>(*p.processor);
    if (hp.state().cases_seen > 0) {
      r.net = hp.result();
      r.output = mining::to_pnml(*r.net);
    }
  } else {
    auto& dp = static_cast<protocol::DeclareProcessor&>(*p.processor);
    try {
      r.fitness = dp.result();
      r.output = mining::to_json(*r.fitness);
    } catch (const Error& e) {
      if (e.code() != Errc::kEmptyInput) throw;
    }
  }
  for (const auto& [org, prov] : p.provisioners) {
    r.provisioner_status[org] = prov->status();
    r.k_sym_fingerprints[org] = prov->k_sym_fingerprints();
  }
  for (const auto& d : r.transcript) r.cases_res_delivered += d.kind == "CasesRes" ? 1 : 0;
}

RunResult run_simulated(const SessionSpec& spec, const std::vector<transport::Delivery>* forced) {
  auto p = make_parties(spec);
  transport::SimNetwork net(spec.seed);
  net.add_party(kMinerId, [&](const Message& m) { return p.miner->on_message(m); });
  for (auto& [org, prov] : p.provisioners) {
    auto* raw = prov.get();
    net.add_party(org, [raw](const Message& m) { return raw->on_message(m); });
  }
  if (forced) {
    std::vector<std::pair<OrgId, OrgId>> order;
    for (const auto& d : *forced) order.emplace_back(d.from, d.to);
    net.force_order(std::move(order));
  }
  RunResult r;
  net.set_tap([&](const Bytes& b) { r.wire_bytes.push_back(b); });

  MetricsRecorder rec(*p.miner);
  std::size_t delivered = 0;
  net.send_all(p.miner->start());
  net.run([&](const transport::Delivery&) { rec.sample(++delivered); });
  r.transcript = net.transcript();
  r.metrics = rec.finish(delivered);
  collect_outcome(spec, p, r);
  return r;
}

nlohmann::json to_json(const transport::Delivery& d) {
  return {{"step", d.step}, {"from", d.from}, {"to", d.to}, {"kind", d.kind}, {"bytes", d.bytes}};
}

}  // namespace

std::string_view to_string(Algorithm a) noexcept {
  return a == Algorithm::kHeuristics ? "heuristics" : "declare";
}

std::string_view to_string(Variant v) noexcept {
  return v == Variant::kIncremental ? "incremental" : "non-incremental";
}

Algorithm algorithm_from_string(std::string_view s) {
  if (s == "heuristics") return Algorithm::kHeuristics;
  if (s == "declare") return Algorithm::kDeclare;
  throw Error(Errc::kInvalidConfig, "unknown algorithm '" + std::string(s) + "'");
}

Variant variant_from_string(std::string_view s) {
  if (s == "incremental") return Variant::kIncremental;
  if (s == "non-incremental") return Variant::kNonIncremental;
  throw Error(Errc::kInvalidConfig, "unknown variant '" + std::string(s) + "'");
}

enclave::Measurement expected_measurement(Algorithm algorithm) {
  return enclave::measure(enclave::miner_build_manifest(to_string(algorithm)));
}

RunResult run_session(const SessionSpec& spec) { return run_simulated(spec, nullptr); }

RunResult replay_session(const SessionSpec& spec, const std::vector<transport::Delivery>& transcript) {
  return run_simulated(spec, &transcript);
}

RunResult run_session_tcp(const SessionSpec& spec) {
  auto p = make_parties(spec);
  std::map<OrgId, std::string> tokens;
  tokens[kMinerId] = to_hex(enclave::random_bytes(16));
  for (const auto& [org, prov] : p.provisioners) tokens[org] = to_hex(enclave::random_bytes(16));

  std::map<OrgId, std::unique_ptr<transport::TcpEndpoint>> eps;
  for (const auto& [org, token] : tokens) eps[org] = std::make_unique<transport::TcpEndpoint>(org, tokens);
  for (auto& [a, ep] : eps) {
    for (const auto& [b, other] : eps) {
      if (a != b) ep->add_peer(b, "127.0.0.1", other->port());
    }
  }

  RunResult r;
  std::mutex mu;
  std::size_t delivered = 0;
  auto record = [&](const Message& m) {
    const auto bytes = protocol::encode_message(m);
    std::lock_guard lock(mu);
    r.transcript.push_back({r.transcript.size(), m.sender, m.receiver, std::string(protocol::kind_name(m.body)),
                            bytes.size()});
    r.wire_bytes.push_back(bytes);
    return ++delivered;
  };

  std::atomic<bool> stop{false};
  std::exception_ptr failure;
  std::vector<std::thread> threads;
  for (auto& [org, prov] : p.provisioners) {
    auto* ep = eps.at(org).get();
    auto* machine = prov.get();
    threads.emplace_back([&, ep, machine] {
      try {
        while (!stop) {
          auto m = ep->receive_for(std::chrono::milliseconds(20));
          if (!m) continue;
          record(*m);
          for (const auto& out : machine->on_message(*m)) ep->send(out);
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
    });
  }

  MetricsRecorder rec(*p.miner);
  auto* mep = eps.at(kMinerId).get();
  try {
    for (const auto& m : p.miner->start()) mep->send(m);
    auto last = Clock::now();
    while (!p.miner->done() && !stop) {
      auto m = mep->receive_for(std::chrono::milliseconds(20));
      if (!m) {
        if (Clock::now() - last > std::chrono::seconds(1)) break;
        continue;
      }
      last = Clock::now();
      const auto n = record(*m);
      const auto outs = p.miner->on_message(*m);
      rec.sample(n);
      for (const auto& out : outs) mep->send(out);
    }
  } catch (...) {
    std::lock_guard lock(mu);
    if (!failure) failure = std::current_exception();
  }
  stop = true;
  for (auto& t : threads) t.join();
  for (auto& [org, ep] : eps) ep->close();
  if (failure) std::rethrow_exception(failure);

  r.metrics = rec.finish(delivered);
  collect_outcome(spec, p, r);
  return r;
}

std::string mine_directly(const EventLog& log, const SessionSpec& spec) {
  if (spec.algorithm == Algorithm::kHeuristics) {
    mining::DfgState state;
    mining::hm_observe_log(state, log);
    return mining::to_pnml(mining::hm_finalize(state, spec.heuristics));
  }
  std::vector<mining::TraceCheck> checks;
  for (const auto& [iid, c] : split_by_case(log)) checks.push_back(mining::declare_check(spec.declare_model, c));
  return mining::to_json(mining::declare_aggregate(spec.declare_model, checks));
}

std::string metrics_csv(const RunMetrics& m) {
  std::string out = "step,phase,current_bytes,peak_bytes,messages\n";
  for (const auto& s : m.samples) {
    out += std::to_string(s.step) + "," + std::string(protocol::to_string(s.phase)) + "," +
           std::to_string(s.current_bytes) + "," + std::to_string(s.peak_bytes) + "," + std::to_string(s.messages) +
           "\n";
  }
  return out;
}

std::string transcript_jsonl(const std::vector<transport::Delivery>& t) {
  std::string out;
  for (const auto& d : t) out += to_json(d).dump() + "\n";
  return out;
}

std::vector<transport::Delivery> parse_transcript_jsonl(std::string_view text) {
  std::vector<transport::Delivery> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("step").get<std::size_t>(), j.at("from").get<std::string>(), j.at("to").get<std::string>(),
                     j.at("kind").get<std::string>(), j.at("bytes").get<std::size_t>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kDecode, std::string("transcript line: ") + e.what());
    }
  }
  return out;
}

std::vector<SweepPoint> sweep_segsize(const SessionSpec& spec, const std::vector<std::int64_t>& seg_sizes) {
  std::vector<SweepPoint> out;
  for (const auto s : seg_sizes) {
    SessionSpec run = spec;
    run.seg_size = s;
    const auto r = run_session(run);
    if (!r.completed) throw Error(Errc::kTruncatedStream, r.error);
    out.push_back({s, r.metrics.message_count, r.cases_res_delivered, r.metrics.peak_bytes, r.metrics.mean_bytes});
  }
  return out;
}

ScaleDimension scale_dimension_from_string(std::string_view s) {
  if (s == "events") return ScaleDimension::kEvents;
  if (s == "cases") return ScaleDimension::kCases;
  if (s == "orgs") return ScaleDimension::kOrgs;
  throw Error(Errc::kInvalidConfig, "unknown scale dimension '" + std::string(s) + "'");
}

std::vector<ScalePoint> scale_run(ScaleDimension dim, const std::vector<unsigned>& xs, const ScenarioParams& base,
                                  const SessionSpec& session) {
  std::vector<ScalePoint> out;
  for (const auto x : xs) {
    ScenarioParams params = base;
    switch (dim) {
      case ScaleDimension::kEvents: params.x_loop = x; break;
      case ScaleDimension::kCases: params.n_cases = std::size_t{1} << x; break;
      case ScaleDimension::kOrgs: break;
    }
    const auto scenario = generate_scenario_log(params);
    SessionSpec run = session;
    run.partitions = split_log(scenario.log, dim == ScaleDimension::kOrgs ? pooled_org_map(x) : scenario.org_map);
    const auto r = run_session(run);
    if (!r.completed) throw Error(Errc::kTruncatedStream, r.error);
    out.push_back({static_cast<double>(x), scenario.log.size(), r.metrics.peak_bytes, r.metrics.mean_bytes,
                   r.metrics.message_count});
  }
  return out;
}

ExperimentConfig experiment_config_from_json(std::string_view text, const std::filesystem::path& base) {
  ExperimentConfig cfg;
  auto path = [&](const nlohmann::json& v) {
    std::filesystem::path p = v.get<std::string>();
    return p.is_relative() ? base / p : p;
  };
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.contains("log") && !j["log"].is_null()) cfg.log = path(j["log"]);
    if (j.contains("providers") && !j["providers"].is_null()) cfg.providers = path(j["providers"]);
    if (j.contains("org_map") && !j["org_map"].is_null()) cfg.org_map = path(j["org_map"]);
    if (j.contains("declare_model") && !j["declare_model"].is_null()) cfg.declare_model = path(j["declare_model"]);
    if (j.contains("scenario")) {
      const auto& s = j["scenario"];
      cfg.scenario.n_cases = s.value("n_cases", cfg.scenario.n_cases);
      cfg.scenario.seed = s.value("seed", cfg.scenario.seed);
      cfg.scenario.x_loop = s.value("x_loop", cfg.scenario.x_loop);
      cfg.scenario.n_orgs = s.value("n_orgs", cfg.scenario.n_orgs);
      cfg.scenario.clinic_probability = s.value("clinic_probability", cfg.scenario.clinic_probability);
    }
    if (j.contains("seg_sizes")) cfg.seg_sizes = j["seg_sizes"].get<std::vector<std::int64_t>>();
    if (j.contains("algorithm")) cfg.algorithm = algorithm_from_string(j["algorithm"].get<std::string>());
    if (j.contains("variant")) cfg.variant = variant_from_string(j["variant"].get<std::string>());
    if (j.contains("transport")) {
      const auto t = j["transport"].get<std::string>();
      if (t == "sim")
        cfg.transport = TransportKind::kSimulated;
      else if (t == "tcp")
        cfg.transport = TransportKind::kTcp;
      else
        throw Error(Errc::kInvalidConfig, "unknown transport '" + t + "'");
    }
    if (j.contains("capacity") && !j["capacity"].is_null()) cfg.capacity = j["capacity"].get<std::uint64_t>();
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("output_dir")) cfg.output_dir = path(j["output_dir"]);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kInvalidConfig, std::string("experiment config: ") + e.what());
  }
  if (cfg.seg_sizes.empty()) throw Error(Errc::kInvalidConfig, "seg_sizes is empty");
  return cfg;
}

SessionSpec session_from_config(const ExperimentConfig& cfg) {
  SessionSpec spec;
  spec.seg_size = cfg.seg_sizes.front();
  spec.algorithm = cfg.algorithm;
  spec.variant = cfg.variant;
  spec.capacity = cfg.capacity;
  spec.seed = cfg.seed;
  if (cfg.declare_model) spec.declare_model = mining::declare_model_from_json(read_file(*cfg.declare_model));

  std::optional<OrgMap> org_map;
  if (cfg.org_map) org_map = org_map_from_json(read_file(*cfg.org_map));
  if (cfg.providers) {
    spec.partitions = load_partitions(parse_provisioner_refs(read_file(*cfg.providers)), cfg.providers->parent_path());
  } else if (cfg.log) {
    if (!org_map) throw Error(Errc::kInvalidConfig, "splitting a log file needs an org_map");
    spec.partitions = split_log(load_log(*cfg.log, format_from_path(*cfg.log)), *org_map);
  } else {
    const auto scenario = generate_scenario_log(cfg.scenario);
    spec.partitions = split_log(scenario.log, org_map.value_or(scenario.org_map));
  }
  return spec;
}

}  // namespace confine::harness
