#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "confine/enclave/crypto.hpp"
#include "confine/harness/scenario.hpp"
#include "confine/harness/split.hpp"
#include "confine/mining/declare.hpp"
#include "confine/mining/heuristics.hpp"
#include "confine/protocol/provisioner.hpp"
#include "confine/protocol/secure_miner.hpp"
#include "confine/transport/sim_network.hpp"

namespace confine::harness {

enum class Algorithm { kHeuristics, kDeclare };
enum class Variant { kIncremental, kNonIncremental };
enum class TransportKind { kSimulated, kTcp };

std::string_view to_string(Algorithm a) noexcept;
std::string_view to_string(Variant v) noexcept;
/// Throw kInvalidConfig for unknown names.
Algorithm algorithm_from_string(std::string_view s);
Variant variant_from_string(std::string_view s);

/// Everything needed for one protocol session.
struct SessionSpec {
  std::map<OrgId, LogPartition> partitions;
  std::int64_t seg_size = 100'000;
  Algorithm algorithm = Algorithm::kHeuristics;
  Variant variant = Variant::kIncremental;
  std::optional<std::uint64_t> capacity;
  /// Seeds the delivery scheduler of the simulated network.
  std::uint64_t seed = 1;
  mining::HeuristicsConfig heuristics;
  mining::DeclareModel declare_model = scenario_declare_model();

  // Deviations of the miner from the expected build, for gating tests.
  std::optional<enclave::Measurement> miner_measurement;
  const enclave::Signer* miner_root = nullptr;
  std::optional<std::string> miner_identity_proof;
};

/// Reference measurement of the miner build that runs `algorithm`.
enclave::Measurement expected_measurement(Algorithm algorithm);

struct MetricSample {
  std::size_t step = 0;
  protocol::Phase phase = protocol::Phase::kInitialization;
  std::uint64_t current_bytes = 0;
  std::uint64_t peak_bytes = 0;
  std::size_t messages = 0;

  friend bool operator==(const MetricSample&, const MetricSample&) = default;
};

struct RunMetrics {
  std::uint64_t peak_bytes = 0;
  double mean_bytes = 0.0;
  std::size_t message_count = 0;
  std::vector<MetricSample> samples;
  /// First step at which each phase was observed.
  std::map<protocol::Phase, std::size_t> phase_starts;
  double wall_seconds = 0.0;
};

struct RunResult {
  RunMetrics metrics;
  std::vector<transport::Delivery> transcript;
  /// Every requested case reached the mining algorithm.
  bool completed = false;
  std::string error;
  /// PNML (heuristics) or fitness JSON (declare); empty if not completed.
  std::string output;
  std::optional<mining::WorkflowNet> net;
  std::optional<mining::FitnessReport> fitness;
  std::size_t yields = 0;
  std::size_t cases_res_delivered = 0;
  std::map<OrgId, protocol::ProvisionerStatus> provisioner_status;
  std::map<OrgId, std::vector<std::string>> k_sym_fingerprints;
  /// Every byte string that crossed the network in this session.
  std::vector<Bytes> wire_bytes;
};

/// Runs one session over the simulated network. Protocol errors propagate;
/// a session that stalls (e.g. after a rejected attestation) returns with
/// completed = false.
RunResult run_session(const SessionSpec& spec);

/// Re-runs a session delivering messages in the order of `transcript`.
RunResult replay_session(const SessionSpec& spec, const std::vector<transport::Delivery>& transcript);

/// Runs one session with every party on its own thread, talking TCP over
/// loopback.
RunResult run_session_tcp(const SessionSpec& spec);

/// Mining output computed directly on a plain log, outside the protocol.
std::string mine_directly(const EventLog& log, const SessionSpec& spec);

/// `step,phase,current_bytes,peak_bytes,messages`.
std::string metrics_csv(const RunMetrics& m);
/// One JSON object per delivery.
std::string transcript_jsonl(const std::vector<transport::Delivery>& t);
std::vector<transport::Delivery> parse_transcript_jsonl(std::string_view text);

struct SweepPoint {
  std::int64_t seg_size = 0;
  std::size_t messages = 0;
  std::size_t segments = 0;
  std::uint64_t peak_bytes = 0;
  double mean_bytes = 0.0;
};

/// One session per seg_size, all else equal.
std::vector<SweepPoint> sweep_segsize(const SessionSpec& spec, const std::vector<std::int64_t>& seg_sizes);

enum class ScaleDimension { kEvents, kCases, kOrgs };
ScaleDimension scale_dimension_from_string(std::string_view s);

struct ScalePoint {
  double x = 0.0;
  std::size_t events = 0;
  std::uint64_t peak_bytes = 0;
  double mean_bytes = 0.0;
  std::size_t messages = 0;
};

/// Scalability runs over the generated scenario: x is x_loop (events),
/// log2 of the case count (cases) or the number of organizations (orgs).
std::vector<ScalePoint> scale_run(ScaleDimension dim, const std::vector<unsigned>& xs,
                                  const ScenarioParams& base, const SessionSpec& session);

/// Run configuration as read by the command-line tool.
struct ExperimentConfig {
  /// A CSV/XES log to split, or a provisioner reference file; if neither is
  /// set the scenario generator is used.
  std::optional<std::filesystem::path> log;
  std::optional<std::filesystem::path> providers;
  ScenarioParams scenario;
  std::optional<std::filesystem::path> org_map;
  std::optional<std::filesystem::path> declare_model;
  std::vector<std::int64_t> seg_sizes{100'000};
  Algorithm algorithm = Algorithm::kHeuristics;
  Variant variant = Variant::kIncremental;
  TransportKind transport = TransportKind::kSimulated;
  std::optional<std::uint64_t> capacity;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";
};

/// Relative paths resolve against `base`. Throws kInvalidConfig.
ExperimentConfig experiment_config_from_json(std::string_view json, const std::filesystem::path& base);

/// Partitions and session settings described by a config (first seg_size).
SessionSpec session_from_config(const ExperimentConfig& cfg);

}  // namespace confine::harness
