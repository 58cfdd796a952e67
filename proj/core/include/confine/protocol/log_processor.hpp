#pragma once

#include <cstdint>
#include <vector>

#include "confine/mining/declare.hpp"
#include "confine/mining/dfg.hpp"
#include "confine/mining/heuristics.hpp"
#include "confine/model.hpp"

namespace confine::protocol {

/// Receives what the Secure Miner yields: single complete cases in the
/// incremental variant, one merged log otherwise.
class LogProcessor {
 public:
  virtual ~LogProcessor() = default;
  virtual void process_case(const Case& c) = 0;
  virtual void process_log(const EventLog& log) = 0;
  /// Bytes of mining state held inside the enclave.
  virtual std::uint64_t state_bytes() const = 0;
};

class HeuristicsProcessor final : public LogProcessor {
 public:
  explicit HeuristicsProcessor(mining::HeuristicsConfig cfg = {}) : cfg_(cfg) {}

  void process_case(const Case& c) override { mining::hm_observe(state_, c); }
  void process_log(const EventLog& log) override { mining::hm_observe_log(state_, log); }
  std::uint64_t state_bytes() const override { return mining::footprint_bytes(state_); }

  const mining::DfgState& state() const noexcept { return state_; }
  mining::WorkflowNet result() const { return mining::hm_finalize(state_, cfg_); }

 private:
  mining::HeuristicsConfig cfg_;
  mining::DfgState state_;
};

class DeclareProcessor final : public LogProcessor {
 public:
  explicit DeclareProcessor(mining::DeclareModel model) : acc_(std::move(model)) {}

  void process_case(const Case& c) override { acc_.observe(c); }
  void process_log(const EventLog& log) override;
  std::uint64_t state_bytes() const override { return acc_.footprint_bytes(); }

  mining::FitnessReport result() const { return acc_.finalize(); }

 private:
  mining::DeclareAccumulator acc_;
};

/// Keeps every yielded item; used to check what the protocol delivers.
class CollectingProcessor final : public LogProcessor {
 public:
  void process_case(const Case& c) override { cases_.push_back(c); }
  void process_log(const EventLog& log) override { logs_.push_back(log); }
  std::uint64_t state_bytes() const override { return 0; }

  const std::vector<Case>& cases() const noexcept { return cases_; }
  const std::vector<EventLog>& logs() const noexcept { return logs_; }
  /// Everything yielded, as one log.
  EventLog collected() const;

 private:
  std::vector<Case> cases_;
  std::vector<EventLog> logs_;
};

}  // namespace confine::protocol
