#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "confine/model.hpp"

namespace confine::mining {

enum class DeclareTemplate {
  kExistence,
  kAbsence,
  kExactlyOne,
  kInit,
  kEnd,
  kRespondedExistence,
  kResponse,
  kPrecedence,
  kSuccession,
  kChainResponse,
  kChainPrecedence,
  kNotSuccession,
};

std::string_view to_string(DeclareTemplate t) noexcept;
/// Throws kInvalidConfig for an unknown name.
DeclareTemplate declare_template_from_string(std::string_view name);
bool is_binary(DeclareTemplate t) noexcept;

/// A template instantiated with its parameters, in the usual Declare order:
/// Response(a, b) reads "every a is eventually followed by b".
struct Constraint {
  DeclareTemplate tmpl;
  ActivityLabel a;
  std::optional<ActivityLabel> b;

  /// "Response(OD,DOR)".
  std::string to_string() const;

  friend bool operator==(const Constraint&, const Constraint&) = default;
  friend auto operator<=>(const Constraint&, const Constraint&) = default;
};

struct DeclareModel {
  std::set<ActivityLabel> alphabet;
  std::vector<Constraint> constraints;

  friend bool operator==(const DeclareModel&, const DeclareModel&) = default;
};

/// Throws kInvalidConfig if the model is empty, a constraint has the wrong
/// arity, or uses an activity outside the alphabet.
void validate(const DeclareModel& model);

/// {"alphabet": [...], "constraints": [{"template": "Response",
/// "activation": "OD", "target": "DOR"}, ...]}. A missing alphabet is taken
/// to be the activities the constraints mention.
DeclareModel declare_model_from_json(std::string_view json);
std::string declare_model_to_json(const DeclareModel& model);

bool declare_holds(const Constraint& c, const std::vector<ActivityLabel>& trace);

/// Exact non-negative fraction, always in lowest terms.
class Rational {
 public:
  Rational() = default;
  Rational(std::uint64_t num, std::uint64_t den);

  std::uint64_t num() const noexcept { return num_; }
  std::uint64_t den() const noexcept { return den_; }
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  /// "3/4"; integers print as "1/1".
  std::string to_string() const;

  Rational& operator+=(const Rational& o);
  friend Rational operator+(Rational x, const Rational& y) { return x += y; }
  /// Division by a positive integer.
  friend Rational operator/(const Rational& x, std::uint64_t k);

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& x, const Rational& y);

 private:
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 1;
};

struct TraceCheck {
  CaseId iid;
  std::vector<bool> satisfied;
  Rational fitness;
};

/// Evaluates every constraint on the activity sequence of `c`. Throws
/// kEmptyCase for an empty case.
TraceCheck declare_check(const DeclareModel& model, const Case& c);

struct FitnessReport {
  std::map<CaseId, Rational> per_trace;
  Rational aggregate;
  /// Keyed by Constraint::to_string(); constraints never violated appear
  /// with count 0.
  std::map<std::string, std::uint64_t> violations;

  friend bool operator==(const FitnessReport&, const FitnessReport&) = default;
};

/// Mean of the trace fitness values. Throws kEmptyInput on an empty list.
FitnessReport declare_aggregate(const DeclareModel& model, const std::vector<TraceCheck>& checks);

/// Deterministic JSON: traces sorted by iid, fitness both as a number and as
/// an exact "n/d" string.
std::string to_json(const FitnessReport& report);

/// Incremental conformance checking: one observe() per completed case.
class DeclareAccumulator {
 public:
  explicit DeclareAccumulator(DeclareModel model);

  void observe(const Case& c);
  /// Throws kEmptyInput if nothing has been observed.
  FitnessReport finalize() const;
  std::size_t cases_seen() const noexcept { return checks_.size(); }
  std::uint64_t footprint_bytes() const noexcept;

 private:
  DeclareModel model_;
  std::vector<TraceCheck> checks_;
};

}  // namespace confine::mining
