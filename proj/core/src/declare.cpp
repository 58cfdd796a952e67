#include "confine/mining/declare.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <utility>

#include "confine/error.hpp"
#include "json.hpp"

namespace confine::mining {
namespace {

constexpr std::array<std::pair<DeclareTemplate, std::string_view>, 12> kNames{{
    {DeclareTemplate::kExistence, "Existence"},
    {DeclareTemplate::kAbsence, "Absence"},
    {DeclareTemplate::kExactlyOne, "ExactlyOne"},
    {DeclareTemplate::kInit, "Init"},
    {DeclareTemplate::kEnd, "End"},
    {DeclareTemplate::kRespondedExistence, "RespondedExistence"},
    {DeclareTemplate::kResponse, "Response"},
    {DeclareTemplate::kPrecedence, "Precedence"},
    {DeclareTemplate::kSuccession, "Succession"},
    {DeclareTemplate::kChainResponse, "ChainResponse"},
    {DeclareTemplate::kChainPrecedence, "ChainPrecedence"},
    {DeclareTemplate::kNotSuccession, "NotSuccession"},
}};

// Every a is eventually followed by b. With a == b the last a is never
// followed, so only traces without a satisfy it.
bool response(const std::vector<ActivityLabel>& t, const ActivityLabel& a, const ActivityLabel& b) {
  bool pending = false;
  for (const auto& x : t) {
    if (x == a)
      pending = true;
    else if (x == b)
      pending = false;
  }
  return !pending;
}

// Every b is preceded by an earlier a.
bool precedence(const std::vector<ActivityLabel>& t, const ActivityLabel& a, const ActivityLabel& b) {
  for (const auto& x : t) {
    if (x == b) return false;
    if (x == a) return true;
  }
  return true;
}

}  // namespace

std::string_view to_string(DeclareTemplate t) noexcept {
  for (const auto& [k, name] : kNames) {
    if (k == t) return name;
  }
  return "?";
}

DeclareTemplate declare_template_from_string(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  throw Error(Errc::kInvalidConfig, "unknown Declare template '" + std::string(name) + "'");
}

bool is_binary(DeclareTemplate t) noexcept {
  switch (t) {
    case DeclareTemplate::kExistence:
    case DeclareTemplate::kAbsence:
    case DeclareTemplate::kExactlyOne:
    case DeclareTemplate::kInit:
    case DeclareTemplate::kEnd:
      return false;
    default:
      return true;
  }
}

std::string Constraint::to_string() const {
  std::string s(mining::to_string(tmpl));
  s += '(';
  s += a;
  if (b) {
    s += ',';
    s += *b;
  }
  s += ')';
  return s;
}

void validate(const DeclareModel& model) {
  if (model.constraints.empty()) throw Error(Errc::kInvalidConfig, "Declare model has no constraints");
  for (const auto& c : model.constraints) {
    if (is_binary(c.tmpl) != c.b.has_value())
      throw Error(Errc::kInvalidConfig, "wrong number of parameters in " + c.to_string());
    if (!model.alphabet.contains(c.a) || (c.b && !model.alphabet.contains(*c.b)))
      throw Error(Errc::kInvalidConfig, c.to_string() + " uses an activity outside the alphabet");
  }
}

DeclareModel declare_model_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kInvalidConfig, std::string("Declare model: ") + e.what());
  }
  DeclareModel model;
  try {
    for (const auto& c : j.at("constraints")) {
      Constraint k{declare_template_from_string(c.at("template").get<std::string>()),
                   c.at("activation").get<std::string>(), std::nullopt};
      if (c.contains("target")) k.b = c.at("target").get<std::string>();
      model.constraints.push_back(std::move(k));
    }
    if (j.contains("alphabet")) {
      for (const auto& a : j.at("alphabet")) model.alphabet.insert(a.get<std::string>());
    } else {
      for (const auto& c : model.constraints) {
        model.alphabet.insert(c.a);
        if (c.b) model.alphabet.insert(*c.b);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kInvalidConfig, std::string("Declare model: ") + e.what());
  }
  validate(model);
  return model;
}

std::string declare_model_to_json(const DeclareModel& model) {
  nlohmann::ordered_json j;
  j["alphabet"] = model.alphabet;
  auto& cs = j["constraints"] = nlohmann::ordered_json::array();
  for (const auto& c : model.constraints) {
    nlohmann::ordered_json o;
    o["template"] = std::string(to_string(c.tmpl));
    o["activation"] = c.a;
    if (c.b) o["target"] = *c.b;
    cs.push_back(std::move(o));
  }
  return j.dump(2) + "\n";
}

bool declare_holds(const Constraint& c, const std::vector<ActivityLabel>& t) {
  const auto& a = c.a;
  auto count = [&](const ActivityLabel& x) { return std::count(t.begin(), t.end(), x); };
  switch (c.tmpl) {
    case DeclareTemplate::kExistence:
      return count(a) >= 1;
    case DeclareTemplate::kAbsence:
      return count(a) == 0;
    case DeclareTemplate::kExactlyOne:
      return count(a) == 1;
    case DeclareTemplate::kInit:
      return !t.empty() && t.front() == a;
    case DeclareTemplate::kEnd:
      return !t.empty() && t.back() == a;
    default:
      break;
  }
  const auto& b = c.b.value();
  switch (c.tmpl) {
    case DeclareTemplate::kRespondedExistence:
      return count(a) == 0 || count(b) >= 1;
    case DeclareTemplate::kResponse:
      return response(t, a, b);
    case DeclareTemplate::kPrecedence:
      return precedence(t, a, b);
    case DeclareTemplate::kSuccession:
      return response(t, a, b) && precedence(t, a, b);
    case DeclareTemplate::kChainResponse:
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] == a && (i + 1 == t.size() || t[i + 1] != b)) return false;
      }
      return true;
    case DeclareTemplate::kChainPrecedence:
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] == b && (i == 0 || t[i - 1] != a)) return false;
      }
      return true;
    case DeclareTemplate::kNotSuccession: {
      bool seen_a = false;
      for (const auto& x : t) {
        if (seen_a && x == b) return false;
        if (x == a) seen_a = true;
      }
      return true;
    }
    default:
      return false;
  }
}

Rational::Rational(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw Error(Errc::kInvalidConfig, "zero denominator");
  const auto g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

std::string Rational::to_string() const { return std::to_string(num_) + "/" + std::to_string(den_); }

Rational& Rational::operator+=(const Rational& o) {
  const auto g = std::gcd(den_, o.den_);
  const auto l = den_ / g * o.den_;
  *this = Rational(num_ * (l / den_) + o.num_ * (l / o.den_), l);
  return *this;
}

Rational operator/(const Rational& x, std::uint64_t k) {
  if (k == 0) throw Error(Errc::kInvalidConfig, "division by zero");
  const auto g = std::gcd(x.num_, k);
  return Rational(x.num_ / g, x.den_ * (k / g));
}

std::strong_ordering operator<=>(const Rational& x, const Rational& y) {
  __extension__ using Wide = unsigned __int128;
  const auto l = static_cast<Wide>(x.num_) * y.den_;
  const auto r = static_cast<Wide>(y.num_) * x.den_;
  return l <=> r;
}

TraceCheck declare_check(const DeclareModel& model, const Case& c) {
  if (c.empty()) throw Error(Errc::kEmptyCase, "cannot check an empty case");
  if (model.constraints.empty()) throw Error(Errc::kInvalidConfig, "Declare model has no constraints");
  const auto trace = trace_of(c);
  TraceCheck out{c[0].iid, {}, {}};
  out.satisfied.reserve(model.constraints.size());
  std::uint64_t ok = 0;
  for (const auto& k : model.constraints) {
    const bool holds = declare_holds(k, trace);
    out.satisfied.push_back(holds);
    ok += holds ? 1 : 0;
  }
  out.fitness = Rational(ok, model.constraints.size());
  return out;
}

FitnessReport declare_aggregate(const DeclareModel& model, const std::vector<TraceCheck>& checks) {
  if (checks.empty()) throw Error(Errc::kEmptyInput, "no trace to aggregate");
  FitnessReport r;
  for (const auto& k : model.constraints) r.violations[k.to_string()] = 0;
  Rational sum;
  for (const auto& c : checks) {
    r.per_trace[c.iid] = c.fitness;
    sum += c.fitness;
    for (std::size_t i = 0; i < c.satisfied.size() && i < model.constraints.size(); ++i) {
      if (!c.satisfied[i]) ++r.violations[model.constraints[i].to_string()];
    }
  }
  r.aggregate = sum / checks.size();
  return r;
}

std::string to_json(const FitnessReport& report) {
  nlohmann::ordered_json j;
  j["aggregate"] = report.aggregate.to_double();
  j["aggregate_exact"] = report.aggregate.to_string();
  auto& traces = j["per_trace"] = nlohmann::ordered_json::array();
  for (const auto& [iid, f] : report.per_trace) {
    traces.push_back({{"case", iid}, {"fitness", f.to_double()}, {"fitness_exact", f.to_string()}});
  }
  auto& v = j["violations"] = nlohmann::ordered_json::object();
  for (const auto& [k, n] : report.violations) v[k] = n;
  return j.dump(2) + "\n";
}

DeclareAccumulator::DeclareAccumulator(DeclareModel model) : model_(std::move(model)) {
  validate(model_);
}

void DeclareAccumulator::observe(const Case& c) { checks_.push_back(declare_check(model_, c)); }

FitnessReport DeclareAccumulator::finalize() const { return declare_aggregate(model_, checks_); }

std::uint64_t DeclareAccumulator::footprint_bytes() const noexcept {
  std::uint64_t n = sizeof(*this);
  for (const auto& c : checks_) n += sizeof(TraceCheck) + c.iid.size() + (c.satisfied.size() + 7) / 8;
  return n;
}

}  // namespace confine::mining
