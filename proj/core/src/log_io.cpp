#include "confine/harness/log_io.hpp"

#include <algorithm>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "confine/error.hpp"
#include "json.hpp"

namespace confine::harness {
namespace {

std::vector<std::vector<std::string>> csv_rows(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool row_has_content = false;
  auto end_row = [&] {
    if (row_has_content || !cell.empty() || !row.empty()) {
      row.push_back(std::move(cell));
      rows.push_back(std::move(row));
    }
    row.clear();
    cell.clear();
    row_has_content = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        row_has_content = true;
        break;
      case ',':
        row.push_back(std::move(cell));
        cell.clear();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        cell += c;
    }
  }
  if (quoted) throw Error(Errc::kDecode, "unterminated quoted CSV field");
  end_row();
  return rows;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::optional<std::size_t> find_column(const std::vector<std::string>& header, std::string_view name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  const auto want = lower(name);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (lower(header[i]) == want) return i;
  }
  return std::nullopt;
}

std::string generated_id(const OrgId& prov, std::size_t n) {
  return (prov.empty() ? std::string("event") : prov) + ":" + std::to_string(n);
}

}  // namespace

LogFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = lower(path.extension().string());
  if (ext == ".csv") return LogFormat::kCsv;
  if (ext == ".xes") return LogFormat::kXes;
  throw Error(Errc::kInvalidConfig, "cannot tell the log format of " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIo, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(Errc::kIo, "write failed for " + path.string());
}

EventLog parse_csv(std::string_view text, const LoadOptions& opts) {
  const auto rows = csv_rows(text);
  if (rows.empty()) throw Error(Errc::kMissingAttribute, "CSV has no header");
  const auto& header = rows.front();
  const auto iid_col = find_column(header, opts.iid_attribute);
  const auto act_col = find_column(header, "activity");
  const auto ts_col = find_column(header, "timestamp");
  if (!iid_col) throw Error(Errc::kMissingAttribute, "no '" + opts.iid_attribute + "' column");
  if (!act_col) throw Error(Errc::kMissingAttribute, "no 'activity' column");
  if (!ts_col) throw Error(Errc::kMissingAttribute, "no 'timestamp' column");
  const auto id_col = find_column(header, "event_id");
  const auto prov_col = find_column(header, "provisioner");

  std::vector<Event> events;
  events.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size())
      throw Error(Errc::kDecode, "CSV row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                                     " fields, expected " + std::to_string(header.size()));
    Event e;
    e.iid = row[*iid_col];
    e.activity = row[*act_col];
    if (e.iid.empty()) throw Error(Errc::kMissingAttribute, "row " + std::to_string(r + 1) + " has no iid");
    if (e.activity.empty())
      throw Error(Errc::kMissingAttribute, "row " + std::to_string(r + 1) + " has no activity");
    e.timestamp = parse_timestamp(row[*ts_col]);
    e.provisioner_id = prov_col && !row[*prov_col].empty() ? row[*prov_col] : opts.provisioner_id;
    e.event_id = id_col && !row[*id_col].empty() ? row[*id_col] : generated_id(e.provisioner_id, r);
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == *iid_col || c == *act_col || c == *ts_col || c == id_col || c == prov_col) continue;
      if (!row[c].empty()) e.extras[header[c]] = row[c];
    }
    events.push_back(std::move(e));
  }
  return EventLog::from_events(std::move(events));
}

std::string to_csv(const EventLog& log) {
  std::set<std::string> extra_keys;
  for (const auto& e : log) {
    for (const auto& [k, v] : e.extras) extra_keys.insert(k);
  }
  std::string out = "case,activity,timestamp,event_id,provisioner";
  for (const auto& k : extra_keys) out += "," + csv_cell(k);
  out += "\n";
  for (const auto& e : log) {
    out += csv_cell(e.iid) + "," + csv_cell(e.activity) + "," + format_timestamp(e.timestamp) + "," +
           csv_cell(e.event_id) + "," + csv_cell(e.provisioner_id);
    for (const auto& k : extra_keys) {
      auto it = e.extras.find(k);
      out += ",";
      if (it != e.extras.end()) out += csv_cell(it->second);
    }
    out += "\n";
  }
  return out;
}

void save_log(const std::filesystem::path& path, const EventLog& log) { write_file(path, to_csv(log)); }

EventLog parse_xes(std::string_view text, const LoadOptions& opts) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(Errc::kDecode, std::string("XES: ") + e.what());
  }
  const auto log_node = tree.get_child_optional("log");
  if (!log_node) throw Error(Errc::kDecode, "XES document has no <log> element");

  auto attributes = [](const pt::ptree& node) {
    std::map<std::string, std::string> out;
    for (const auto& [tag, child] : node) {
      if (tag == "<xmlattr>" || tag == "event" || tag == "trace") continue;
      const auto key = child.get_optional<std::string>("<xmlattr>.key");
      const auto value = child.get_optional<std::string>("<xmlattr>.value");
      if (key && value) out[*key] = *value;
    }
    return out;
  };

  std::vector<Event> events;
  std::size_t n = 0;
  for (const auto& [tag, trace] : *log_node) {
    if (tag != "trace") continue;
    const auto tattrs = attributes(trace);
    auto iid = tattrs.find(opts.iid_attribute);
    if (iid == tattrs.end()) iid = tattrs.find("concept:name");
    if (iid == tattrs.end()) throw Error(Errc::kMissingAttribute, "trace without '" + opts.iid_attribute + "'");
    for (const auto& [etag, ev] : trace) {
      if (etag != "event") continue;
      ++n;
      auto attrs = attributes(ev);
      Event e;
      e.iid = iid->second;
      auto name = attrs.find("concept:name");
      if (name == attrs.end()) throw Error(Errc::kMissingAttribute, "event without concept:name in " + e.iid);
      auto ts = attrs.find("time:timestamp");
      if (ts == attrs.end()) throw Error(Errc::kMissingAttribute, "event without time:timestamp in " + e.iid);
      e.activity = name->second;
      e.timestamp = parse_timestamp(ts->second);
      attrs.erase(name);
      attrs.erase(ts);
      e.provisioner_id = opts.provisioner_id;
      if (auto id = attrs.find("event_id"); id != attrs.end()) {
        e.event_id = id->second;
        attrs.erase(id);
      } else {
        e.event_id = generated_id(e.provisioner_id, n);
      }
      e.extras = std::move(attrs);
      events.push_back(std::move(e));
    }
  }
  return EventLog::from_events(std::move(events));
}

EventLog load_log(const std::filesystem::path& path, LogFormat format, const LoadOptions& opts) {
  const auto text = read_file(path);
  return format == LogFormat::kCsv ? parse_csv(text, opts) : parse_xes(text, opts);
}

std::vector<ProvisionerRef> parse_provisioner_refs(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    std::vector<ProvisionerRef> out;
    for (const auto& r : j) {
      out.push_back({r.at("org_id").get<std::string>(), r.at("endpoint").get<std::string>(),
                     r.value("iid_attribute_label", std::string("case"))});
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kInvalidConfig, std::string("provisioner references: ") + e.what());
  }
}

std::string to_json(const std::vector<ProvisionerRef>& refs) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : refs) {
    j.push_back({{"org_id", r.org_id}, {"endpoint", r.endpoint}, {"iid_attribute_label", r.iid_attribute_label}});
  }
  return j.dump(2) + "\n";
}

std::map<OrgId, LogPartition> load_partitions(const std::vector<ProvisionerRef>& refs,
                                              const std::filesystem::path& base) {
  std::map<OrgId, LogPartition> out;
  for (const auto& r : refs) {
    if (!r.endpoint.starts_with("file:"))
      throw Error(Errc::kInvalidConfig, r.org_id + ": only file: endpoints can be loaded locally");
    std::filesystem::path p = r.endpoint.substr(5);
    if (p.is_relative()) p = base / p;
    out[r.org_id] = load_log(p, format_from_path(p), LoadOptions{r.iid_attribute_label, r.org_id});
  }
  return out;
}

}  // namespace confine::harness
