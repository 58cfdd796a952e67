#include "confine/mining/petri.hpp"

#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace confine::mining {
namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::set<std::string> reach(const std::string& root,
                            const std::map<std::string, std::set<std::string>>& adj) {
  std::set<std::string> seen{root};
  std::deque<std::string> queue{root};
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    auto it = adj.find(cur);
    if (it == adj.end()) continue;
    for (const auto& n : it->second) {
      if (seen.insert(n).second) queue.push_back(n);
    }
  }
  return seen;
}

}  // namespace

std::vector<std::string> WorkflowNet::visible_labels() const {
  std::set<std::string> labels;
  for (const auto& t : transitions) {
    if (!t.silent) labels.insert(t.label);
  }
  return {labels.begin(), labels.end()};
}

bool is_workflow_net(const WorkflowNet& net, std::string* why) {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  std::set<std::string> places, transitions, nodes;
  for (const auto& p : net.places) {
    if (!nodes.insert(p.id).second) return fail("duplicate node id " + p.id);
    places.insert(p.id);
  }
  for (const auto& t : net.transitions) {
    if (!nodes.insert(t.id).second) return fail("duplicate node id " + t.id);
    transitions.insert(t.id);
  }
  if (!places.contains(net.source_place)) return fail("source place missing");
  if (!places.contains(net.sink_place)) return fail("sink place missing");

  std::map<std::string, std::set<std::string>> fwd, bwd;
  for (const auto& a : net.arcs) {
    const bool pt = places.contains(a.source) && transitions.contains(a.target);
    const bool tp = transitions.contains(a.source) && places.contains(a.target);
    if (!pt && !tp) return fail("arc " + a.source + "->" + a.target + " is not bipartite");
    fwd[a.source].insert(a.target);
    bwd[a.target].insert(a.source);
  }
  for (const auto& p : places) {
    const bool no_in = !bwd.contains(p);
    const bool no_out = !fwd.contains(p);
    if (no_in && p != net.source_place) return fail("place " + p + " has an empty preset");
    if (no_out && p != net.sink_place) return fail("place " + p + " has an empty postset");
  }
  if (bwd.contains(net.source_place)) return fail("source place has input arcs");
  if (fwd.contains(net.sink_place)) return fail("sink place has output arcs");

  const auto from_source = reach(net.source_place, fwd);
  const auto to_sink = reach(net.sink_place, bwd);
  for (const auto& n : nodes) {
    if (!from_source.contains(n)) return fail(n + " is not reachable from the source");
    if (!to_sink.contains(n)) return fail(n + " cannot reach the sink");
  }
  return true;
}

std::string to_pnml(const WorkflowNet& net) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<pnml>\n"
     << "  <net id=\"net1\" type=\"http://www.pnml.org/version-2009/grammar/pnmlcoremodel\">\n"
     << "    <name><text>heuristics net</text></name>\n"
     << "    <page id=\"n0\">\n";
  for (const auto& p : net.places) {
    os << "      <place id=\"" << xml_escape(p.id) << "\">\n"
       << "        <name><text>" << xml_escape(p.id) << "</text></name>\n";
    if (p.id == net.source_place) os << "        <initialMarking><text>1</text></initialMarking>\n";
    os << "      </place>\n";
  }
  for (const auto& t : net.transitions) {
    os << "      <transition id=\"" << xml_escape(t.id) << "\">\n"
       << "        <name><text>" << xml_escape(t.label) << "</text></name>\n";
    if (t.silent) {
      os << "        <toolspecific tool=\"ProM\" version=\"6.4\" activity=\"$invisible$\" "
            "localNodeID=\""
         << xml_escape(t.id) << "\"/>\n";
    }
    os << "      </transition>\n";
  }
  std::size_t i = 0;
  for (const auto& a : net.arcs) {
    os << "      <arc id=\"a" << ++i << "\" source=\"" << xml_escape(a.source) << "\" target=\""
       << xml_escape(a.target) << "\"/>\n";
  }
  os << "    </page>\n"
     << "    <finalmarkings>\n"
     << "      <marking>\n"
     << "        <place idref=\"" << xml_escape(net.sink_place) << "\"><text>1</text></place>\n"
     << "      </marking>\n"
     << "    </finalmarkings>\n"
     << "  </net>\n"
     << "</pnml>\n";
  return os.str();
}

}  // namespace confine::mining
