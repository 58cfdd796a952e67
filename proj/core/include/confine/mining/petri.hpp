#pragma once

#include <string>
#include <vector>

namespace confine::mining {

struct Place {
  std::string id;
  friend bool operator==(const Place&, const Place&) = default;
};

struct Transition {
  std::string id;
  std::string label;
  bool silent = false;
  friend bool operator==(const Transition&, const Transition&) = default;
};

struct Arc {
  std::string source;
  std::string target;
  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Petri net with a designated source and sink place. Node and arc vectors
/// are kept in a canonical order so that serialization is deterministic.
struct WorkflowNet {
  std::vector<Place> places;
  std::vector<Transition> transitions;
  std::vector<Arc> arcs;
  std::string source_place;
  std::string sink_place;

  std::vector<std::string> visible_labels() const;

  friend bool operator==(const WorkflowNet&, const WorkflowNet&) = default;
};

/// Checks the workflow-net conditions: source is the only place with an empty
/// preset, sink the only one with an empty postset, and every node lies on a
/// path from source to sink. On failure, `why` (if given) names the problem.
bool is_workflow_net(const WorkflowNet& net, std::string* why = nullptr);

/// PNML (pnmlcoremodel grammar), initial marking on the source place and a
/// ProM-style final marking on the sink.
std::string to_pnml(const WorkflowNet& net);

}  // namespace confine::mining
