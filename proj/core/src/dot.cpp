#include "netident/dot.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace netident {

std::string export_dot(const NetworkModelSet& model, const std::optional<Query>& query, const IdentVerdict* verdict) {
  const NetworkGraph graph = derive_graph(model);
  std::ostringstream os;
  os << "digraph network {\n";
  if (graph.vertex_count() == 0) {
    os << "}\n";
    return os.str();
  }
  os << "  rankdir=LR;\n";

  VertexSet cut;
  std::set<std::pair<Vertex, Vertex>> path_edges;
  if (verdict != nullptr) {
    if (verdict->disconnecting_set) cut = *verdict->disconnecting_set;
    for (const auto& p : verdict->witness.paths)
      for (std::size_t k = 1; k < p.size(); ++k) path_edges.insert({p[k - 1], p[k]});
  }

  for (Vertex v = 0; v < graph.vertex_count(); ++v) {
    os << "  " << graph.name(v) << " [shape=" << (graph.is_internal(v) ? "circle" : "box");
    if (cut.contains(v)) os << ", style=filled, fillcolor=red";
    os << "];\n";
  }
  const Digraph& g = graph.digraph();
  for (Vertex u = 0; u < g.size(); ++u) {
    for (Vertex v : g.out(u)) {
      std::vector<std::string> attrs;
      const bool known = graph.is_known_edge(u, v);
      const bool blue = path_edges.contains({u, v});
      if (known) attrs.push_back(blue ? "color=\"blue:invis:blue\"" : "color=\"black:invis:black\"");
      else if (blue) attrs.push_back("color=blue");
      if (query && v == query->output &&
          std::find(query->targets.begin(), query->targets.end(), u) != query->targets.end())
        attrs.push_back("penwidth=3");
      os << "  " << graph.name(u) << " -> " << graph.name(v);
      if (!attrs.empty()) {
        os << " [";
        for (std::size_t k = 0; k < attrs.size(); ++k) os << (k ? ", " : "") << attrs[k];
        os << "]";
      }
      os << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace netident
