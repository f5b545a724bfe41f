#include "netident/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace netident {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string model_digest(const NetworkModelSet& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_model(model)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json signal_list(const NetworkGraph& graph, const VertexSet& vertices) {
  json out = json::array();
  for (Vertex v : vertices) out.push_back(graph.name(v));
  return out;
}

json path_list(const NetworkGraph& graph, const PathFamily& family) {
  json out = json::array();
  for (const auto& p : family.paths) {
    json path = json::array();
    for (Vertex v : p) path.push_back(graph.name(v));
    out.push_back(std::move(path));
  }
  return out;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json to_json(const IdentVerdict& verdict, const NetworkGraph& graph) {
  json targets = json::array();
  for (int t : verdict.query.targets) targets.push_back(signal_name(internal(t)));
  json j{{"method", method_name(verdict.method)},
         {"output", signal_name(internal(verdict.query.output))},
         {"targets", targets},
         {"identifiable", verdict.identifiable},
         {"certificate",
          {{"targets", verdict.certificate.targets},
           {"b_targets", verdict.certificate.b_targets},
           {"b_all_inputs", verdict.certificate.b_all_inputs},
           {"b_other_inputs", verdict.certificate.b_other_inputs}}}};
  if (verdict.method != Method::Algebraic) j["witness_paths"] = path_list(graph, verdict.witness);
  if (verdict.disconnecting_set) {
    j["disconnecting_set"] = signal_list(graph, *verdict.disconnecting_set);
    j["b_cut"] = verdict.b_cut;
  }
  if (!verdict.samples.empty()) {
    json samples = json::array();
    for (const auto& s : verdict.samples)
      samples.push_back({{"z", complex_json(s.z)},
                         {"rank_targets", s.rank_targets},
                         {"rank_all", s.rank_all},
                         {"rank_others", s.rank_others},
                         {"identifiable", s.identifiable},
                         {"F_form_identifiable", s.F_form_identifiable}});
    j["samples"] = std::move(samples);
  }
  return j;
}

json to_json(const AllocationPlan& plan, const NetworkGraph& graph) {
  json signals = json::array();
  for (const auto& s : plan.new_signals)
    signals.push_back({{"vertex", signal_name(internal(s.vertex))}, {"r_index", s.r_index + 1}});
  return {{"schema_version", kReportSchemaVersion},
          {"output", signal_name(internal(plan.query.output))},
          {"new_signals", signals},
          {"disconnecting_set", signal_list(graph, plan.disconnecting_set)},
          {"reused_paths", path_list(graph, plan.reused_paths)},
          {"bound", plan.bound},
          {"verified", plan.verified}};
}

json to_json(const GenericRankReport& report) {
  json seeds = json::array();
  json ranks = json::array();
  for (const auto& t : report.details) {
    seeds.push_back(t.seed);
    ranks.push_back(t.numeric_rank);
  }
  return {{"graph_rank", report.graph_rank},
          {"trials", report.trials},
          {"agreements", report.agreements},
          {"fraction", report.fraction()},
          {"assumption5_passed", report.assumption5_passed},
          {"numeric_ranks", ranks},
          {"trial_seeds", seeds}};
}

json to_json(const Assumption5Report& report) {
  json violations = json::array();
  for (const auto& v : report.violations) {
    json rows = json::array(), cols = json::array();
    for (int r : v.rows) rows.push_back(signal_name(internal(r)));
    for (auto c : v.cols) cols.push_back(signal_name(c));
    violations.push_back({{"rows", rows},
                          {"cols", cols},
                          {"structural_rank", v.structural_rank},
                          {"numeric_rank", v.numeric_rank}});
  }
  return {{"passed", report.passed},
          {"vacuous", report.vacuous},
          {"verified_up_to", report.exhaustive_up_to},
          {"random_probes", report.random_probes},
          {"violation_count", report.violation_count},
          {"violations", violations}};
}

json to_json(const ModelDiagnostics& d) {
  json loop = json::array();
  for (int v : d.algebraic_loop) loop.push_back(signal_name(internal(v)));
  return {{"ok", d.ok()},
          {"hollow", d.hollow},
          {"feedthrough_consistent", d.feedthrough_consistent},
          {"algebraic_loop_free", d.algebraic_loop_free},
          {"algebraic_loop", loop},
          {"declared",
           {{"independent_parametrization", d.declared.independent_parametrization},
            {"open_set", d.declared.open_set}}},
          {"assumption5", to_json(d.assumption5)},
          {"violations", d.violations}};
}

json to_json(const IndirectSetup& setup) {
  json xbar = json::array(), cut = json::array(), measured = json::array();
  for (auto x : setup.xbar) xbar.push_back(signal_name(x));
  for (auto d : setup.cut_signals) cut.push_back(signal_name(d));
  for (int w : setup.measured) measured.push_back(signal_name(internal(w)));
  return {{"xbar", xbar}, {"disconnecting_set", cut}, {"measured", measured}, {"b_cut", setup.b_cut}};
}

}  // namespace netident
