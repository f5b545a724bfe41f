#include "netident/model.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "netident/error.hpp"
#include "netident/ident.hpp"

namespace netident {

using nlohmann::json;

std::string signal_name(SignalRef s) {
  const char prefix = s.kind == SignalKind::Internal ? 'w' : s.kind == SignalKind::Excitation ? 'r' : 'e';
  return prefix + std::to_string(s.index + 1);
}

SignalRef parse_signal_name(std::string_view name) {
  if (name.size() < 2) throw std::invalid_argument("bad signal name '" + std::string(name) + "'");
  SignalKind kind;
  switch (name.front()) {
    case 'w': kind = SignalKind::Internal; break;
    case 'r': kind = SignalKind::Excitation; break;
    case 'e': kind = SignalKind::Noise; break;
    default: throw std::invalid_argument("bad signal name '" + std::string(name) + "'");
  }
  int number = 0;
  const auto* first = name.data() + 1;
  const auto* last = name.data() + name.size();
  auto [ptr, ec] = std::from_chars(first, last, number);
  if (ec != std::errc{} || ptr != last || number < 1)
    throw std::invalid_argument("bad signal name '" + std::string(name) + "'");
  return {kind, number - 1};
}

Block EdgeEntry::block() const noexcept {
  switch (source.kind) {
    case SignalKind::Internal: return Block::G;
    case SignalKind::Excitation: return Block::R;
    case SignalKind::Noise: break;
  }
  return Block::H;
}

bool EdgeEntry::has_feedthrough() const {
  if (const auto* p = std::get_if<Parametrized>(&status)) return !p->strictly_proper;
  return !std::get<Known>(status).tf.is_strictly_proper();
}

namespace {

const char* block_name(Block b) { return b == Block::G ? "G" : b == Block::R ? "R" : "H"; }

std::string entry_label(const EdgeEntry& e) {
  return std::string(block_name(e.block())) + "(" + std::to_string(e.target + 1) + "," +
         std::to_string(e.source.index + 1) + ")";
}

int column_count(int L, int K, int p, SignalKind kind) {
  return kind == SignalKind::Internal ? L : kind == SignalKind::Excitation ? K : p;
}

}  // namespace

NetworkModelSet NetworkModelSet::make(int L, int K, int p, std::vector<EdgeEntry> entries,
                                      FeedthroughMode mode, DeclaredAssumptions declared) {
  if (L < 0 || K < 0 || p < 0) throw ModelError(ModelErrorKind::Schema, "negative signal count");
  std::set<std::pair<int, SignalRef>> seen;
  std::vector<bool> noise_used(static_cast<std::size_t>(p), false);
  for (const auto& e : entries) {
    const std::string label = entry_label(e);
    if (e.target < 0 || e.target >= L) throw ModelError(ModelErrorKind::Schema, label + ": row out of range");
    if (e.source.index < 0 || e.source.index >= column_count(L, K, p, e.source.kind))
      throw ModelError(ModelErrorKind::Schema, label + ": column out of range");
    if (!seen.insert({e.target, e.source}).second)
      throw ModelError(ModelErrorKind::Schema, label + ": duplicate entry");
    if (e.block() == Block::G && e.source.index == e.target)
      throw ModelError(ModelErrorKind::SelfLoop, label + ": G must have a zero diagonal");
    if (const auto* k = std::get_if<Known>(&e.status)) {
      if (k->tf.is_zero())
        throw ModelError(ModelErrorKind::Schema, label + ": known entry is identically zero; omit it instead");
      if (!k->tf.is_stable()) throw ModelError(ModelErrorKind::UnstableTransfer, label + ": known transfer is unstable");
    }
    if (mode == FeedthroughMode::StrictlyProper && e.block() == Block::G && e.has_feedthrough())
      throw ModelError(ModelErrorKind::StrictlyProperFlag,
                       label + ": feedthrough_mode strictly_proper requires strictly proper G entries");
    if (e.block() == Block::H) noise_used[static_cast<std::size_t>(e.source.index)] = true;
  }
  for (int k = 0; k < p; ++k)
    if (!noise_used[static_cast<std::size_t>(k)])
      throw ModelError(ModelErrorKind::Schema, "noise column e" + std::to_string(k + 1) + " has no entry");

  std::sort(entries.begin(), entries.end(), [](const EdgeEntry& a, const EdgeEntry& b) {
    return std::tie(a.source.kind, a.target, a.source.index) < std::tie(b.source.kind, b.target, b.source.index);
  });
  NetworkModelSet m;
  m.L_ = L;
  m.K_ = K;
  m.p_ = p;
  m.entries_ = std::move(entries);
  m.mode_ = mode;
  m.declared_ = declared;
  return m;
}

const EdgeEntry* NetworkModelSet::find(int target, SignalRef source) const {
  for (const auto& e : entries_)
    if (e.target == target && e.source == source) return &e;
  return nullptr;
}

bool NetworkModelSet::has_known_modules() const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [](const EdgeEntry& e) { return e.block() == Block::G && e.is_known(); });
}

NetworkModelSet NetworkModelSet::with_excitations(const std::vector<int>& vertices) const {
  auto entries = entries_;
  int k = K_;
  for (int v : vertices) entries.push_back({v, excitation(k++), Known{RationalTF::constant(1.0)}});
  return make(L_, k, p_, std::move(entries), mode_, declared_);
}

NetworkGraph::NetworkGraph(int L, int K, int p) : L_(L), K_(K), p_(p), graph_(L + K + p) {}

Vertex NetworkGraph::vertex(SignalRef s) const {
  if (s.index < 0 || s.index >= column_count(L_, K_, p_, s.kind))
    throw std::out_of_range("signal " + signal_name(s) + " not in graph");
  switch (s.kind) {
    case SignalKind::Internal: return s.index;
    case SignalKind::Excitation: return L_ + s.index;
    case SignalKind::Noise: break;
  }
  return L_ + K_ + s.index;
}

SignalRef NetworkGraph::signal(Vertex v) const {
  if (v < 0 || v >= vertex_count()) throw std::out_of_range("vertex out of range");
  if (v < L_) return internal(v);
  if (v < L_ + K_) return excitation(v - L_);
  return noise(v - L_ - K_);
}

VertexSet NetworkGraph::vertices(const std::vector<SignalRef>& signals) const {
  VertexSet s;
  for (auto x : signals) s.insert(vertex(x));
  return s;
}

VertexSet NetworkGraph::internal_vertices(const std::vector<int>& indices) const {
  VertexSet s;
  for (int i : indices) s.insert(vertex(internal(i)));
  return s;
}

VertexSet NetworkGraph::all_internal() const {
  VertexSet s;
  for (int i = 0; i < L_; ++i) s.insert(i);
  return s;
}

void NetworkGraph::add_edge(SignalRef from, SignalRef to_internal, bool known) {
  const Vertex u = vertex(from);
  const Vertex v = vertex(to_internal);
  graph_.add_edge(u, v);
  if (known) known_.insert({u, v});
}

bool NetworkGraph::is_known_edge(Vertex from, Vertex to) const { return known_.contains({from, to}); }

std::vector<int> compute_Wj(const NetworkModelSet& model, int j) {
  std::vector<int> w;
  for (const auto& e : model.entries())
    if (e.target == j && e.block() == Block::G && e.is_parametrized()) w.push_back(e.source.index);
  std::sort(w.begin(), w.end());
  return w;
}

std::vector<SignalRef> compute_Xj(const NetworkModelSet& model, int j) {
  std::vector<SignalRef> x;
  for (int k = 0; k < model.K(); ++k) {
    const auto* e = model.find(j, excitation(k));
    if (e == nullptr || e->is_known()) x.push_back(excitation(k));
  }
  for (int k = 0; k < model.p(); ++k) {
    const auto* e = model.find(j, noise(k));
    if (e == nullptr || e->is_known()) x.push_back(noise(k));
  }
  return x;
}

NetworkGraph derive_graph(const NetworkModelSet& model) {
  NetworkGraph g(model.L(), model.K(), model.p());
  for (const auto& e : model.entries()) g.add_edge(e.source, internal(e.target), e.is_known());
  return g;
}

void validate_query(const NetworkModelSet& model, const Query& query) {
  if (query.output < 0 || query.output >= model.L())
    throw QueryError("output w" + std::to_string(query.output + 1) + " does not exist");
  if (query.targets.empty()) throw QueryError("no target modules given");
  const auto wj = compute_Wj(model, query.output);
  std::set<int> seen;
  for (int t : query.targets) {
    if (!seen.insert(t).second) throw QueryError("duplicate target w" + std::to_string(t + 1));
    if (!std::binary_search(wj.begin(), wj.end(), t))
      throw QueryError("G(" + std::to_string(query.output + 1) + "," + std::to_string(t + 1) +
                       ") is not an unknown module into w" + std::to_string(query.output + 1));
  }
}

namespace {

RationalTF parse_tf(const json& tf, const std::string& label) {
  if (!tf.is_object() || !tf.contains("num") || !tf.contains("den"))
    throw ModelError(ModelErrorKind::Schema, label + ": known entry needs tf.num and tf.den");
  std::vector<double> num, den;
  try {
    num = tf.at("num").get<std::vector<double>>();
    den = tf.at("den").get<std::vector<double>>();
  } catch (const json::exception& ex) {
    throw ModelError(ModelErrorKind::Schema, label + ": " + ex.what());
  }
  if (num.empty() || den.empty()) throw ModelError(ModelErrorKind::Schema, label + ": empty coefficient list");
  if (den.front() == 0.0)
    throw ModelError(ModelErrorKind::ImproperTransfer, label + ": leading denominator coefficient is zero");
  return RationalTF(std::move(num), std::move(den));
}

int get_int(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_number_integer())
    throw ModelError(ModelErrorKind::Schema, where + ": missing or non-integer '" + key + "'");
  return obj.at(key).get<int>();
}

}  // namespace

NetworkModelSet parse_model(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& ex) {
    throw ModelError(ModelErrorKind::Schema, std::string("invalid JSON: ") + ex.what());
  }
  if (!doc.is_object()) throw ModelError(ModelErrorKind::Schema, "model document must be an object");
  if (doc.contains("schema_version") && doc.at("schema_version") != 1)
    throw ModelError(ModelErrorKind::Schema, "unsupported schema_version");
  const int L = get_int(doc, "L", "model");
  const int K = doc.contains("K") ? get_int(doc, "K", "model") : 0;
  const int p = doc.contains("p") ? get_int(doc, "p", "model") : 0;

  FeedthroughMode mode = FeedthroughMode::StrictlyProper;
  if (doc.contains("feedthrough_mode")) {
    const auto& m = doc.at("feedthrough_mode");
    if (m == "strictly_proper") mode = FeedthroughMode::StrictlyProper;
    else if (m == "no_algebraic_loops") mode = FeedthroughMode::NoAlgebraicLoops;
    else throw ModelError(ModelErrorKind::Schema, "unknown feedthrough_mode");
  }

  DeclaredAssumptions declared;
  if (doc.contains("assumptions")) {
    const auto& a = doc.at("assumptions");
    if (!a.is_object()) throw ModelError(ModelErrorKind::Schema, "'assumptions' must be an object");
    declared.independent_parametrization = a.value("independent_parametrization", true);
    declared.open_set = a.value("open_set", true);
  }

  std::vector<EdgeEntry> entries;
  const json empty = json::array();
  const json& list = doc.contains("entries") ? doc.at("entries") : empty;
  if (!list.is_array()) throw ModelError(ModelErrorKind::Schema, "'entries' must be an array");
  for (std::size_t n = 0; n < list.size(); ++n) {
    const json& item = list[n];
    const std::string where = "entry " + std::to_string(n);
    if (!item.is_object()) throw ModelError(ModelErrorKind::Schema, where + ": not an object");
    const std::string matrix = item.value("matrix", "");
    SignalKind kind;
    if (matrix == "G") kind = SignalKind::Internal;
    else if (matrix == "R") kind = SignalKind::Excitation;
    else if (matrix == "H") kind = SignalKind::Noise;
    else throw ModelError(ModelErrorKind::Schema, where + ": matrix must be G, R or H");
    EdgeEntry e;
    e.target = get_int(item, "row", where) - 1;
    e.source = {kind, get_int(item, "col", where) - 1};
    const std::string label = where + " " + entry_label(e);
    const std::string status = item.value("status", "");
    const bool has_flag = item.contains("strictly_proper");
    if (has_flag && !item.at("strictly_proper").is_boolean())
      throw ModelError(ModelErrorKind::Schema, label + ": strictly_proper must be a boolean");
    if (status == "parametrized") {
      const bool flag = has_flag ? item.at("strictly_proper").get<bool>() : kind == SignalKind::Internal;
      e.status = Parametrized{flag};
    } else if (status == "known") {
      if (!item.contains("tf")) throw ModelError(ModelErrorKind::Schema, label + ": known entry needs 'tf'");
      RationalTF tf = parse_tf(item.at("tf"), label);
      if (has_flag && item.at("strictly_proper").get<bool>() && !tf.is_strictly_proper())
        throw ModelError(ModelErrorKind::StrictlyProperFlag,
                         label + ": flagged strictly proper but has a direct term");
      e.status = Known{std::move(tf)};
    } else {
      throw ModelError(ModelErrorKind::Schema, label + ": status must be parametrized or known");
    }
    entries.push_back(std::move(e));
  }
  return NetworkModelSet::make(L, K, p, std::move(entries), mode, declared);
}

std::string serialize_model(const NetworkModelSet& model) {
  json doc;
  doc["schema_version"] = 1;
  doc["L"] = model.L();
  doc["K"] = model.K();
  doc["p"] = model.p();
  doc["feedthrough_mode"] =
      model.feedthrough_mode() == FeedthroughMode::StrictlyProper ? "strictly_proper" : "no_algebraic_loops";
  doc["assumptions"] = {{"independent_parametrization", model.declared().independent_parametrization},
                        {"open_set", model.declared().open_set}};
  json list = json::array();
  for (const auto& e : model.entries()) {
    json item{{"matrix", block_name(e.block())}, {"row", e.target + 1}, {"col", e.source.index + 1}};
    if (const auto* p = std::get_if<Parametrized>(&e.status)) {
      item["status"] = "parametrized";
      item["strictly_proper"] = p->strictly_proper;
    } else {
      const auto& tf = std::get<Known>(e.status).tf;
      item["status"] = "known";
      item["tf"] = {{"num", tf.numerator()}, {"den", tf.denominator()}};
    }
    list.push_back(std::move(item));
  }
  doc["entries"] = std::move(list);
  return doc.dump(2) + "\n";
}

namespace {

// One directed cycle among internal vertices joined by feedthrough entries, if any.
std::vector<int> find_feedthrough_cycle(const NetworkModelSet& model) {
  const int L = model.L();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(L));
  for (const auto& e : model.entries())
    if (e.block() == Block::G && e.has_feedthrough())
      adj[static_cast<std::size_t>(e.source.index)].push_back(e.target);
  std::vector<int> color(static_cast<std::size_t>(L), 0), parent(static_cast<std::size_t>(L), -1);
  std::vector<int> cycle;
  std::function<bool(int)> dfs = [&](int u) {
    color[static_cast<std::size_t>(u)] = 1;
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (color[static_cast<std::size_t>(v)] == 1) {
        for (int x = u; x != v; x = parent[static_cast<std::size_t>(x)]) cycle.push_back(x);
        cycle.push_back(v);
        std::reverse(cycle.begin(), cycle.end());
        return true;
      }
      if (color[static_cast<std::size_t>(v)] == 0) {
        parent[static_cast<std::size_t>(v)] = u;
        if (dfs(v)) return true;
      }
    }
    color[static_cast<std::size_t>(u)] = 2;
    return false;
  };
  for (int s = 0; s < L; ++s)
    if (color[static_cast<std::size_t>(s)] == 0 && dfs(s)) break;
  return cycle;
}

}  // namespace

ModelDiagnostics validate_assumptions(const NetworkModelSet& model, const Assumption5Options& options) {
  ModelDiagnostics d;
  for (const auto& e : model.entries()) {
    if (e.block() == Block::G && e.source.index == e.target) {
      d.hollow = false;
      d.violations.push_back("G has a nonzero diagonal entry at w" + std::to_string(e.target + 1));
    }
    if (model.feedthrough_mode() == FeedthroughMode::StrictlyProper && e.block() == Block::G &&
        e.has_feedthrough()) {
      d.feedthrough_consistent = false;
      d.violations.push_back(entry_label(e) + " has a direct term in strictly_proper mode");
    }
  }
  d.algebraic_loop = find_feedthrough_cycle(model);
  if (!d.algebraic_loop.empty()) {
    d.algebraic_loop_free = false;
    std::string text = "algebraic loop through";
    for (int v : d.algebraic_loop) text += " w" + std::to_string(v + 1);
    d.violations.push_back(text);
  }
  d.declared = model.declared();
  if (!d.declared.independent_parametrization)
    d.violations.push_back("parametrization not declared independent across modules");
  if (!d.declared.open_set) d.violations.push_back("parameter set not declared open in the structure class");
  d.assumption5 = check_assumption5(model, options.size_cap, options.random_probes, options.seed);
  for (const auto& v : d.assumption5.violations) {
    std::string text = "fixed submatrix rows {";
    for (std::size_t k = 0; k < v.rows.size(); ++k) text += (k ? "," : "") + std::string("w") + std::to_string(v.rows[k] + 1);
    text += "} cols {";
    for (std::size_t k = 0; k < v.cols.size(); ++k) text += (k ? "," : "") + signal_name(v.cols[k]);
    text += "} has numeric rank " + std::to_string(v.numeric_rank) + " < structural rank " +
            std::to_string(v.structural_rank);
    d.violations.push_back(text);
  }
  return d;
}

}  // namespace netident
