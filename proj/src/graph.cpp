#include "kor/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "kor/errors.hpp"

namespace kor {
namespace {

bool valid_token(const std::string& token) {
  if (token.empty() || token == "-") return false;
  return std::none_of(token.begin(), token.end(), [](unsigned char c) {
    return c == ',' || std::isspace(c) != 0;
  });
}

std::string describe(const Edge& e) {
  return "edge " + std::to_string(e.src) + "->" + std::to_string(e.dst);
}

std::vector<std::string> edge_violations(const Edge& e, std::size_t n) {
  std::vector<std::string> out;
  const bool in_range = e.src >= 0 && e.dst >= 0 && static_cast<std::size_t>(e.src) < n &&
                        static_cast<std::size_t>(e.dst) < n;
  if (!in_range) out.push_back(describe(e) + " references a missing node");
  if (e.src == e.dst) out.push_back(describe(e) + " is a self-loop");
  if (!(e.objective > 0.0) || !std::isfinite(e.objective)) {
    out.push_back(describe(e) + " has nonpositive objective");
  }
  if (!(e.budget > 0.0) || !std::isfinite(e.budget)) {
    out.push_back(describe(e) + " has nonpositive budget");
  }
  return out;
}

}  // namespace

ValidationReport validate_graph(const GraphData& data) {
  ValidationReport report;
  const auto n = data.keywords.size();
  if (n == 0) report.push_back({"graph has no nodes"});
  for (std::size_t v = 0; v < n; ++v) {
    for (const auto& kw : data.keywords[v]) {
      if (!valid_token(kw)) {
        report.push_back({"node " + std::to_string(v) + " has invalid keyword '" + kw + "'"});
      }
    }
  }
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& e : data.edges) {
    for (auto& message : edge_violations(e, n)) report.push_back({std::move(message)});
    if (!seen.emplace(e.src, e.dst).second) report.push_back({describe(e) + " is duplicated"});
  }
  return report;
}

Graph::Graph(GraphData data) {
  if (auto report = validate_graph(data); !report.empty()) {
    throw ConstraintError(report.front().message);
  }
  const auto n = data.keywords.size();
  keywords_ = std::move(data.keywords);
  for (auto& kws : keywords_) {
    std::sort(kws.begin(), kws.end());
    kws.erase(std::unique(kws.begin(), kws.end()), kws.end());
  }
  std::sort(data.edges.begin(), data.edges.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
  });
  out_.assign(n, {});
  in_.assign(n, {});
  edge_count_ = data.edges.size();
  EdgeId id = 0;
  for (const auto& e : data.edges) {
    out_[e.src].push_back({e.dst, e.objective, e.budget, id});
    in_[e.dst].push_back({e.src, e.objective, e.budget, id});
    ++id;
  }
  if (!data.edges.empty()) {
    stats_.o_min = stats_.b_min = kInfinity;
    for (const auto& e : data.edges) {
      stats_.o_min = std::min(stats_.o_min, e.objective);
      stats_.o_max = std::max(stats_.o_max, e.objective);
      stats_.b_min = std::min(stats_.b_min, e.budget);
    }
  }
  for (const auto& arcs : out_) stats_.max_outdegree = std::max(stats_.max_outdegree, arcs.size());
}

const Arc* Graph::find_arc(NodeId src, NodeId dst) const {
  if (!contains(src)) return nullptr;
  const auto& arcs = out_[src];
  auto it = std::lower_bound(arcs.begin(), arcs.end(), dst,
                             [](const Arc& a, NodeId d) { return a.dst < d; });
  return it != arcs.end() && it->dst == dst ? &*it : nullptr;
}

bool Graph::has_keyword(NodeId v, const std::string& keyword) const {
  const auto& kws = keywords_.at(v);
  return std::binary_search(kws.begin(), kws.end(), keyword);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> result;
  result.reserve(edge_count_);
  for (std::size_t v = 0; v < out_.size(); ++v) {
    for (const auto& a : out_[v]) {
      result.push_back({static_cast<NodeId>(v), a.dst, a.objective, a.budget});
    }
  }
  return result;
}

GraphData Graph::data() const { return {keywords_, edges()}; }

ValidationReport validate_graph(const Graph& graph) { return validate_graph(graph.data()); }

void validate_query(const Graph& graph, const Query& query) {
  if (!graph.contains(query.source)) throw ParameterError("source node does not exist");
  if (!graph.contains(query.target)) throw ParameterError("target node does not exist");
  if (!(query.budget_limit > 0.0)) throw ParameterError("budget limit must be positive");
  if (query.keywords.size() > 31) throw ParameterError("at most 31 query keywords are supported");
}

RouteScores route_scores(const Route& route, const Graph& graph) {
  RouteScores scores;
  if (route.empty()) throw InvalidRouteError("route has no nodes");
  if (!graph.contains(route.front())) throw InvalidRouteError("route references a missing node");
  for (std::size_t i = 1; i < route.size(); ++i) {
    const Arc* arc = graph.find_arc(route.nodes[i - 1], route.nodes[i]);
    if (arc == nullptr) {
      throw InvalidRouteError("no edge " + std::to_string(route.nodes[i - 1]) + "->" +
                              std::to_string(route.nodes[i]));
    }
    scores.objective += arc->objective;
    scores.budget += arc->budget;
  }
  return scores;
}

bool covers(const Route& route, std::span<const std::string> keywords, const Graph& graph) {
  return std::all_of(keywords.begin(), keywords.end(), [&](const std::string& kw) {
    return std::any_of(route.nodes.begin(), route.nodes.end(),
                       [&](NodeId v) { return graph.has_keyword(v, kw); });
  });
}

RouteResult make_result(Route route, const Graph& graph, const Query& query, std::string algorithm,
                        std::map<std::string, double> params) {
  RouteResult result;
  const auto scores = route_scores(route, graph);
  result.objective = scores.objective;
  result.budget = scores.budget;
  result.feasible = !route.empty() && route.front() == query.source &&
                    route.back() == query.target && scores.budget <= query.budget_limit &&
                    covers(route, query.keywords, graph);
  result.route = std::move(route);
  result.algorithm = std::move(algorithm);
  result.params = std::move(params);
  return result;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::string next(const char* expecting) {
    std::string line;
    while (std::getline(in_, line)) {
      ++number_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return line;
    }
    throw ParseError(number_ + 1, std::string("unexpected end of input, expecting ") + expecting);
  }

  std::size_t line() const { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

template <typename T>
T parse_number(const std::string& tok, std::size_t line, const char* what) {
  T value{};
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(line, std::string("invalid ") + what + " '" + tok + "'");
  }
  return value;
}

std::size_t parse_section(const std::string& line, std::size_t number, const char* name) {
  auto toks = split_ws(line);
  if (toks.size() != 2 || toks[0] != name) {
    throw ParseError(number, std::string("expected '") + name + " <count>'");
  }
  return parse_number<std::size_t>(toks[1], number, "count");
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

Graph load_graph(std::istream& in) {
  LineReader reader(in);
  if (split_ws(reader.next("header")) != std::vector<std::string>{"kor-graph", "v1"}) {
    throw ParseError(reader.line(), "expected header 'kor-graph v1'");
  }
  const auto n = parse_section(reader.next("nodes section"), reader.line(), "nodes");
  if (n == 0) throw ParseError(reader.line(), "nodes section is empty");

  GraphData data;
  data.keywords.resize(n);
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    auto toks = split_ws(reader.next("node line"));
    const auto line = reader.line();
    if (toks.size() != 2) throw ParseError(line, "expected '<id> <keywords>'");
    const auto id = parse_number<std::int64_t>(toks[0], line, "node id");
    if (id < 0 || static_cast<std::size_t>(id) >= n) throw ParseError(line, "node id out of range");
    if (seen[id]) throw ParseError(line, "duplicate node id");
    seen[id] = true;
    if (toks[1] != "-") {
      std::string kw;
      std::istringstream ss(toks[1]);
      while (std::getline(ss, kw, ',')) {
        if (kw.empty()) throw ParseError(line, "empty keyword");
        data.keywords[id].push_back(kw);
      }
    }
  }

  const auto m = parse_section(reader.next("edges section"), reader.line(), "edges");
  data.edges.reserve(m);
  std::set<std::pair<NodeId, NodeId>> pairs;
  for (std::size_t i = 0; i < m; ++i) {
    auto toks = split_ws(reader.next("edge line"));
    const auto line = reader.line();
    if (toks.size() != 4) throw ParseError(line, "expected '<src> <dst> <objective> <budget>'");
    Edge e;
    e.src = static_cast<NodeId>(parse_number<std::int64_t>(toks[0], line, "source id"));
    e.dst = static_cast<NodeId>(parse_number<std::int64_t>(toks[1], line, "target id"));
    e.objective = parse_number<double>(toks[2], line, "objective");
    e.budget = parse_number<double>(toks[3], line, "budget");
    if (auto v = edge_violations(e, n); !v.empty()) {
      throw ConstraintError("line " + std::to_string(line) + ": " + v.front());
    }
    if (!pairs.emplace(e.src, e.dst).second) {
      throw ConstraintError("line " + std::to_string(line) + ": duplicate edge");
    }
    data.edges.push_back(e);
  }
  return Graph(std::move(data));
}

Graph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file '" + path + "'");
  return load_graph(in);
}

void save_graph(const Graph& graph, std::ostream& out) {
  out << "kor-graph v1\n";
  out << "nodes " << graph.node_count() << '\n';
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    out << v << ' ';
    auto kws = graph.keywords(static_cast<NodeId>(v));
    if (kws.empty()) {
      out << '-';
    } else {
      for (std::size_t i = 0; i < kws.size(); ++i) out << (i ? "," : "") << kws[i];
    }
    out << '\n';
  }
  const auto edges = graph.edges();
  out << "edges " << edges.size() << '\n';
  for (const auto& e : edges) {
    out << e.src << ' ' << e.dst << ' ' << format_double(e.objective) << ' '
        << format_double(e.budget) << '\n';
  }
}

// ---------------------------------------------------------------------------

Graph build_from_trajectories(std::span<const TripCount> trips, std::uint64_t total_trips,
                              std::span<const Point> coordinates,
                              std::vector<std::vector<std::string>> keywords) {
  if (total_trips == 0) throw ParameterError("total trip count must be positive");
  if (keywords.size() != coordinates.size()) {
    throw ParameterError("keyword and coordinate lists must have one entry per node");
  }
  std::map<std::pair<NodeId, NodeId>, std::uint64_t> counts;
  for (const auto& t : trips) {
    if (t.count == 0) throw ParameterError("trip counts must be positive");
    counts[{t.src, t.dst}] += t.count;
  }
  GraphData data;
  data.keywords = std::move(keywords);
  const auto n = static_cast<NodeId>(coordinates.size());
  for (const auto& [pair, count] : counts) {
    const auto [src, dst] = pair;
    if (src < 0 || dst < 0 || src >= n || dst >= n) {
      throw ParameterError("trip references a missing node");
    }
    if (count > total_trips) throw ParameterError("pair count exceeds total trips");
    const double pr = std::min(static_cast<double>(count) / static_cast<double>(total_trips),
                               kMaxVisitProbability);
    const double dx = coordinates[src].x - coordinates[dst].x;
    const double dy = coordinates[src].y - coordinates[dst].y;
    data.edges.push_back({src, dst, std::log(1.0 / pr), std::hypot(dx, dy)});
  }
  return Graph(std::move(data));
}

}  // namespace kor
