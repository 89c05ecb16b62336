#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <memory>
#include <sstream>

#include "kor/bench.hpp"
#include "kor/bucketbound.hpp"
#include "kor/errors.hpp"
#include "kor/generate.hpp"
#include "kor/graph.hpp"
#include "kor/greedy.hpp"
#include "kor/oracle.hpp"
#include "kor/osscaling.hpp"
#include "kor/preprocess.hpp"

namespace py = pybind11;
using namespace kor;

namespace {

// A graph with its inverted index and optional dense tables.
class Network {
 public:
  explicit Network(Graph graph)
      : graph_(std::make_shared<Graph>(std::move(graph))),
        index_(build_inverted_index(*graph_)) {}

  const Graph& graph() const { return *graph_; }
  const InvertedIndex& index() const { return index_; }

  void preprocess() { tables_ = std::make_shared<PreprocessTables>(all_pairs_best(*graph_)); }
  void load_tables(const std::string& path) {
    auto t = load_tables_file(path);
    if (t.node_count() != graph_->node_count()) {
      throw ParseError(0, "tables file does not match the graph");
    }
    tables_ = std::make_shared<PreprocessTables>(std::move(t));
  }
  void save_tables(const std::string& path) { save_tables_file(dense(), path); }

  const PreprocessTables& dense() {
    if (!tables_) preprocess();
    return *tables_;
  }

 private:
  std::shared_ptr<Graph> graph_;
  InvertedIndex index_;
  std::shared_ptr<PreprocessTables> tables_;
};

py::dict to_dict(const RouteResult& r) {
  py::dict d;
  d["route"] = r.route.nodes;
  d["objective"] = r.objective;
  d["budget"] = r.budget;
  d["feasible"] = r.feasible;
  d["algorithm"] = r.algorithm;
  d["params"] = r.params;
  return d;
}

py::list to_list(const std::vector<RouteResult>& rs) {
  py::list out;
  for (const auto& r : rs) out.append(to_dict(r));
  return out;
}

py::object to_optional(const std::optional<RouteResult>& r) {
  return r ? py::object(to_dict(*r)) : py::none();
}

GreedyMode parse_mode(const std::string& mode) {
  if (mode == "keyword") return GreedyMode::kKeywordHard;
  if (mode == "budget") return GreedyMode::kBudgetHard;
  throw ParameterError("mode must be keyword or budget");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Keyword-aware optimal route search";

  auto base = py::register_exception<Error>(m, "KorError");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ConstraintError>(m, "ConstraintError", base.ptr());
  py::register_exception<InvalidRouteError>(m, "InvalidRouteError", base.ptr());
  py::register_exception<NoPathError>(m, "NoPathError", base.ptr());
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<SizeGuardError>(m, "SizeGuardError", base.ptr());

  py::class_<Network>(m, "Network")
      .def_static("load", [](const std::string& path) { return Network(load_graph_file(path)); },
                  py::arg("path"))
      .def_static(
          "from_text", [](const std::string& text) {
            std::istringstream in(text);
            return Network(load_graph(in));
          },
          py::arg("text"))
      .def_static(
          "from_edges",
          [](const std::vector<std::vector<std::string>>& keywords,
             const std::vector<std::tuple<NodeId, NodeId, double, double>>& edges) {
            GraphData d;
            d.keywords = keywords;
            for (const auto& [s, t, o, b] : edges) d.edges.push_back({s, t, o, b});
            return Network(Graph(std::move(d)));
          },
          py::arg("keywords"), py::arg("edges"))
      .def_static(
          "generate",
          [](std::size_t nodes, std::size_t degree, std::size_t vocab, std::uint64_t seed,
             double spacing) {
            GenSpec s;
            s.nodes = nodes;
            s.degree = degree;
            s.vocabulary = vocab;
            s.seed = seed;
            s.spacing = spacing;
            return Network(generate_graph(s));
          },
          py::arg("nodes"), py::arg("degree") = 4, py::arg("vocab") = 1000, py::arg("seed") = 1,
          py::arg("spacing") = 1.0)
      .def_property_readonly("node_count", [](const Network& n) { return n.graph().node_count(); })
      .def_property_readonly("edge_count", [](const Network& n) { return n.graph().edge_count(); })
      .def("keywords",
           [](const Network& n, NodeId v) {
             if (!n.graph().contains(v)) throw py::index_error("node out of range");
             const auto k = n.graph().keywords(v);
             return std::vector<std::string>(k.begin(), k.end());
           })
      .def("save",
           [](const Network& n, const std::string& path) {
             std::ofstream out(path);
             if (!out) throw Error("cannot write " + path);
             save_graph(n.graph(), out);
           })
      .def("route_scores",
           [](const Network& n, const std::vector<NodeId>& route) {
             const auto s = route_scores(Route{route}, n.graph());
             return py::make_tuple(s.objective, s.budget);
           })
      .def("preprocess", &Network::preprocess)
      .def("load_tables", &Network::load_tables, py::arg("path"))
      .def("save_tables", &Network::save_tables, py::arg("path"))
      .def("best_path",
           [](Network& n, NodeId from, NodeId to, const std::string& kind) {
             const PathKind k = kind == "budget" ? PathKind::kMinBudget : PathKind::kMinObjective;
             const auto s = n.dense().best(k, from, to);
             return py::make_tuple(s.objective, s.budget);
           },
           py::arg("source"), py::arg("target"), py::arg("kind") = "objective")
      .def(
          "osscaling",
          [](Network& n, NodeId s, NodeId t, std::vector<std::string> kw, double delta,
             double epsilon, bool opt1, bool opt2, std::size_t k) {
            OsScalingOptions o;
            o.epsilon = epsilon;
            o.strategy1 = opt1;
            o.strategy2 = opt2;
            const Query q{s, t, std::move(kw), delta};
            return to_list(kkr_osscaling(n.graph(), n.dense(), n.index(), q, k, o));
          },
          py::arg("source"), py::arg("target"), py::arg("keywords"), py::arg("delta"),
          py::arg("epsilon") = 0.5, py::arg("opt1") = true, py::arg("opt2") = true,
          py::arg("k") = 1)
      .def(
          "bucketbound",
          [](Network& n, NodeId s, NodeId t, std::vector<std::string> kw, double delta,
             double epsilon, double beta, std::size_t k) {
            BucketBoundOptions o;
            o.epsilon = epsilon;
            o.beta = beta;
            const Query q{s, t, std::move(kw), delta};
            return to_list(kkr_bucketbound(n.graph(), n.dense(), n.index(), q, k, o));
          },
          py::arg("source"), py::arg("target"), py::arg("keywords"), py::arg("delta"),
          py::arg("epsilon") = 0.5, py::arg("beta") = 1.2, py::arg("k") = 1)
      .def(
          "greedy",
          [](Network& n, NodeId s, NodeId t, std::vector<std::string> kw, double delta,
             double alpha, int width, const std::string& mode) {
            GreedyOptions o;
            o.alpha = alpha;
            o.width = width;
            o.mode = parse_mode(mode);
            const Query q{s, t, std::move(kw), delta};
            return to_optional(kor_greedy(n.graph(), n.dense(), n.index(), q, o));
          },
          py::arg("source"), py::arg("target"), py::arg("keywords"), py::arg("delta"),
          py::arg("alpha") = 0.5, py::arg("width") = 1, py::arg("mode") = "keyword")
      .def(
          "exact",
          [](const Network& n, NodeId s, NodeId t, std::vector<std::string> kw, double delta,
             std::size_t k) {
            const Query q{s, t, std::move(kw), delta};
            return to_list(kkr_exact(n.graph(), q, k));
          },
          py::arg("source"), py::arg("target"), py::arg("keywords"), py::arg("delta"),
          py::arg("k") = 1);

  m.def(
      "run_benchmark",
      [](const std::string& config_json) {
        const auto config = parse_bench_config(config_json);
        BenchReport report;
        {
          py::gil_scoped_release release;
          report = run_benchmark(config);
        }
        return report_json(report);
      },
      py::arg("config_json"), "Runs a benchmark grid and returns the JSON report.");
}
