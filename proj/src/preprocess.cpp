#include "kor/preprocess.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <queue>
#include <utility>

#include "kor/errors.hpp"

namespace kor {
namespace {

constexpr std::array<char, 10> kTablesMagic = {'k', 'o', 'r', '-', 'p', 'r', 'e', ' ', 'v', '1'};

// Floyd-Warshall on one matrix. Strictly-less relaxation keeps the incumbent on ties.
void floyd_warshall(std::size_t n, std::vector<double>& dist, std::vector<NodeId>& succ) {
  for (std::size_t k = 0; k < n; ++k) {
    const double* row_k = dist.data() + k * n;
    for (std::size_t i = 0; i < n; ++i) {
      const double d_ik = dist[i * n + k];
      if (i == k || d_ik == kInfinity) continue;
      double* row_i = dist.data() + i * n;
      NodeId* succ_i = succ.data() + i * n;
      const NodeId s_ik = succ_i[k];
      for (std::size_t j = 0; j < n; ++j) {
        const double candidate = d_ik + row_k[j];
        if (candidate < row_i[j]) {
          row_i[j] = candidate;
          succ_i[j] = s_ik;
        }
      }
    }
  }
}

// Rewrites both scores of every pair as sums along the successor chain, so
// that score(i, j) = w(i, succ) + score(succ, j) holds exactly.
void rescore_chains(const Graph& graph, std::size_t n, const std::vector<NodeId>& succ,
                    std::vector<double>& objective, std::vector<double>& budget) {
  std::vector<char> done(n);
  std::vector<NodeId> stack;
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(done.begin(), done.end(), 0);
    done[j] = 1;
    objective[j * n + j] = 0.0;
    budget[j * n + j] = 0.0;
    for (std::size_t start = 0; start < n; ++start) {
      if (done[start]) continue;
      if (succ[start * n + j] == PreprocessTables::kNoSuccessor) {
        done[start] = 1;
        continue;
      }
      stack.clear();
      auto v = static_cast<NodeId>(start);
      while (!done[v]) {
        stack.push_back(v);
        if (stack.size() > n) throw std::logic_error("successor chain does not terminate");
        v = succ[static_cast<std::size_t>(v) * n + j];
      }
      while (!stack.empty()) {
        const NodeId u = stack.back();
        stack.pop_back();
        const NodeId next = succ[static_cast<std::size_t>(u) * n + j];
        const Arc* arc = graph.find_arc(u, next);
        const auto uj = static_cast<std::size_t>(u) * n + j;
        const auto nj = static_cast<std::size_t>(next) * n + j;
        objective[uj] = arc->objective + objective[nj];
        budget[uj] = arc->budget + budget[nj];
        done[u] = 1;
      }
    }
  }
}

void write_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes;
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(bytes.data(), bytes.size());
}

std::uint64_t read_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw ParseError(0, "truncated tables file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

void write_doubles(std::ostream& out, const std::vector<double>& values) {
  for (double d : values) write_u64(out, std::bit_cast<std::uint64_t>(d));
}

void write_ints(std::ostream& out, const std::vector<NodeId>& values) {
  for (NodeId v : values) {
    const auto u = static_cast<std::uint32_t>(v);
    std::array<char, 4> bytes;
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((u >> (8 * i)) & 0xffu);
    out.write(bytes.data(), bytes.size());
  }
}

// Grows `values` as data arrives, so a corrupt count cannot force a huge allocation.
void read_doubles(std::istream& in, std::vector<double>& values, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) values.push_back(std::bit_cast<double>(read_u64(in)));
}

void read_ints(std::istream& in, std::vector<NodeId>& values, std::size_t count) {
  std::array<unsigned char, 4> bytes{};
  for (std::size_t i = 0; i < count; ++i) {
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in) throw ParseError(0, "truncated tables file");
    std::uint32_t u = 0;
    for (int i = 3; i >= 0; --i) u = (u << 8) | bytes[i];
    values.push_back(static_cast<NodeId>(u));
  }
}

}  // namespace

PreprocessTables::PreprocessTables(std::size_t n)
    : n_(n),
      os_tau_(n * n, kInfinity),
      bs_tau_(n * n, kInfinity),
      os_sigma_(n * n, kInfinity),
      bs_sigma_(n * n, kInfinity),
      succ_tau_(n * n, kNoSuccessor),
      succ_sigma_(n * n, kNoSuccessor) {
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = i * n + i;
    os_tau_[ii] = bs_tau_[ii] = os_sigma_[ii] = bs_sigma_[ii] = 0.0;
  }
}

PathScore PreprocessTables::best(PathKind kind, NodeId from, NodeId to) const {
  const auto k = at(from, to);
  if (kind == PathKind::kMinObjective) return {os_tau_[k], bs_tau_[k]};
  return {os_sigma_[k], bs_sigma_[k]};
}

Route PreprocessTables::path(PathKind kind, NodeId from, NodeId to) const {
  Route route{{from}};
  NodeId v = from;
  while (v != to) {
    v = successor(kind, v, to);
    if (v == kNoSuccessor) {
      throw NoPathError("no path from " + std::to_string(from) + " to " + std::to_string(to));
    }
    route.nodes.push_back(v);
    if (route.size() > n_) throw std::logic_error("successor chain does not terminate");
  }
  return route;
}

PreprocessTables all_pairs_best(const Graph& graph) {
  const auto n = graph.node_count();
  PreprocessTables t(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& a : graph.out_arcs(static_cast<NodeId>(i))) {
      const auto k = i * n + static_cast<std::size_t>(a.dst);
      t.os_tau_[k] = t.os_sigma_[k] = a.objective;
      t.bs_tau_[k] = t.bs_sigma_[k] = a.budget;
      t.succ_tau_[k] = t.succ_sigma_[k] = a.dst;
    }
  }
  floyd_warshall(n, t.os_tau_, t.succ_tau_);
  floyd_warshall(n, t.bs_sigma_, t.succ_sigma_);
  rescore_chains(graph, n, t.succ_tau_, t.os_tau_, t.bs_tau_);
  rescore_chains(graph, n, t.succ_sigma_, t.os_sigma_, t.bs_sigma_);
  return t;
}

Route reconstruct_path(const PathTables& tables, PathKind kind, NodeId from, NodeId to) {
  return tables.path(kind, from, to);
}

void save_tables(const PreprocessTables& t, std::ostream& out) {
  out.write(kTablesMagic.data(), kTablesMagic.size());
  write_u64(out, t.n_);
  write_doubles(out, t.os_tau_);
  write_doubles(out, t.bs_tau_);
  write_doubles(out, t.os_sigma_);
  write_doubles(out, t.bs_sigma_);
  write_ints(out, t.succ_tau_);
  write_ints(out, t.succ_sigma_);
  if (!out) throw Error("failed to write tables");
}

PreprocessTables load_tables(std::istream& in) {
  std::array<char, kTablesMagic.size()> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kTablesMagic) throw ParseError(0, "not a kor-pre v1 file");
  const auto n = read_u64(in);
  if (n > (1u << 20)) throw ParseError(0, "implausible node count in tables file");
  PreprocessTables t;
  t.n_ = n;
  for (auto* m : {&t.os_tau_, &t.bs_tau_, &t.os_sigma_, &t.bs_sigma_}) {
    read_doubles(in, *m, n * n);
  }
  for (auto* m : {&t.succ_tau_, &t.succ_sigma_}) {
    read_ints(in, *m, n * n);
    for (NodeId s : *m) {
      if (s < PreprocessTables::kNoSuccessor || s >= static_cast<NodeId>(n)) {
        throw ParseError(0, "successor out of range in tables file");
      }
    }
  }
  return t;
}

void save_tables_file(const PreprocessTables& tables, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  save_tables(tables, out);
}

PreprocessTables load_tables_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open tables file '" + path + "'");
  return load_tables(in);
}

// ---------------------------------------------------------------------------

LazyPathTables::LazyPathTables(const Graph& graph, std::size_t max_cached_trees)
    : graph_(&graph), capacity_(std::max<std::size_t>(max_cached_trees, 4)) {}

const LazyPathTables::Tree* LazyPathTables::find(const Key& key) const {
  auto it = cache_.find(key);
  if (it == cache_.end()) return nullptr;
  lru_.splice(lru_.begin(), lru_, it->second.second);
  return &it->second.first;
}

const LazyPathTables::Tree& LazyPathTables::tree(const Key& key) const {
  if (const Tree* t = find(key)) return *t;
  if (cache_.size() >= capacity_) {
    cache_.erase(lru_.back());
    lru_.pop_back();
  }
  lru_.push_front(key);
  auto [it, inserted] = cache_.emplace(key, std::pair{compute(key), lru_.begin()});
  return it->second.first;
}

LazyPathTables::Tree LazyPathTables::compute(const Key& key) const {
  const auto n = graph_->node_count();
  Tree t{std::vector<double>(n, kInfinity), std::vector<double>(n, kInfinity),
         std::vector<NodeId>(n, kNoNode)};
  const bool by_objective = key.kind == PathKind::kMinObjective;
  auto primary_of = [&](double o, double b) { return by_objective ? o : b; };
  auto secondary_of = [&](double o, double b) { return by_objective ? b : o; };

  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  t.primary[key.root] = t.secondary[key.root] = 0.0;
  heap.emplace(0.0, key.root);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > t.primary[u]) continue;
    auto relax = [&](NodeId v, double o, double b) {
      const double candidate = key.reverse ? primary_of(o, b) + d : d + primary_of(o, b);
      if (candidate < t.primary[v]) {
        t.primary[v] = candidate;
        t.secondary[v] = key.reverse ? secondary_of(o, b) + t.secondary[u]
                                     : t.secondary[u] + secondary_of(o, b);
        t.link[v] = u;
        heap.emplace(candidate, v);
      }
    };
    if (key.reverse) {
      for (const auto& a : graph_->in_arcs(u)) relax(a.src, a.objective, a.budget);
    } else {
      for (const auto& a : graph_->out_arcs(u)) relax(a.dst, a.objective, a.budget);
    }
  }
  return t;
}

void LazyPathTables::warm_column(NodeId to) const {
  tree({PathKind::kMinObjective, to, true});
  tree({PathKind::kMinBudget, to, true});
}

PathScore LazyPathTables::best(PathKind kind, NodeId from, NodeId to) const {
  const Tree* t = find({kind, to, true});
  const NodeId at = t != nullptr ? from : to;
  if (t == nullptr) t = &tree({kind, from, false});
  if (kind == PathKind::kMinObjective) return {t->primary[at], t->secondary[at]};
  return {t->secondary[at], t->primary[at]};
}

Route LazyPathTables::path(PathKind kind, NodeId from, NodeId to) const {
  auto unreachable = [&] {
    return NoPathError("no path from " + std::to_string(from) + " to " + std::to_string(to));
  };
  if (const Tree* col = find({kind, to, true})) {
    if (col->primary[from] == kInfinity) throw unreachable();
    Route route{{from}};
    for (NodeId v = from; v != to;) {
      v = col->link[v];
      route.nodes.push_back(v);
    }
    return route;
  }
  const Tree& row = tree({kind, from, false});
  if (row.primary[to] == kInfinity) throw unreachable();
  Route route{{to}};
  for (NodeId v = to; v != from;) {
    v = row.link[v];
    route.nodes.push_back(v);
  }
  std::reverse(route.nodes.begin(), route.nodes.end());
  return route;
}

// ---------------------------------------------------------------------------

std::span<const NodeId> InvertedIndex::postings(const std::string& keyword) const {
  auto it = postings_.find(keyword);
  if (it == postings_.end()) return {};
  return it->second;
}

std::vector<std::string> InvertedIndex::vocabulary() const {
  std::vector<std::string> words;
  words.reserve(postings_.size());
  for (const auto& [word, list] : postings_) words.push_back(word);
  return words;
}

InvertedIndex build_inverted_index(const Graph& graph) {
  InvertedIndex index;
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    for (const auto& kw : graph.keywords(static_cast<NodeId>(v))) {
      index.postings_[kw].push_back(static_cast<NodeId>(v));
    }
  }
  return index;
}

}  // namespace kor
