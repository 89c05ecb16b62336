#pragma once

#include <cstddef>
#include <iosfwd>
#include <list>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "kor/graph.hpp"

namespace kor {

/// Which criterion a precomputed path optimizes.
enum class PathKind {
  kMinObjective,  ///< tau: smallest objective score
  kMinBudget,     ///< sigma: smallest budget score
};

/// Objective and budget of one precomputed path. Both are +inf when unreachable.
struct PathScore {
  double objective = kInfinity;
  double budget = kInfinity;
};

/// Read access to best-objective (tau) and best-budget (sigma) paths between
/// node pairs. For each kind, the optimized score is minimal and the other
/// score belongs to the same path.
class PathTables {
 public:
  virtual ~PathTables() = default;

  virtual std::size_t node_count() const = 0;
  virtual PathScore best(PathKind kind, NodeId from, NodeId to) const = 0;
  /// Node sequence of the stored path. Throws NoPathError when unreachable.
  virtual Route path(PathKind kind, NodeId from, NodeId to) const = 0;
  /// Hint that many lookups towards `to` follow.
  virtual void warm_column(NodeId /*to*/) const {}

  PathScore tau(NodeId from, NodeId to) const { return best(PathKind::kMinObjective, from, to); }
  PathScore sigma(NodeId from, NodeId to) const { return best(PathKind::kMinBudget, from, to); }
};

/// Dense all-pairs tables. Immutable once built; safe to share across threads.
class PreprocessTables final : public PathTables {
 public:
  static constexpr std::int32_t kNoSuccessor = -1;

  PreprocessTables() = default;
  explicit PreprocessTables(std::size_t n);

  std::size_t node_count() const override { return n_; }
  PathScore best(PathKind kind, NodeId from, NodeId to) const override;
  Route path(PathKind kind, NodeId from, NodeId to) const override;

  double os_tau(NodeId i, NodeId j) const { return os_tau_[at(i, j)]; }
  double bs_tau(NodeId i, NodeId j) const { return bs_tau_[at(i, j)]; }
  double os_sigma(NodeId i, NodeId j) const { return os_sigma_[at(i, j)]; }
  double bs_sigma(NodeId i, NodeId j) const { return bs_sigma_[at(i, j)]; }
  NodeId successor(PathKind kind, NodeId i, NodeId j) const {
    return (kind == PathKind::kMinObjective ? succ_tau_ : succ_sigma_)[at(i, j)];
  }

  friend bool operator==(const PreprocessTables& a, const PreprocessTables& b) {
    return a.n_ == b.n_ && a.os_tau_ == b.os_tau_ && a.bs_tau_ == b.bs_tau_ &&
           a.os_sigma_ == b.os_sigma_ && a.bs_sigma_ == b.bs_sigma_ &&
           a.succ_tau_ == b.succ_tau_ && a.succ_sigma_ == b.succ_sigma_;
  }

 private:
  friend PreprocessTables all_pairs_best(const Graph&);
  friend PreprocessTables load_tables(std::istream&);
  friend void save_tables(const PreprocessTables&, std::ostream&);

  std::size_t at(NodeId i, NodeId j) const {
    return static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j);
  }

  std::size_t n_ = 0;
  std::vector<double> os_tau_, bs_tau_, os_sigma_, bs_sigma_;
  std::vector<NodeId> succ_tau_, succ_sigma_;
};

/// Floyd-Warshall over both criteria. Relaxation is strictly-less on the
/// optimized score, so ties keep the incumbent path.
PreprocessTables all_pairs_best(const Graph& graph);

Route reconstruct_path(const PathTables& tables, PathKind kind, NodeId from, NodeId to);

/// Binary `kor-pre v1` format, little-endian.
void save_tables(const PreprocessTables& tables, std::ostream& out);
PreprocessTables load_tables(std::istream& in);
void save_tables_file(const PreprocessTables& tables, const std::string& path);
PreprocessTables load_tables_file(const std::string& path);

/// Graphs above this size are too large for dense tables on typical hosts.
inline constexpr std::size_t kDenseTablesWarnNodes = 25000;

/// On-demand tables backed by single-source Dijkstra trees, for graphs whose
/// dense tables would not fit in memory. Lookups towards a warmed column use
/// a reverse tree rooted at the target; other lookups compute and cache a
/// forward tree from the source. Caches are bounded (least recently used
/// trees are evicted). Not thread-safe: use one instance per worker.
class LazyPathTables final : public PathTables {
 public:
  explicit LazyPathTables(const Graph& graph, std::size_t max_cached_trees = 256);

  std::size_t node_count() const override { return graph_->node_count(); }
  PathScore best(PathKind kind, NodeId from, NodeId to) const override;
  Route path(PathKind kind, NodeId from, NodeId to) const override;
  void warm_column(NodeId to) const override;

  std::size_t cached_trees() const { return lru_.size(); }

 private:
  struct Tree {
    std::vector<double> primary;
    std::vector<double> secondary;
    std::vector<NodeId> link;  // successor towards root (reverse) or predecessor (forward)
  };
  struct Key {
    PathKind kind;
    NodeId root;
    bool reverse;
    bool operator<(const Key& o) const {
      return std::tie(kind, root, reverse) < std::tie(o.kind, o.root, o.reverse);
    }
  };

  const Tree& tree(const Key& key) const;
  const Tree* find(const Key& key) const;
  Tree compute(const Key& key) const;

  const Graph* graph_;
  std::size_t capacity_;
  mutable std::list<Key> lru_;
  mutable std::map<Key, std::pair<Tree, std::list<Key>::iterator>> cache_;
};

/// Keyword vocabulary with ascending, duplicate-free posting lists.
class InvertedIndex {
 public:
  InvertedIndex() = default;

  std::span<const NodeId> postings(const std::string& keyword) const;
  std::size_t document_frequency(const std::string& keyword) const {
    return postings(keyword).size();
  }
  std::vector<std::string> vocabulary() const;
  std::size_t vocabulary_size() const { return postings_.size(); }

 private:
  friend InvertedIndex build_inverted_index(const Graph&);
  std::map<std::string, std::vector<NodeId>, std::less<>> postings_;
};

InvertedIndex build_inverted_index(const Graph& graph);

inline std::span<const NodeId> postings(const InvertedIndex& index, const std::string& keyword) {
  return index.postings(keyword);
}

}  // namespace kor
