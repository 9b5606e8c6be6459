#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "sqlpbe/dsl.hpp"

namespace sqlpbe {

/// Operation groups used to split the search between workers. F holds the
/// sequences with at least one inner_join or cross_join, B the rest.
enum class DslSubset : std::uint8_t { Full, F, B };

std::string_view subset_name(DslSubset s);

/// Operations a generator for the subset may place on a line.
std::vector<Op> subset_ops(DslSubset s);

/// Whether a complete sequence belongs to the subset.
bool in_subset(const std::vector<Op>& ops, DslSubset s);

/// Bigram scores between consecutive operations, with an extra start row.
class BigramModel {
 public:
  static constexpr std::size_t kOps = kAllOps.size();

  explicit BigramModel(double delta = 0.99999, double alpha = 1.0);

  double score(std::optional<Op> prev, Op next) const { return s_[row(prev)][col(next)]; }
  void set_score(std::optional<Op> prev, Op next, double v) { s_[row(prev)][col(next)] = v; }

  /// Adds `s` to every adjacent pair of (start, ops...), and s/(i+1)^2 to
  /// (start, ops[i]) for every position i.
  void update(const std::vector<Op>& ops, double s);

  /// Multiplies every score by delta.
  void decay();

  /// Smoothed probabilities over `allowed`, in the order given.
  std::vector<double> distribution(std::optional<Op> prev, const std::vector<Op>& allowed) const;

  Op next_operation(std::optional<Op> prev, const std::vector<Op>& allowed, std::mt19937_64& rng) const;

  double delta() const { return delta_; }
  double alpha() const { return alpha_; }

 private:
  static std::size_t row(std::optional<Op> prev) { return prev ? static_cast<std::size_t>(*prev) : kOps; }
  static std::size_t col(Op op) { return static_cast<std::size_t>(op); }

  double delta_;
  double alpha_;
  std::array<std::array<double, kOps>, kOps + 1> s_{};
};

/// Prefix tree of every operation sequence handed out so far. Each node
/// counts the generated sequences below it, separately for sequences with and
/// without a complex join, so a branch with no room left for a subset is
/// never entered again.
class CubeTrie {
 public:
  CubeTrie();
  ~CubeTrie();
  CubeTrie(CubeTrie&&) noexcept;
  CubeTrie& operator=(CubeTrie&&) noexcept;

  bool contains(const std::vector<Op>& ops) const;
  /// Returns false when the sequence was already marked.
  bool mark(const std::vector<Op>& ops);

  /// Sequences of length `size` extending `prefix` that the subset may still
  /// generate.
  std::uint64_t remaining(const std::vector<Op>& prefix, std::size_t size, DslSubset subset) const;

  bool exhausted(std::size_t size, DslSubset subset) const { return remaining({}, size, subset) == 0; }

  std::size_t generated() const { return generated_; }

 private:
  struct Node;
  const Node* find(const std::vector<Op>& prefix, std::size_t size) const;

  std::map<std::size_t, std::unique_ptr<Node>> roots_;
  std::size_t generated_ = 0;
};

/// Draws a fresh sequence of `size` operations for the subset, one operation
/// at a time from the model, restricted to branches of the trie with room
/// left. Marks and returns it; nullopt when the subset has none left.
std::optional<std::vector<Op>> generate_cube(const BigramModel& model, std::size_t size, CubeTrie& trie,
                                             DslSubset subset, std::mt19937_64& rng);

struct WorkerSplit {
  std::size_t full = 0;
  std::size_t f = 0;
  std::size_t b = 0;
  std::size_t random = 0;
  friend bool operator==(const WorkerSplit&, const WorkerSplit&) = default;
};

/// n = 1: one worker over the whole language. n >= 4: two workers on random
/// cubes. The remaining workers are divided between F and B by the ratio,
/// F taking the ceiling of its share, each side keeping at least one worker.
WorkerSplit split_workers(std::size_t n, std::size_t ratio_f = 1, std::size_t ratio_b = 2);

}  // namespace sqlpbe
