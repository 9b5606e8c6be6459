#include "sqlpbe/cube_engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace sqlpbe {

std::string_view subset_name(DslSubset s) {
  switch (s) {
    case DslSubset::Full: return "full";
    case DslSubset::F: return "F";
    case DslSubset::B: return "B";
  }
  return "?";
}

std::vector<Op> subset_ops(DslSubset s) {
  std::vector<Op> out;
  for (Op op : kAllOps) {
    if (s != DslSubset::B || !is_complex_join(op)) out.push_back(op);
  }
  return out;
}

bool in_subset(const std::vector<Op>& ops, DslSubset s) {
  const bool complex = std::any_of(ops.begin(), ops.end(), is_complex_join);
  switch (s) {
    case DslSubset::Full: return true;
    case DslSubset::F: return complex;
    case DslSubset::B: return !complex;
  }
  return false;
}

BigramModel::BigramModel(double delta, double alpha) : delta_(delta), alpha_(alpha) {}

void BigramModel::update(const std::vector<Op>& ops, double s) {
  std::optional<Op> prev;
  for (Op op : ops) {
    s_[row(prev)][col(op)] += s;
    prev = op;
  }
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const double w = static_cast<double>((i + 1) * (i + 1));
    s_[kOps][col(ops[i])] += s / w;
  }
}

void BigramModel::decay() {
  for (auto& r : s_) {
    for (auto& v : r) v *= delta_;
  }
}

std::vector<double> BigramModel::distribution(std::optional<Op> prev, const std::vector<Op>& allowed) const {
  std::vector<double> p;
  double total = 0;
  for (Op op : allowed) {
    p.push_back(score(prev, op) + alpha_);
    total += p.back();
  }
  for (auto& x : p) x /= total;
  return p;
}

Op BigramModel::next_operation(std::optional<Op> prev, const std::vector<Op>& allowed, std::mt19937_64& rng) const {
  if (allowed.empty()) throw std::invalid_argument("next_operation needs at least one allowed operation");
  if (allowed.size() == 1) return allowed.front();
  double total = 0;
  for (Op op : allowed) total += score(prev, op) + alpha_;
  double x = std::uniform_real_distribution<double>(0.0, total)(rng);
  for (Op op : allowed) {
    x -= score(prev, op) + alpha_;
    if (x < 0) return op;
  }
  return allowed.back();
}

struct CubeTrie::Node {
  std::array<std::unique_ptr<Node>, kAllOps.size()> children;
  std::uint64_t with_complex = 0;
  std::uint64_t without_complex = 0;
};

CubeTrie::CubeTrie() = default;
CubeTrie::~CubeTrie() = default;
CubeTrie::CubeTrie(CubeTrie&&) noexcept = default;
CubeTrie& CubeTrie::operator=(CubeTrie&&) noexcept = default;

namespace {

constexpr std::size_t kMaxCubeSize = 16;

std::uint64_t power(std::uint64_t base, std::size_t exp) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

const CubeTrie::Node* CubeTrie::find(const std::vector<Op>& prefix, std::size_t size) const {
  auto it = roots_.find(size);
  if (it == roots_.end()) return nullptr;
  const Node* n = it->second.get();
  for (Op op : prefix) {
    n = n->children[static_cast<std::size_t>(op)].get();
    if (!n) return nullptr;
  }
  return n;
}

bool CubeTrie::contains(const std::vector<Op>& ops) const {
  const Node* n = find(ops, ops.size());
  return n && (n->with_complex + n->without_complex) > 0;
}

bool CubeTrie::mark(const std::vector<Op>& ops) {
  if (ops.empty() || ops.size() > kMaxCubeSize) throw std::invalid_argument("cube size out of range");
  if (contains(ops)) return false;
  const bool complex = std::any_of(ops.begin(), ops.end(), is_complex_join);
  auto& root = roots_[ops.size()];
  if (!root) root = std::make_unique<Node>();
  Node* n = root.get();
  auto count = [&](Node* node) { ++(complex ? node->with_complex : node->without_complex); };
  count(n);
  for (Op op : ops) {
    auto& child = n->children[static_cast<std::size_t>(op)];
    if (!child) child = std::make_unique<Node>();
    n = child.get();
    count(n);
  }
  ++generated_;
  return true;
}

std::uint64_t CubeTrie::remaining(const std::vector<Op>& prefix, std::size_t size, DslSubset subset) const {
  if (size == 0 || size > kMaxCubeSize || prefix.size() > size) return 0;
  const std::size_t depth = size - prefix.size();
  const bool prefix_complex = std::any_of(prefix.begin(), prefix.end(), is_complex_join);
  const std::uint64_t all = power(kAllOps.size(), depth);
  const std::uint64_t simple = power(subset_ops(DslSubset::B).size(), depth);
  const std::uint64_t cap_b = prefix_complex ? 0 : simple;
  const std::uint64_t cap_f = prefix_complex ? all : all - simple;
  const Node* n = find(prefix, size);
  const std::uint64_t rem_b = cap_b - (n ? n->without_complex : 0);
  const std::uint64_t rem_f = cap_f - (n ? n->with_complex : 0);
  switch (subset) {
    case DslSubset::B: return rem_b;
    case DslSubset::F: return rem_f;
    case DslSubset::Full: return rem_b + rem_f;
  }
  return 0;
}

std::optional<std::vector<Op>> generate_cube(const BigramModel& model, std::size_t size, CubeTrie& trie,
                                             DslSubset subset, std::mt19937_64& rng) {
  if (trie.remaining({}, size, subset) == 0) return std::nullopt;
  const std::vector<Op> ops = subset_ops(subset);
  std::vector<Op> cube;
  std::optional<Op> prev;
  std::vector<Op> allowed;
  for (std::size_t i = 0; i < size; ++i) {
    allowed.clear();
    for (Op op : ops) {
      cube.push_back(op);
      if (trie.remaining(cube, size, subset) > 0) allowed.push_back(op);
      cube.pop_back();
    }
    const Op op = model.next_operation(prev, allowed, rng);
    cube.push_back(op);
    prev = op;
  }
  trie.mark(cube);
  return cube;
}

WorkerSplit split_workers(std::size_t n, std::size_t ratio_f, std::size_t ratio_b) {
  if (n == 0) throw std::invalid_argument("at least one worker is needed");
  if (ratio_f + ratio_b == 0) throw std::invalid_argument("ratio must not be 0:0");
  WorkerSplit s;
  if (n == 1) {
    s.full = 1;
    return s;
  }
  if (n >= 4) s.random = 2;
  const std::size_t rest = n - s.random;
  s.f = (rest * ratio_f + ratio_f + ratio_b - 1) / (ratio_f + ratio_b);
  s.f = std::clamp<std::size_t>(s.f, 1, rest - 1);
  s.b = rest - s.f;
  return s;
}

}  // namespace sqlpbe
