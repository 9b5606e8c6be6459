#include "sqlpbe/synthesizer.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "sqlpbe/channel.hpp"
#include "sqlpbe/sql.hpp"

namespace sqlpbe {

std::string_view to_string(SynthesisStatus s) {
  switch (s) {
    case SynthesisStatus::Solved: return "solved";
    case SynthesisStatus::Timeout: return "timeout";
    case SynthesisStatus::Exhausted: return "exhausted";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

// Intermediate results above this size are treated like failed lines; they
// come from joins without shared columns and never fit an example output.
constexpr std::size_t kMaxIntermediateRows = 50'000;

class EvaluatingSink : public EnumerationSink {
 public:
  EvaluatingSink(const Instance& inst, const ExpectedOutput& expected, std::size_t batch_size, std::size_t worker,
                 const std::vector<Op>& cube, CubeSolver::Hooks& hooks)
      : env_(make_env(inst.inputs)), expected_(expected), batch_size_(batch_size), cube_(cube), hooks_(hooks) {
    batch_.worker = worker;
  }

  bool enter_line(std::size_t index, const Program& prefix) override {
    const Line& line = prefix.lines[index];
    try {
      auto t = std::make_shared<const Table>(apply_line(line, env_));
      if (t->rows.size() > kMaxIntermediateRows) return false;
      env_[line.output] = std::move(t);
      return true;
    } catch (const EngineError&) {
      return false;
    }
  }

  void leave_line(std::size_t index) override {
    if (auto it = env_.find(line_output_name(index)); it != env_.end()) env_.erase(it);
  }

  bool on_program(const Program& p) override {
    ++programs_;
    const Table& out = *env_.at(p.lines.back().output);
    const double s = score(out, expected_);
    batch_.scores.emplace_back(p.ops(), s);
    if (batch_.scores.size() >= batch_size_) flush();
    if (s < 1.0) return true;
    auto projection = satisfies(out, expected_);
    if (!projection) return true;
    SolutionFound found{batch_.worker, p, *projection, 0.0, cube_};
    if (!hooks_.solution(std::move(found))) {
      stopped_ = true;
      return false;
    }
    return true;
  }

  bool should_stop() override {
    if (stopped_) return true;
    if ((++ticks_ & 15u) == 0 && hooks_.stop && hooks_.stop()) stopped_ = true;
    return stopped_;
  }

  void flush() {
    if (batch_.scores.empty()) return;
    ScoreBatch out;
    out.worker = batch_.worker;
    out.scores.swap(batch_.scores);
    hooks_.batch(std::move(out));
  }

  std::size_t programs() const { return programs_; }
  bool stopped() const { return stopped_; }

 private:
  Env env_;
  const ExpectedOutput& expected_;
  std::size_t batch_size_;
  const std::vector<Op>& cube_;
  CubeSolver::Hooks& hooks_;
  ScoreBatch batch_;
  std::size_t programs_ = 0;
  std::size_t ticks_ = 0;
  bool stopped_ = false;
};

enum class Role : std::uint8_t { Full, F, B, Random };

DslSubset subset_of(Role r) {
  switch (r) {
    case Role::F: return DslSubset::F;
    case Role::B: return DslSubset::B;
    default: return DslSubset::Full;
  }
}

constexpr std::size_t kSizeCap = 16;

/// State owned by the coordinator: model, trie, cube schedule and results.
class Coordinator {
 public:
  Coordinator(const Instance& inst, const SynthesisOptions& o, Clock::time_point start)
      : inst_(inst), options_(o), start_(start), model_(o.delta, o.alpha), rng_(o.seed) {
    const WorkerSplit split = split_workers(o.workers, o.ratio_f, o.ratio_b);
    roles_.insert(roles_.end(), split.full, Role::Full);
    roles_.insert(roles_.end(), split.f, Role::F);
    roles_.insert(roles_.end(), split.b, Role::B);
    roles_.insert(roles_.end(), split.random, Role::Random);
  }

  const std::vector<Role>& roles() const { return roles_; }

  std::optional<CubeAssignment> next_cube(Role role) {
    const DslSubset subset = subset_of(role);
    for (auto it = requeued_.begin(); it != requeued_.end(); ++it) {
      if (role == Role::Random || in_subset(*it, subset)) {
        CubeAssignment a{*it, subset};
        requeued_.erase(it);
        return a;
      }
    }
    const std::size_t limit = options_.max_size ? std::min(options_.max_size, kSizeCap) : kSizeCap;
    if (role == Role::Random) {
      // Uniform over operations and over the sizes opened so far; one size
      // further only once those are used up.
      std::size_t k = 1;
      for (const auto& [s, size] : size_) k = std::max(k, size);
      k = std::min(k, limit);
      const std::size_t pick = std::uniform_int_distribution<std::size_t>(1, k)(rng_);
      if (auto c = generate(pick, DslSubset::Full, uniform_)) return CubeAssignment{*c, DslSubset::Full};
      for (std::size_t size = 1; size <= std::min(k + 1, limit); ++size) {
        if (auto c = generate(size, DslSubset::Full, uniform_)) return CubeAssignment{*c, DslSubset::Full};
      }
      return std::nullopt;
    }
    std::size_t& size = size_.try_emplace(subset, 1).first->second;
    while (size <= limit) {
      if (auto c = generate(size, subset, model_)) return CubeAssignment{*c, subset};
      ++size;
    }
    return std::nullopt;
  }

  void on_batch(const ScoreBatch& b) {
    for (const auto& [ops, s] : b.scores) model_.update(ops, s);
    model_.decay();
    result_.stats.programs += b.scores.size();
  }

  /// Returns true when the search should end.
  bool on_solution(SolutionFound&& f) {
    const std::string key = to_string(f.program);
    if (!seen_.insert(key).second) return false;
    Solution s;
    s.sql = to_sql(f.program, inst_.inputs, f.projection);
    s.program = std::move(f.program);
    s.projection = std::move(f.projection);
    s.elapsed_seconds = seconds();
    s.cube = std::move(f.cube);
    spdlog::debug("solution after {:.3f}s from worker {}: {}", s.elapsed_seconds, f.worker, s.sql);
    result_.solutions.push_back(std::move(s));
    return options_.mode == SearchMode::First;
  }

  void on_crash(const WorkerCrash& c) {
    ++result_.stats.crashes;
    spdlog::warn("worker {} failed on a cube: {}", c.worker, c.what);
    if (crashed_.insert(c.cube).second) requeued_.push_back(c.cube);
  }

  bool over_budget() const {
    return options_.program_budget && result_.stats.programs >= options_.program_budget;
  }

  double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

  SynthesisResult finish(bool space_done) {
    result_.elapsed_seconds = seconds();
    result_.stats.cubes = trie_.generated();
    if (!result_.solutions.empty()) {
      result_.status = SynthesisStatus::Solved;
    } else if (space_done || over_budget()) {
      result_.status = SynthesisStatus::Exhausted;
    } else {
      result_.status = SynthesisStatus::Timeout;
    }
    return std::move(result_);
  }

 private:
  std::optional<std::vector<Op>> generate(std::size_t size, DslSubset subset, const BigramModel& model) {
    auto c = generate_cube(model, size, trie_, subset, rng_);
    if (c) result_.stats.largest_size = std::max(result_.stats.largest_size, size);
    return c;
  }

  const Instance& inst_;
  const SynthesisOptions& options_;
  Clock::time_point start_;
  BigramModel model_;
  /// Never updated: every operation stays equally likely.
  const BigramModel uniform_;
  CubeTrie trie_;
  std::mt19937_64 rng_;
  std::vector<Role> roles_;
  std::map<DslSubset, std::size_t> size_;
  std::deque<std::vector<Op>> requeued_;
  std::set<std::vector<Op>> crashed_;
  std::set<std::string> seen_;
  SynthesisResult result_;
};

SynthesisResult run_sequential(const Instance& inst, const SynthesisOptions& o, Clock::time_point start,
                               Clock::time_point deadline) {
  const ArgumentSpace space = build_argument_space(inst, o.space);
  const ExpectedOutput expected(inst.output);
  SynthesisOptions one = o;
  one.workers = 1;
  Coordinator coord(inst, one, start);
  CubeSolver solver(inst, space, expected, o.batch_size);
  bool done = false;
  std::size_t programs = 0;
  CubeSolver::Hooks hooks;
  hooks.batch = [&](ScoreBatch&& b) { programs += b.scores.size(); };
  hooks.solution = [&](SolutionFound&& f) {
    done = coord.on_solution(std::move(f));
    return !done;
  };
  hooks.stop = [&] { return Clock::now() > deadline || (o.program_budget && programs >= o.program_budget); };
  const std::size_t limit = o.max_size ? std::min(o.max_size, kSizeCap) : kSizeCap;
  const std::vector<Op> all(kAllOps.begin(), kAllOps.end());
  bool finished = true;
  for (std::size_t size = 1; size <= limit && !done; ++size) {
    auto [n, complete] = solver.solve(Shape::uniform(size, all), {}, 0, hooks);
    if (!complete) {
      finished = false;
      break;
    }
  }
  SynthesisResult r = coord.finish(finished && !done);
  r.stats.programs = programs;
  return r;
}

SynthesisResult run_deterministic(const Instance& inst, const SynthesisOptions& o, Clock::time_point start,
                                  Clock::time_point deadline) {
  const ArgumentSpace space = build_argument_space(inst, o.space);
  const ExpectedOutput expected(inst.output);
  Coordinator coord(inst, o, start);
  CubeSolver solver(inst, space, expected, o.batch_size);
  bool done = false;
  CubeSolver::Hooks hooks;
  hooks.batch = [&](ScoreBatch&& b) { coord.on_batch(b); };
  hooks.solution = [&](SolutionFound&& f) {
    done = coord.on_solution(std::move(f));
    return !done;
  };
  hooks.stop = [&] { return Clock::now() > deadline || coord.over_budget(); };

  std::vector<bool> active(coord.roles().size(), true);
  std::size_t live = active.size();
  bool interrupted = false;
  while (live > 0 && !done && !interrupted) {
    for (std::size_t w = 0; w < active.size() && !done; ++w) {
      if (!active[w]) continue;
      if (hooks.stop()) {
        interrupted = true;
        break;
      }
      auto a = coord.next_cube(coord.roles()[w]);
      if (!a) {
        active[w] = false;
        --live;
        continue;
      }
      auto [n, complete] = solver.solve(Shape::cube(a->cube), a->cube, w, hooks);
      if (!complete && !done) interrupted = true;
    }
  }
  return coord.finish(live == 0);
}

SynthesisResult run_parallel(const Instance& inst, const SynthesisOptions& o, Clock::time_point start,
                             Clock::time_point deadline) {
  const ArgumentSpace space = build_argument_space(inst, o.space);
  const ExpectedOutput expected(inst.output);
  Coordinator coord(inst, o, start);
  const std::size_t n = coord.roles().size();

  Channel<WorkerMessage> inbox;
  std::vector<Channel<CoordinatorMessage>> outboxes(n);
  std::stop_source stop;
  std::vector<std::jthread> threads;
  threads.reserve(n);
  for (std::size_t w = 0; w < n; ++w) {
    threads.emplace_back([&, w] {
      CubeSolver solver(inst, space, expected, o.batch_size);
      const auto token = stop.get_token();
      CubeSolver::Hooks hooks;
      hooks.batch = [&](ScoreBatch&& b) { inbox.push(std::move(b)); };
      hooks.solution = [&](SolutionFound&& f) {
        inbox.push(std::move(f));
        return o.mode == SearchMode::All;
      };
      hooks.stop = [&] { return token.stop_requested() || Clock::now() > deadline; };
      while (!token.stop_requested()) {
        inbox.push(CubeRequest{w});
        CoordinatorMessage m = outboxes[w].pop();
        auto* a = std::get_if<CubeAssignment>(&m);
        if (!a) return;
        try {
          auto [count, complete] = solver.solve(Shape::cube(a->cube), a->cube, w, hooks);
          inbox.push(Exhausted{w, a->cube, count, complete});
        } catch (const std::exception& e) {
          inbox.push(WorkerCrash{w, a->cube, e.what()});
        }
      }
    });
  }

  std::size_t live = n;
  bool done = false;
  while (live > 0 && !done) {
    auto m = inbox.pop_until(deadline);
    if (!m) break;
    std::visit(
        [&](auto& msg) {
          using T = std::decay_t<decltype(msg)>;
          if constexpr (std::is_same_v<T, CubeRequest>) {
            auto a = coord.over_budget() ? std::nullopt : coord.next_cube(coord.roles()[msg.worker]);
            if (a) {
              outboxes[msg.worker].push(std::move(*a));
            } else {
              outboxes[msg.worker].push(Shutdown{});
              --live;
            }
          } else if constexpr (std::is_same_v<T, ScoreBatch>) {
            coord.on_batch(msg);
          } else if constexpr (std::is_same_v<T, SolutionFound>) {
            done = coord.on_solution(std::move(msg));
          } else if constexpr (std::is_same_v<T, WorkerCrash>) {
            coord.on_crash(msg);
          }
        },
        *m);
  }
  stop.request_stop();
  for (auto& out : outboxes) out.push(Shutdown{});
  for (auto& t : threads) t.join();
  // Solutions that raced the shutdown still count in mode all.
  while (auto m = inbox.try_pop()) {
    if (auto* f = std::get_if<SolutionFound>(&*m); f && o.mode == SearchMode::All && Clock::now() <= deadline) {
      coord.on_solution(std::move(*f));
    } else if (auto* b = std::get_if<ScoreBatch>(&*m)) {
      coord.on_batch(*b);
    }
  }
  return coord.finish(live == 0 && !done);
}

}  // namespace

CubeSolver::CubeSolver(const Instance& inst, const ArgumentSpace& space, const ExpectedOutput& expected,
                       std::size_t batch_size)
    : inst_(inst), space_(space), expected_(expected), batch_size_(std::max<std::size_t>(1, batch_size)) {}

std::pair<std::size_t, bool> CubeSolver::solve(const Shape& shape, const std::vector<Op>& cube, std::size_t worker,
                                               Hooks& hooks) {
  EvaluatingSink sink(inst_, expected_, batch_size_, worker, cube, hooks);
  const EnumerationStats stats = enumerate(space_, shape, sink);
  sink.flush();
  return {sink.programs(), !stats.stopped};
}

SynthesisResult synthesize(const Instance& inst, const SynthesisOptions& options) {
  const auto start = Clock::now();
  if (options.time_limit.count() <= 0) {
    SynthesisResult r;
    r.status = SynthesisStatus::Timeout;
    return r;
  }
  const auto deadline = start + options.time_limit;
  if (options.sequential) return run_sequential(inst, options, start, deadline);
  if (options.deterministic) return run_deterministic(inst, options, start, deadline);
  return run_parallel(inst, options, start, deadline);
}

}  // namespace sqlpbe
