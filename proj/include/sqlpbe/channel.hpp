#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>

namespace sqlpbe {

/// Unbounded multi-producer queue.
template <typename T>
class Channel {
 public:
  void push(T v) {
    {
      std::lock_guard lock(mu_);
      queue_.push_back(std::move(v));
    }
    cv_.notify_one();
  }

  T pop() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !queue_.empty(); });
    return take();
  }

  /// nullopt when the deadline passes first.
  template <typename Clock, typename Duration>
  std::optional<T> pop_until(const std::chrono::time_point<Clock, Duration>& deadline) {
    std::unique_lock lock(mu_);
    if (!cv_.wait_until(lock, deadline, [&] { return !queue_.empty(); })) return std::nullopt;
    return take();
  }

  std::optional<T> try_pop() {
    std::lock_guard lock(mu_);
    if (queue_.empty()) return std::nullopt;
    return take();
  }

 private:
  T take() {
    T v = std::move(queue_.front());
    queue_.pop_front();
    return v;
  }

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<T> queue_;
};

}  // namespace sqlpbe
