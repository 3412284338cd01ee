#pragma once

// Deterministic discrete-event engine: simulation clock, ordered event queue,
// and seeded random streams shared by the rest of the simulator.

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace manetsim {

inline constexpr const char* kVersion = "0.1.0";

using SimTime = double;        // seconds since run start
using NodeId = std::int32_t;   // dense ids, 0..node_count-1
inline constexpr NodeId kBroadcast = -1;

// Consistency violation inside a run; the CLI maps this to exit code 2.
class invariant_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// One independent draw sequence per (seed, label) pair. The mapping from raw
// engine output to doubles/ints is done by hand so the same (seed, label)
// yields the same sequence on every platform.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string label) : label_(std::move(label)) {
    std::uint64_t mix = seed ^ fnv1a64(label_);
    std::uint64_t a = splitmix64(mix);
    std::uint64_t b = splitmix64(mix);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    gen_.seed(seq);
  }

  const std::string& label() const { return label_; }

  std::uint64_t next_u64() { return gen_(); }

  // [0, 1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // [lo, hi); uniform(x, x) == x
  double uniform(double lo, double hi) {
    if (lo > hi) throw std::invalid_argument("uniform: lo > hi");
    if (lo == hi) return lo;
    double v = lo + uniform01() * (hi - lo);
    if (v >= hi) v = std::nextafter(hi, lo);  // guard against rounding onto hi
    return v;
  }

  // inclusive on both ends, rejection-sampled so the draw is unbiased
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
    std::uint64_t range = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    if (range == 0) return static_cast<std::int64_t>(next_u64());
    std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return lo + static_cast<std::int64_t>(v % range);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::string label_;
  std::mt19937_64 gen_;
};

// Event queue totally ordered by (fire_at, insertion seq). Cancellation is
// lazy: cancelled ids are skipped when they reach the top of the heap.
class Engine {
 public:
  explicit Engine(SimTime duration) : duration_(duration) {}

  SimTime now() const { return now_; }
  SimTime duration() const { return duration_; }

  std::uint64_t schedule(SimTime fire_at, std::function<void()> action) {
    if (fire_at < now_) throw invariant_error("schedule: event in the past");
    std::uint64_t id = next_seq_++;
    heap_.push_back(Event{fire_at, id, std::move(action)});
    std::push_heap(heap_.begin(), heap_.end(), Later{});
    ++scheduled_;
    return id;
  }

  // Returns false if the id was already cancelled. Cancelling an event that
  // has fired is a caller bug and breaks the end-of-run bookkeeping check.
  bool cancel(std::uint64_t id) {
    if (id >= next_seq_) return false;
    if (!cancelled_.insert(id).second) return false;
    ++cancelled_count_;
    return true;
  }

  struct Fired {
    SimTime fire_at;
    std::uint64_t seq;
    std::function<void()> action;
  };

  // Smallest (fire_at, seq) event, or nullopt once the queue is empty
  // (run-complete signal). Advances the clock to the event time.
  std::optional<Fired> pop_next() {
    skip_cancelled();
    if (heap_.empty()) return std::nullopt;
    Event ev = pop_top();
    now_ = ev.fire_at;
    ++delivered_;
    mix_hash(ev.fire_at, ev.seq);
    return Fired{ev.fire_at, ev.seq, std::move(ev.action)};
  }

  std::optional<SimTime> peek_next_time() {
    skip_cancelled();
    if (heap_.empty()) return std::nullopt;
    return heap_.front().fire_at;
  }

  // Executes everything scheduled at or before t_end, then pins the clock to
  // t_end so the run finishes exactly at the configured duration.
  void run_until(SimTime t_end) {
    while (true) {
      auto t = peek_next_time();
      if (!t || *t > t_end) break;
      auto ev = pop_next();
      ev->action();
    }
    now_ = std::max(now_, t_end);
  }

  // Counts whatever is still pending as cancelled, so that at run end
  // delivered == scheduled - cancelled holds exactly.
  std::size_t drain_remaining() {
    std::size_t drained = 0;
    while (!heap_.empty()) {
      Event ev = pop_top();
      auto it = cancelled_.find(ev.seq);
      if (it != cancelled_.end()) {
        cancelled_.erase(it);
      } else {
        ++cancelled_count_;
        ++drained;
      }
    }
    return drained;
  }

  std::uint64_t scheduled_count() const { return scheduled_; }
  std::uint64_t delivered_count() const { return delivered_; }
  std::uint64_t cancelled_count() const { return cancelled_count_; }
  std::size_t pending_count() const { return heap_.size(); }

  // Order-sensitive digest of every delivered event; equal configs + seeds
  // must replay to equal hashes.
  std::uint64_t event_hash() const { return log_hash_; }

 private:
  struct Event {
    SimTime fire_at;
    std::uint64_t seq;
    std::function<void()> action;
  };
  struct Later {  // min-heap on (fire_at, seq)
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  Event pop_top() {
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Event ev = std::move(heap_.back());
    heap_.pop_back();
    return ev;
  }

  void skip_cancelled() {
    while (!heap_.empty()) {
      auto it = cancelled_.find(heap_.front().seq);
      if (it == cancelled_.end()) return;
      cancelled_.erase(it);
      pop_top();
    }
  }

  void mix_hash(SimTime t, std::uint64_t seq) {
    std::uint64_t bits;
    static_assert(sizeof(double) == sizeof(std::uint64_t));
    std::memcpy(&bits, &t, sizeof(bits));
    log_hash_ ^= bits + 0x9e3779b97f4a7c15ull + (log_hash_ << 6) + (log_hash_ >> 2);
    log_hash_ ^= seq + 0x9e3779b97f4a7c15ull + (log_hash_ << 6) + (log_hash_ >> 2);
  }

  SimTime now_ = 0;
  SimTime duration_;
  std::uint64_t next_seq_ = 0;
  std::vector<Event> heap_;
  std::unordered_set<std::uint64_t> cancelled_;
  std::uint64_t scheduled_ = 0;
  std::uint64_t delivered_ = 0;
  std::uint64_t cancelled_count_ = 0;
  std::uint64_t log_hash_ = 14695981039346656037ull;
};

}  // namespace manetsim
