#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

namespace anchorsim::chain {

/// Single-threaded discrete-event loop over a virtual clock (seconds).
/// Events at equal times fire in scheduling order.
class EventLoop
{
public:
  using Action = std::function<void()>;

  double now() const { return now_; }

  void schedule_at(double time, Action action);
  void schedule_in(double delay, Action action) { schedule_at(now_ + delay, std::move(action)); }

  /// Runs events with time <= horizon, then leaves the clock at horizon.
  void run_until(double horizon);
  /// Runs until no events remain.
  void run();

  std::size_t pending() const { return queue_.size(); }

private:
  struct Event
  {
    double        time;
    std::uint64_t seq;
    Action        action;
  };
  struct Later
  {
    bool operator()(Event const &a, Event const &b) const
    {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  double                                          now_{0.0};
  std::uint64_t                                   next_seq_{0};
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
};

}  // namespace anchorsim::chain
