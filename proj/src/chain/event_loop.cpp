#include "anchorsim/chain/event_loop.hpp"

#include "anchorsim/common/error.hpp"

namespace anchorsim::chain {

void EventLoop::schedule_at(double time, Action action)
{
  if (time < now_)
  {
    throw InvalidArgument("cannot schedule an event in the past");
  }
  queue_.push(Event{time, next_seq_++, std::move(action)});
}

void EventLoop::run_until(double horizon)
{
  while (!queue_.empty() && queue_.top().time <= horizon)
  {
    // copy out before pop: the action may schedule more events
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.time;
    ev.action();
  }
  if (horizon > now_)
  {
    now_ = horizon;
  }
}

void EventLoop::run()
{
  while (!queue_.empty())
  {
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.time;
    ev.action();
  }
}

}  // namespace anchorsim::chain
