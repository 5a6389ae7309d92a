#include "anchorsim/channel/channel.hpp"

#include "anchorsim/common/error.hpp"

#include <algorithm>

namespace anchorsim::channel {

Bytes ChannelState::signing_bytes() const
{
  Writer w;
  w.field(as_bytes("anchorsim/channel-state"));
  w.raw(channel_id.view());
  w.u64(round);
  w.i64(balance);
  w.u32(static_cast<std::uint32_t>(ownership.size()));
  for (auto const &d : ownership)
  {
    w.raw(d.view());
  }
  return std::move(w).take();
}

bool ChannelState::owns(Digest const &key) const
{
  return std::binary_search(ownership.begin(), ownership.end(), key);
}

char const *to_string(Step step)
{
  switch (step)
  {
  case Step::SendLockDigest: return "send-lock-digest";
  case Step::LockContent: return "lock-content";
  case Step::LockFee: return "lock-fee";
  case Step::UnlockContent: return "unlock-content";
  case Step::UnlockFee: return "unlock-fee";
  case Step::SignOwnership: return "sign-ownership";
  }
  return "?";
}

double ChannelConfig::nominal_round_latency() const
{
  double t = 0.0;
  for (double d : step_durations)
  {
    t += d;
  }
  return t;
}

void ChannelConfig::validate() const
{
  if (!(step_timeout > 0.0))
  {
    throw InvalidArgument("step timeout must be positive");
  }
  for (double d : step_durations)
  {
    if (!(d >= 0.0))
    {
      throw InvalidArgument("step durations must be non-negative");
    }
  }
}

StepTiming execute_with_timer(double duration, StepFault const &fault, ChannelConfig const &config)
{
  if (fault.delay < 0.0)
  {
    throw InvalidArgument("negative injected delay");
  }
  double const needed = duration + fault.delay;
  if (config.timers && (fault.halt || needed > config.step_timeout))
  {
    return {false, true, config.step_timeout};
  }
  if (fault.halt)
  {
    return {false, false, 0.0};
  }
  return {true, false, needed};
}

Channel::Channel(Digest id, ledger::Identity client, ledger::Identity masp, Tokens deposit, ChannelConfig config,
                 ledger::SignatureScheme const &scheme, std::uint64_t seed)
  : id_(id)
  , client_(std::move(client))
  , masp_(std::move(masp))
  , deposit_(deposit)
  , config_(config)
  , scheme_(scheme)
  , rng_(seed)
{
  if (deposit_ < 0)
  {
    throw InvalidArgument("negative channel deposit");
  }
  config_.validate();
  ChannelState genesis;
  genesis.channel_id = id_;
  genesis.balance    = deposit_;
  sign_both(genesis);
  log_.push_back(std::move(genesis));
}

void Channel::sign_both(ChannelState &s) const
{
  auto const m = s.signing_bytes();
  s.client_sig = scheme_.sign(client_, m);
  s.masp_sig   = scheme_.sign(masp_, m);
}

void Channel::roll_back_locks()
{
  for (auto it = locks_.rbegin(); it != locks_.rend(); ++it)
  {
    it->roll_back();
  }
}

void Channel::release_stalled()
{
  if (stalled_)
  {
    roll_back_locks();
    stalled_ = false;
  }
}

RoundResult Channel::transfer_round(Tokens fee, Digest const &content, ContentStore const &store, double now,
                                    RoundFaults const &faults)
{
  RoundResult res;
  res.started  = now;
  res.finished = now;
  res.fee      = fee;
  res.content  = content;

  auto const &prev = log_.back();
  if (status_ != ChannelStatus::Open || stalled_ || fee <= 0 || fee > prev.balance || !store.contains(content) ||
      prev.owns(content))
  {
    return res;
  }

  locks_.clear();
  Bytes  secret;
  Digest lock_digest;
  double t = now;

  auto fail = [&](Step step, RoundOutcome outcome) {
    res.outcome     = outcome;
    res.failed_step = step;
    res.finished    = t;
    if (outcome == RoundOutcome::Stalled)
    {
      stalled_ = true;
    }
    else
    {
      roll_back_locks();
    }
    return res;
  };

  ChannelState next;
  for (std::size_t i = 0; i < kSteps; ++i)
  {
    auto const step   = static_cast<Step>(i);
    auto const timing = execute_with_timer(config_.step_durations[i], faults[i], config_);
    t += timing.elapsed;
    if (timing.timed_out)
    {
      return fail(step, RoundOutcome::RolledBack);
    }
    if (!timing.done)
    {
      return fail(step, RoundOutcome::Stalled);
    }

    switch (step)
    {
    case Step::SendLockDigest:
      secret      = rng_.bytes(32);
      lock_digest = ledger::hash(secret);
      break;
    case Step::LockContent: locks_.emplace_back(lock_digest, content, client_.address()); break;
    case Step::LockFee: locks_.emplace_back(lock_digest, fee, masp_.address()); break;
    case Step::UnlockContent:
    {
      Bytes offered = secret;
      if (faults[i].wrong_preimage)
      {
        offered.back() ^= 0xff;
      }
      if (!locks_[0].unlock(offered))
      {
        return fail(step, RoundOutcome::RolledBack);
      }
      next.channel_id = id_;
      next.round      = prev.round + 1;
      next.balance    = prev.balance - fee;
      next.ownership  = prev.ownership;
      next.ownership.insert(std::upper_bound(next.ownership.begin(), next.ownership.end(), content), content);
      next.client_sig = scheme_.sign(client_, next.signing_bytes());
      break;
    }
    case Step::UnlockFee:
    {
      Bytes offered = secret;
      if (faults[i].wrong_preimage)
      {
        offered.back() ^= 0xff;
      }
      if (!locks_[1].unlock(offered))
      {
        return fail(step, RoundOutcome::RolledBack);
      }
      break;
    }
    case Step::SignOwnership:
      next.masp_sig = scheme_.sign(masp_, next.signing_bytes());
      break;
    }
  }

  log_.push_back(std::move(next));
  locks_.clear();
  res.outcome  = RoundOutcome::Committed;
  res.finished = t;
  return res;
}

bool verify_state_log(std::span<ChannelState const> log, Digest const &channel_id, Tokens deposit,
                      Address const &client, Address const &masp, ledger::SignatureScheme const &scheme)
{
  if (log.empty())
  {
    return false;
  }
  auto const &g = log.front();
  if (g.round != 0 || g.balance != deposit || !g.ownership.empty())
  {
    return false;
  }
  for (std::size_t i = 0; i < log.size(); ++i)
  {
    auto const &s = log[i];
    if (s.channel_id != channel_id || !std::is_sorted(s.ownership.begin(), s.ownership.end()))
    {
      return false;
    }
    auto const m = s.signing_bytes();
    if (!scheme.verify(client, m, s.client_sig) || !scheme.verify(masp, m, s.masp_sig))
    {
      return false;
    }
    if (i > 0)
    {
      auto const &p = log[i - 1];
      if (s.round != p.round + 1 || s.balance > p.balance || s.balance < 0 ||
          !std::includes(s.ownership.begin(), s.ownership.end(), p.ownership.begin(), p.ownership.end()))
      {
        return false;
      }
    }
  }
  return true;
}

}  // namespace anchorsim::channel
