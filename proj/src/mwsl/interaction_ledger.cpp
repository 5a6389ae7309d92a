#include "anchorsim/mwsl/interaction_ledger.hpp"

#include "anchorsim/common/error.hpp"

#include <algorithm>

namespace anchorsim::mwsl {

double DecayParams::factor(std::uint64_t carrying_block, std::uint64_t latest_block) const
{
  if (!enabled)
  {
    return 1.0;
  }
  return freshness(carrying_block, latest_block, block_rate, decay);
}

double market_worth(std::span<HistoryEntry const> history, std::uint64_t latest_block, DecayParams const &decay)
{
  double w = 0.0;
  if (history.size() < 2)
  {
    return w;
  }
  for (std::size_t q = 0; q + 1 < history.size(); ++q)
  {
    w += history[q].value * decay.factor(history[q].block, latest_block);
  }
  return w;
}

InteractionLedger::InteractionLedger(DecayParams decay)
  : decay_(decay)
{
  if (decay_.enabled && !(decay_.decay > 0.0 && decay_.decay < 1.0))
  {
    throw InvalidArgument("freshness decay must lie in (0, 1)");
  }
  if (!(decay_.block_rate > 0.0))
  {
    throw InvalidArgument("block rate must be positive");
  }
}

void InteractionLedger::record(ClientId client, MaspId masp, bool satisfied, double value, std::uint64_t block)
{
  if (value < 0.0)
  {
    throw InvalidArgument("market value must be non-negative");
  }
  auto [it, inserted] = pairs_.try_emplace({masp, client});
  auto &rec           = it->second;
  if (journaling_)
  {
    journal_.push_back(Undo{masp, client, inserted, satisfied, rec.worth_at_latest});
  }
  if (inserted)
  {
    auto &list = clients_[masp];
    list.insert(std::upper_bound(list.begin(), list.end(), client), client);
  }
  else
  {
    if (block < rec.latest_block())
    {
      throw InvalidArgument("opinions must arrive in block order per pair");
    }
    // the previous latest entry now enters the worth sum
    auto const &prev     = rec.history.back();
    rec.worth_at_latest = rec.worth_at_latest * decay_.factor(prev.block, block) +
                          prev.value * decay_.factor(prev.block, block);
  }
  (satisfied ? rec.positive : rec.negative) += 1;
  rec.history.push_back(HistoryEntry{rec.opinion(), value, block, satisfied});
  totals_[masp] += 1;
}

void InteractionLedger::checkpoint()
{
  journal_.clear();
  journaling_ = true;
}

void InteractionLedger::rollback()
{
  for (auto it = journal_.rbegin(); it != journal_.rend(); ++it)
  {
    auto pos = pairs_.find({it->masp, it->client});
    auto &rec = pos->second;
    rec.history.pop_back();
    (it->satisfied ? rec.positive : rec.negative) -= 1;
    rec.worth_at_latest = it->previous_worth;
    totals_[it->masp] -= 1;
    if (it->created)
    {
      pairs_.erase(pos);
      auto &list = clients_[it->masp];
      list.erase(std::lower_bound(list.begin(), list.end(), it->client));
      if (list.empty())
      {
        clients_.erase(it->masp);
      }
      if (totals_[it->masp] == 0)
      {
        totals_.erase(it->masp);
      }
    }
  }
  journal_.clear();
  journaling_ = false;
}

void InteractionLedger::commit()
{
  journal_.clear();
  journaling_ = false;
}

PairRecord const *InteractionLedger::find(ClientId client, MaspId masp) const
{
  auto it = pairs_.find({masp, client});
  return it == pairs_.end() ? nullptr : &it->second;
}

std::vector<ClientId> const &InteractionLedger::clients_of(MaspId masp) const
{
  static std::vector<ClientId> const none;
  auto                               it = clients_.find(masp);
  return it == clients_.end() ? none : it->second;
}

std::uint64_t InteractionLedger::total_interactions(MaspId masp) const
{
  auto it = totals_.find(masp);
  return it == totals_.end() ? 0 : it->second;
}

double InteractionLedger::worth(PairRecord const &rec, std::uint64_t latest_block) const
{
  if (rec.history.empty())
  {
    return 0.0;
  }
  return rec.worth_at_latest * decay_.factor(rec.latest_block(), latest_block);
}

double familiarity(InteractionLedger const &ledger, ClientId client, MaspId masp)
{
  auto const total = ledger.total_interactions(masp);
  if (total == 0)
  {
    throw InvalidArgument("MASP " + std::to_string(masp) + " has no interactions");
  }
  auto const *rec = ledger.find(client, masp);
  return rec == nullptr ? 0.0 : static_cast<double>(rec->interactions()) / static_cast<double>(total);
}

}  // namespace anchorsim::mwsl
