#include "anchorsim/chain/pool.hpp"

#include "anchorsim/common/error.hpp"

namespace anchorsim::chain {

TransactionPool::Key TransactionPool::emplace(ledger::Transaction tx, ledger::Digest id, double now)
{
  if (tx.fee < 0)
  {
    throw InvalidArgument("negative fee");
  }
  observe(now);
  Key const key{tx.fee, next_arrival_++};
  index_.insert(key);
  entries_.emplace(key.arrival, PendingTx{std::move(tx), id, now, key.arrival});
  return key;
}

std::size_t TransactionPool::insert(ledger::Transaction tx, ledger::Digest id, double now)
{
  auto const key = emplace(std::move(tx), id, now);
  return index_.order_of_key(key);
}

void TransactionPool::push(ledger::Transaction tx, ledger::Digest id, double now)
{
  emplace(std::move(tx), id, now);
}

std::vector<PendingTx> TransactionPool::pop_front(std::size_t n, double now)
{
  observe(now);
  std::vector<PendingTx> out;
  out.reserve(std::min(n, index_.size()));
  while (out.size() < n && !index_.empty())
  {
    auto it = index_.begin();
    auto e  = entries_.find(it->arrival);
    out.push_back(std::move(e->second));
    entries_.erase(e);
    index_.erase(it);
  }
  return out;
}

std::vector<Tokens> TransactionPool::fees() const
{
  std::vector<Tokens> out;
  out.reserve(index_.size());
  for (auto const &k : index_)
  {
    out.push_back(k.fee);
  }
  return out;
}

void TransactionPool::observe(double now)
{
  if (!started_)
  {
    started_    = true;
    first_time_ = now;
    last_time_  = now;
    return;
  }
  if (now > last_time_)
  {
    area_ += static_cast<double>(index_.size()) * (now - last_time_);
    last_time_ = now;
  }
}

double TransactionPool::average_length(double now) const
{
  if (!started_)
  {
    return 0.0;
  }
  double area = area_;
  double end  = last_time_;
  if (now > last_time_)
  {
    area += static_cast<double>(index_.size()) * (now - last_time_);
    end = now;
  }
  double const span = end - first_time_;
  return span > 0.0 ? area / span : static_cast<double>(index_.size());
}

}  // namespace anchorsim::chain
