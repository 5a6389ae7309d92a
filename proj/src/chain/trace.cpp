#include "anchorsim/chain/trace.hpp"

#include "anchorsim/common/error.hpp"

namespace anchorsim::chain {

void ChainTrace::submitted(ledger::Digest const &id, double at)
{
  if (!started_)
  {
    started_ = true;
    start_   = at;
  }
  records_[id].submitted = at;
}

void ChainTrace::registered(ledger::Digest const &id, double at, std::size_t block)
{
  auto &r      = records_[id];
  r.registered = at;
  r.block      = block;
}

void ChainTrace::block(double at, std::size_t tx_count)
{
  if (!started_)
  {
    started_ = true;
    start_   = at;
  }
  blocks_.push_back({at, tx_count});
}

ChainTrace::Record const *ChainTrace::find(ledger::Digest const &id) const
{
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

double measure_throughput(ChainTrace const &trace, double from, double to)
{
  if (!(to > from))
  {
    throw InvalidArgument("throughput window must have positive length");
  }
  std::size_t packed = 0;
  for (auto const &b : trace.blocks())
  {
    if (b.time > from && b.time <= to)
    {
      packed += b.tx_count;
    }
  }
  return static_cast<double>(packed) / (to - from);
}

double measure_throughput(ChainTrace const &trace)
{
  if (trace.blocks().empty())
  {
    return 0.0;
  }
  return measure_throughput(trace, trace.start_time(), trace.blocks().back().time);
}

double measure_confirmation_latency(ChainTrace const &trace, ledger::Digest const &id)
{
  auto const *r = trace.find(id);
  if (r == nullptr)
  {
    throw LookupError("unknown transaction " + id.hex());
  }
  if (!r->registered)
  {
    throw LookupError("transaction " + id.hex() + " has not been registered");
  }
  return *r->registered - r->submitted;
}

}  // namespace anchorsim::chain
