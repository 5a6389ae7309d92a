#include "anchorsim/chain/anchor_chain.hpp"

#include "anchorsim/common/error.hpp"

#include <cmath>

namespace anchorsim::chain {

namespace {

constexpr double kClockSlack = 1e-9;

}  // namespace

double ChainParams::honest_broadcast() const
{
  return 1.0 - static_cast<double>(attackers) / static_cast<double>(nodes);
}

void ChainParams::validate() const
{
  if (!(block_interval > 0.0))
  {
    throw InvalidArgument("block_interval must be positive");
  }
  if (block_capacity == 0)
  {
    throw InvalidArgument("block_capacity must be positive");
  }
  if (nodes == 0 || super_nodes == 0 || super_nodes > nodes)
  {
    throw InvalidArgument("need 1 <= super_nodes <= nodes");
  }
  if (attackers >= nodes)
  {
    throw InvalidArgument("p_b must be positive: attackers must be fewer than nodes");
  }
  if (!(avg_neighbors > 0.0) || !(avg_bandwidth > 0.0))
  {
    throw InvalidArgument("avg_neighbors and avg_bandwidth must be positive");
  }
}

AnchorChain::AnchorChain(ChainParams params, ledger::SignatureScheme &scheme, std::uint64_t seed)
  : params_(params)
  , scheme_(scheme)
  , rng_(Rng(seed).fork(0xc4a1))
{
  params_.validate();
  for (std::size_t i = 0; i < params_.super_nodes; ++i)
  {
    super_nodes_.push_back(scheme_.generate(seed, "super-node/" + std::to_string(i)));
  }
  next_block_time_ = params_.poisson_blocks ? rng_.exponential(params_.block_rate()) : params_.block_interval;
}

std::size_t AnchorChain::submit(ledger::Transaction tx, double now)
{
  if (!ledger::verify_transaction(scheme_, tx))
  {
    throw ValidationError(std::string("rejected ") + ledger::to_string(tx.kind) +
                          " transaction: bad signature");
  }
  auto const id = ledger::transaction_id(tx);
  trace_.submitted(id, now);
  return pool_.insert(std::move(tx), id, now);
}

ledger::Block const &AnchorChain::produce_block(double now)
{
  if (now + kClockSlack < next_block_time_)
  {
    throw InvalidArgument("block produced before the interval elapsed");
  }
  auto packed = pool_.pop_front(params_.block_capacity, now);

  ledger::Block block;
  block.header.index        = ledger_.height();
  block.header.previous     = ledger_.tip();
  block.header.timestamp_us = static_cast<std::int64_t>(std::llround(now * 1e6));
  block.header.producer     = super_nodes_[producer_of(ledger_.height())].address();
  block.transactions.reserve(packed.size());
  for (auto &p : packed)
  {
    trace_.registered(p.id, now, ledger_.height());
    block.transactions.push_back(std::move(p.tx));
  }
  block.header.tx_root = ledger::transactions_root(block.transactions);
  trace_.block(now, block.transactions.size());
  ledger_.append(std::move(block));

  double const gap = params_.poisson_blocks ? rng_.exponential(params_.block_rate()) : params_.block_interval;
  next_block_time_ = std::max(next_block_time_, now) + gap;

  auto const &out = ledger_.blocks().back();
  for (auto const &obs : observers_)
  {
    obs(out, now);
  }
  return out;
}

void AnchorChain::drive(EventLoop &loop, double until)
{
  if (next_block_time_ > until)
  {
    return;
  }
  loop.schedule_at(next_block_time_, [this, &loop, until] {
    produce_block(loop.now());
    drive(loop, until);
  });
}

}  // namespace anchorsim::chain
