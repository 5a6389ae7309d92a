#pragma once

#include "anchorsim/chain/event_loop.hpp"
#include "anchorsim/chain/ledger_store.hpp"
#include "anchorsim/chain/pool.hpp"
#include "anchorsim/chain/trace.hpp"
#include "anchorsim/common/rng.hpp"
#include "anchorsim/ledger/crypto.hpp"

#include <functional>

namespace anchorsim::chain {

struct ChainParams
{
  double      block_interval{5.0};  ///< 1/lambda, seconds
  std::size_t block_capacity{2000};
  std::size_t nodes{8};
  std::size_t super_nodes{4};
  std::size_t attackers{0};
  double      avg_neighbors{4.0};       ///< k-bar
  double      avg_bandwidth{1.0e6};     ///< b-bar, bytes per second
  /// Exponential block intervals with mean block_interval instead of a fixed cadence.
  bool        poisson_blocks{false};

  double block_rate() const { return 1.0 / block_interval; }
  /// DPoS never forks.
  static constexpr double p_fork() { return 0.0; }
  /// p_b = 1 - |A|/|M|.
  double honest_broadcast() const;
  void   validate() const;
};

/// DPoS anchor chain: a fee-priority pool drained by super nodes taking turns
/// at the configured block interval onto a single fork-free ledger.
class AnchorChain
{
public:
  using BlockObserver = std::function<void(ledger::Block const &, double)>;

  AnchorChain(ChainParams params, ledger::SignatureScheme &scheme, std::uint64_t seed);

  /// Validates the signature and queues the transaction; returns its pool position.
  std::size_t submit(ledger::Transaction tx, double now);

  /// Packs the first min(S_b, |pool|) transactions into the next block.
  /// Requires now >= next_block_time().
  ledger::Block const &produce_block(double now);

  double next_block_time() const { return next_block_time_; }

  /// Schedules block production on `loop` up to and including `until`.
  void drive(EventLoop &loop, double until);

  void on_block(BlockObserver observer) { observers_.push_back(std::move(observer)); }

  ChainParams const                   &params() const { return params_; }
  TransactionPool const               &pool() const { return pool_; }
  Ledger const                        &ledger() const { return ledger_; }
  ChainTrace const                    &trace() const { return trace_; }
  std::vector<ledger::Identity> const &super_nodes() const { return super_nodes_; }
  ledger::SignatureScheme             &scheme() const { return scheme_; }

  /// Index into super_nodes() of the producer of block `height`.
  std::size_t producer_of(std::size_t height) const { return height % super_nodes_.size(); }

  double average_queue_length(double now) const { return pool_.average_length(now); }

private:
  ChainParams                   params_;
  ledger::SignatureScheme      &scheme_;
  Rng                           rng_;
  std::vector<ledger::Identity> super_nodes_;
  TransactionPool               pool_;
  Ledger                        ledger_;
  ChainTrace                    trace_;
  std::vector<BlockObserver>    observers_;
  double                        next_block_time_;
};

}  // namespace anchorsim::chain
