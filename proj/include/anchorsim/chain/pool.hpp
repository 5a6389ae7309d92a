#pragma once

#include "anchorsim/ledger/transaction.hpp"

#include <ext/pb_ds/assoc_container.hpp>
#include <ext/pb_ds/tree_policy.hpp>

#include <unordered_map>
#include <vector>

namespace anchorsim::chain {

struct PendingTx
{
  ledger::Transaction tx;
  ledger::Digest      id;
  double              submitted_at{0.0};
  std::uint64_t       arrival{0};
};

/// Preemptive priority pool: fee descending, FIFO among equal fees.
///
/// Also tracks the time-weighted average queue length E(L); every mutation
/// first integrates the current length up to the event time.
class TransactionPool
{
public:
  /// Inserts and returns the 0-based queue position the transaction landed at.
  std::size_t insert(ledger::Transaction tx, ledger::Digest id, double now);
  /// Inserts without computing the position.
  void push(ledger::Transaction tx, ledger::Digest id, double now);

  /// Removes and returns the first min(n, size) entries in queue order.
  std::vector<PendingTx> pop_front(std::size_t n, double now);

  std::size_t size() const { return index_.size(); }
  bool        empty() const { return index_.empty(); }

  /// Fees in queue order (test and audit helper; O(n)).
  std::vector<Tokens> fees() const;

  void   observe(double now);
  /// Time-weighted mean queue length over [first event, now].
  double average_length(double now) const;

private:
  struct Key
  {
    Tokens        fee;
    std::uint64_t arrival;
  };
  struct Order
  {
    bool operator()(Key const &a, Key const &b) const
    {
      return a.fee != b.fee ? a.fee > b.fee : a.arrival < b.arrival;
    }
  };
  using Tree = __gnu_pbds::tree<Key, __gnu_pbds::null_type, Order, __gnu_pbds::rb_tree_tag,
                                __gnu_pbds::tree_order_statistics_node_update>;

  Key emplace(ledger::Transaction tx, ledger::Digest id, double now);

  Tree                                         index_;
  std::unordered_map<std::uint64_t, PendingTx> entries_;
  std::uint64_t                                next_arrival_{0};

  bool   started_{false};
  double first_time_{0.0};
  double last_time_{0.0};
  double area_{0.0};
};

}  // namespace anchorsim::chain
