#pragma once

#include "anchorsim/ledger/transaction.hpp"

#include <vector>

namespace anchorsim::ledger {

struct BlockHeader
{
  std::uint64_t index{0};
  Digest        previous;
  /// Simulated time in microseconds.
  std::int64_t  timestamp_us{0};
  Address       producer;
  Digest        tx_root;

  bool operator==(BlockHeader const &) const = default;
};

struct Block
{
  BlockHeader              header;
  std::vector<Transaction> transactions;

  Digest      digest() const;
  std::size_t accounting_size() const;
};

/// Hash over the ordered transaction ids.
Digest transactions_root(std::vector<Transaction> const &txs);

Bytes serialize_header(BlockHeader const &h);

}  // namespace anchorsim::ledger
