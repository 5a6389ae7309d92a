#pragma once

#include "anchorsim/ledger/block.hpp"

#include <unordered_map>
#include <vector>

namespace anchorsim::chain {

/// Append-only hash-chained block store with storage accounting.
class Ledger
{
public:
  /// Validates index and previous-digest linkage, then appends.
  void append(ledger::Block block);

  std::vector<ledger::Block> const &blocks() const { return blocks_; }
  std::size_t                       height() const { return blocks_.size(); }
  std::size_t                       total_bytes() const { return total_bytes_; }
  ledger::Digest                    tip() const;

  /// Re-verifies the whole chain and the byte total.
  bool verify() const;

  /// Index of the block holding transaction `id`, if any.
  std::optional<std::size_t> locate(ledger::Digest const &id) const;

private:
  std::vector<ledger::Block>                                          blocks_;
  std::unordered_map<ledger::Digest, std::size_t, ledger::DigestHash> tx_index_;
  std::size_t                                                         total_bytes_{0};
};

}  // namespace anchorsim::chain
