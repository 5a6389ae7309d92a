#include "anchorsim/chain/ledger_store.hpp"

#include "anchorsim/common/error.hpp"

namespace anchorsim::chain {

ledger::Digest Ledger::tip() const
{
  return blocks_.empty() ? ledger::Digest{} : blocks_.back().digest();
}

void Ledger::append(ledger::Block block)
{
  if (block.header.index != blocks_.size())
  {
    throw ValidationError("block index " + std::to_string(block.header.index) + " does not extend height " +
                          std::to_string(blocks_.size()));
  }
  if (block.header.previous != tip())
  {
    throw ValidationError("block " + std::to_string(block.header.index) + " does not link to the tip");
  }
  if (block.header.tx_root != ledger::transactions_root(block.transactions))
  {
    throw ValidationError("block " + std::to_string(block.header.index) + " has a bad transaction root");
  }
  for (auto const &tx : block.transactions)
  {
    tx_index_.emplace(ledger::transaction_id(tx), blocks_.size());
  }
  total_bytes_ += block.accounting_size();
  blocks_.push_back(std::move(block));
}

bool Ledger::verify() const
{
  ledger::Digest prev{};
  std::size_t    bytes = 0;
  for (std::size_t i = 0; i < blocks_.size(); ++i)
  {
    auto const &b = blocks_[i];
    if (b.header.index != i || b.header.previous != prev ||
        b.header.tx_root != ledger::transactions_root(b.transactions))
    {
      return false;
    }
    prev = b.digest();
    bytes += b.accounting_size();
  }
  return bytes == total_bytes_;
}

std::optional<std::size_t> Ledger::locate(ledger::Digest const &id) const
{
  auto it = tx_index_.find(id);
  if (it == tx_index_.end())
  {
    return std::nullopt;
  }
  return it->second;
}

}  // namespace anchorsim::chain
