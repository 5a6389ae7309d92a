#pragma once

#include "anchorsim/ledger/digest.hpp"

#include <variant>

namespace anchorsim::channel {

using ledger::Address;
using ledger::Digest;

enum class LockStatus
{
  Locked,
  Unlocked,
  RolledBack,
};

/// An item (content key or fee amount) that only the holder of the preimage of
/// `lock_digest` can release.
class HashLock
{
public:
  using Item = std::variant<Digest, Tokens>;

  HashLock(Digest lock_digest, Item item, Address holder);

  /// Succeeds iff the lock is still locked and hash(preimage) == lock_digest.
  bool unlock(ByteView preimage);
  /// Returns a locked item to its owner. No effect once unlocked.
  void roll_back();

  Digest const &lock_digest() const { return lock_digest_; }
  Item const   &item() const { return item_; }
  Address const &holder() const { return holder_; }
  LockStatus    status() const { return status_; }

private:
  Digest     lock_digest_;
  Item       item_;
  Address    holder_;
  LockStatus status_{LockStatus::Locked};
};

}  // namespace anchorsim::channel
