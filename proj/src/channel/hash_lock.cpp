#include "anchorsim/channel/hash_lock.hpp"

#include "anchorsim/ledger/crypto.hpp"

namespace anchorsim::channel {

HashLock::HashLock(Digest lock_digest, Item item, Address holder)
  : lock_digest_(lock_digest)
  , item_(std::move(item))
  , holder_(holder)
{
}

bool HashLock::unlock(ByteView preimage)
{
  if (status_ != LockStatus::Locked || ledger::hash(preimage) != lock_digest_)
  {
    return false;
  }
  status_ = LockStatus::Unlocked;
  return true;
}

void HashLock::roll_back()
{
  if (status_ == LockStatus::Locked)
  {
    status_ = LockStatus::RolledBack;
  }
}

}  // namespace anchorsim::channel
