#include "anchorsim/channel/content_store.hpp"

#include "anchorsim/common/error.hpp"
#include "anchorsim/ledger/crypto.hpp"

namespace anchorsim::channel {

Digest ContentStore::put(Bytes content)
{
  auto key = ledger::hash(content);
  items_.try_emplace(key, std::move(content));
  return key;
}

std::optional<Bytes> ContentStore::fetch(Digest const &key) const
{
  auto it = items_.find(key);
  if (it == items_.end())
  {
    return std::nullopt;
  }
  return it->second;
}

std::optional<Bytes> ContentStore::fetch_hex(std::string_view hex) const
{
  Digest key;
  try
  {
    key = Digest::from_hex(hex);
  }
  catch (InvalidArgument const &)
  {
    return std::nullopt;
  }
  return fetch(key);
}

}  // namespace anchorsim::channel
