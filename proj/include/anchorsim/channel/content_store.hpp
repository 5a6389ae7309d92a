#pragma once

#include "anchorsim/ledger/digest.hpp"

#include <map>
#include <optional>

namespace anchorsim::channel {

using ledger::Digest;

/// Content-addressed store standing in for the storage chain: key = hash(content).
class ContentStore
{
public:
  Digest               put(Bytes content);
  std::optional<Bytes> fetch(Digest const &key) const;
  std::optional<Bytes> fetch_hex(std::string_view hex) const;
  bool                 contains(Digest const &key) const { return items_.contains(key); }
  std::size_t          size() const { return items_.size(); }

private:
  std::map<Digest, Bytes> items_;
};

}  // namespace anchorsim::channel
