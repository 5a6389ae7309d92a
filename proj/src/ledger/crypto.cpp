#include "anchorsim/ledger/crypto.hpp"

#include "anchorsim/common/error.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/crypto.h>

#include <algorithm>

namespace anchorsim::ledger {

bool Digest::is_zero() const
{
  return std::all_of(bytes.begin(), bytes.end(), [](auto b) { return b == 0; });
}

Digest Digest::from_hex(std::string_view hex)
{
  return from_bytes(anchorsim::from_hex(hex));
}

Digest Digest::from_bytes(ByteView raw)
{
  if (raw.size() != kSize)
  {
    throw InvalidArgument("digest must be exactly 32 bytes, got " + std::to_string(raw.size()));
  }
  Digest d;
  std::copy(raw.begin(), raw.end(), d.bytes.begin());
  return d;
}

namespace {

// Explicitly fetched once; the implicit per-call lookup dominates small digests.
EVP_MD const *sha256()
{
  static EVP_MD *const md = EVP_MD_fetch(nullptr, "SHA2-256", nullptr);
  if (md == nullptr)
  {
    throw Error("SHA-256 is unavailable");
  }
  return md;
}

}  // namespace

Digest hash(ByteView data)
{
  Digest       out;
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.bytes.data(), &len, sha256(), nullptr) != 1 ||
      len != Digest::kSize)
  {
    throw Error("SHA-256 failed");
  }
  return out;
}

Digest hash(std::string_view data)
{
  return hash(as_bytes(data));
}

Digest hash_pair(Digest const &left, Digest const &right)
{
  std::array<std::uint8_t, 2 * Digest::kSize> buf{};
  std::copy(left.bytes.begin(), left.bytes.end(), buf.begin());
  std::copy(right.bytes.begin(), right.bytes.end(), buf.begin() + Digest::kSize);
  return hash(ByteView{buf.data(), buf.size()});
}

Digest hmac(ByteView key, ByteView message)
{
  Digest       out;
  unsigned int len = 0;
  if (HMAC(sha256(), key.data(), static_cast<int>(key.size()), message.data(), message.size(),
           out.bytes.data(), &len) == nullptr ||
      len != Digest::kSize)
  {
    throw Error("HMAC-SHA256 failed");
  }
  return out;
}

Identity KeyedHashScheme::generate(std::uint64_t seed, std::string_view label)
{
  Writer w;
  w.raw(as_bytes("anchorsim/private-key"));
  w.u64(seed);
  w.field(as_bytes(label));
  Digest const priv = hash(w.bytes());

  Writer p;
  p.raw(as_bytes("anchorsim/public-key"));
  p.raw(priv.view());

  Identity id;
  id.public_key.key = hash(p.bytes());
  id.private_key.assign(priv.bytes.begin(), priv.bytes.end());

  std::lock_guard lock(mutex_);
  directory_[id.public_key] = id.private_key;
  return id;
}

Signature KeyedHashScheme::sign(Identity const &id, ByteView message) const
{
  if (id.private_key.empty())
  {
    throw InvalidArgument("identity holds no private key");
  }
  auto const mac = hmac(id.private_key, message);
  return Signature{Bytes(mac.bytes.begin(), mac.bytes.end())};
}

bool KeyedHashScheme::verify(Address const &addr, ByteView message, Signature const &sig) const
{
  Bytes key;
  {
    std::lock_guard lock(mutex_);
    auto            it = directory_.find(addr);
    if (it == directory_.end())
    {
      return false;
    }
    key = it->second;
  }
  if (sig.bytes.size() != Digest::kSize)
  {
    return false;
  }
  auto const expected = hmac(key, message);
  return CRYPTO_memcmp(expected.bytes.data(), sig.bytes.data(), Digest::kSize) == 0;
}

std::size_t KeyedHashScheme::registered() const
{
  std::lock_guard lock(mutex_);
  return directory_.size();
}

}  // namespace anchorsim::ledger
