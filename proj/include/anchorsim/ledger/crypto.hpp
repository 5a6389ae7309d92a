#pragma once

#include "anchorsim/common/bytes.hpp"
#include "anchorsim/ledger/digest.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace anchorsim::ledger {

/// SHA-256 of `data`.
Digest hash(ByteView data);
Digest hash(std::string_view data);
/// SHA-256 over the concatenation of two digests (tree interior nodes etc).
Digest hash_pair(Digest const &left, Digest const &right);

Digest hmac(ByteView key, ByteView message);

struct Signature
{
  Bytes bytes;

  bool operator==(Signature const &) const = default;
};

/// Participant key material. The address is the public key.
struct Identity
{
  Address public_key;
  Bytes   private_key;

  Address const &address() const { return public_key; }
};

/// Pluggable signature scheme. verify() never throws on a bad signature.
class SignatureScheme
{
public:
  virtual ~SignatureScheme() = default;

  /// Deterministically derives a fresh identity from `seed` and `label`.
  virtual Identity  generate(std::uint64_t seed, std::string_view label)            = 0;
  virtual Signature sign(Identity const &id, ByteView message) const                = 0;
  virtual bool      verify(Address const &addr, ByteView message, Signature const &sig) const = 0;
};

/// Keyed-hash signatures: sig = HMAC-SHA256(private key, message).
///
/// Verification consults the scheme's key directory, which stands in for the
/// public-key infrastructure. Only identities created through generate() can
/// verify, and signatures are unforgeable without the private key.
class KeyedHashScheme final : public SignatureScheme
{
public:
  Identity  generate(std::uint64_t seed, std::string_view label) override;
  Signature sign(Identity const &id, ByteView message) const override;
  bool      verify(Address const &addr, ByteView message, Signature const &sig) const override;

  std::size_t registered() const;

private:
  mutable std::mutex      mutex_;
  std::map<Address, Bytes> directory_;
};

}  // namespace anchorsim::ledger
