#pragma once

#include "anchorsim/common/bytes.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace anchorsim::ledger {

/// 256-bit hash output.
struct Digest
{
  static constexpr std::size_t kSize = 32;

  std::array<std::uint8_t, kSize> bytes{};

  ByteView    view() const { return {bytes.data(), bytes.size()}; }
  std::string hex() const { return to_hex(view()); }
  bool        is_zero() const;

  static Digest from_hex(std::string_view hex);
  static Digest from_bytes(ByteView raw);

  auto operator<=>(Digest const &) const = default;
};

/// Addresses are public keys; in this implementation public keys are 32 bytes.
struct Address
{
  Digest key;

  ByteView    view() const { return key.view(); }
  std::string hex() const { return key.hex(); }
  std::string short_hex() const { return key.hex().substr(0, 12); }

  auto operator<=>(Address const &) const = default;
};

struct DigestHash
{
  std::size_t operator()(Digest const &d) const noexcept
  {
    std::size_t h = 0;
    for (std::size_t i = 0; i < sizeof(std::size_t); ++i)
    {
      h = (h << 8) | d.bytes[i];
    }
    return h;
  }
  std::size_t operator()(Address const &a) const noexcept { return (*this)(a.key); }
};

}  // namespace anchorsim::ledger
