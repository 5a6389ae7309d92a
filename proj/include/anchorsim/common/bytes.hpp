#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace anchorsim {

using Bytes     = std::vector<std::uint8_t>;
using ByteView  = std::span<std::uint8_t const>;

/// Token amounts are integral micro-units so that conservation checks are exact.
using Tokens = std::int64_t;

inline constexpr Tokens kMicroPerToken = 1'000'000;

Tokens to_tokens(double amount);
double from_tokens(Tokens amount);

std::string to_hex(ByteView bytes);
Bytes       from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view s)
{
  return {reinterpret_cast<std::uint8_t const *>(s.data()), s.size()};
}

/// Little-endian append helpers used by every canonical encoder.
class Writer
{
public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void raw(ByteView v) { out_.insert(out_.end(), v.begin(), v.end()); }
  /// u32 length prefix followed by the bytes.
  void field(ByteView v);

  Bytes const &bytes() const & { return out_; }
  Bytes        take() && { return std::move(out_); }

private:
  Bytes out_;
};

class Reader
{
public:
  explicit Reader(ByteView in)
    : in_(in)
  {}

  std::uint8_t  u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t  i64() { return static_cast<std::int64_t>(u64()); }
  ByteView      raw(std::size_t n);
  ByteView      field();

  bool        done() const { return pos_ == in_.size(); }
  std::size_t remaining() const { return in_.size() - pos_; }

private:
  ByteView    in_;
  std::size_t pos_{0};
};

}  // namespace anchorsim
