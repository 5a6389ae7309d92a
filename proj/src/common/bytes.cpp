#include "anchorsim/common/bytes.hpp"

#include "anchorsim/common/error.hpp"

#include <cmath>

namespace anchorsim {

Tokens to_tokens(double amount)
{
  return static_cast<Tokens>(std::llround(amount * static_cast<double>(kMicroPerToken)));
}

double from_tokens(Tokens amount)
{
  return static_cast<double>(amount) / static_cast<double>(kMicroPerToken);
}

std::string to_hex(ByteView bytes)
{
  static constexpr char digits[] = "0123456789abcdef";
  std::string           out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes)
  {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0x0f]);
  }
  return out;
}

namespace {

int nibble(char c)
{
  if (c >= '0' && c <= '9')
  {
    return c - '0';
  }
  if (c >= 'a' && c <= 'f')
  {
    return c - 'a' + 10;
  }
  if (c >= 'A' && c <= 'F')
  {
    return c - 'A' + 10;
  }
  return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex)
{
  if (hex.size() % 2 != 0)
  {
    throw InvalidArgument("hex string has odd length");
  }
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i)
  {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0)
    {
      throw InvalidArgument("invalid hex digit");
    }
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

void Writer::u32(std::uint32_t v)
{
  for (int i = 0; i < 4; ++i)
  {
    out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

void Writer::u64(std::uint64_t v)
{
  for (int i = 0; i < 8; ++i)
  {
    out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

void Writer::field(ByteView v)
{
  u32(static_cast<std::uint32_t>(v.size()));
  raw(v);
}

std::uint8_t Reader::u8()
{
  return raw(1)[0];
}

std::uint32_t Reader::u32()
{
  auto          b = raw(4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i)
  {
    v = (v << 8) | b[static_cast<std::size_t>(i)];
  }
  return v;
}

std::uint64_t Reader::u64()
{
  auto          b = raw(8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i)
  {
    v = (v << 8) | b[static_cast<std::size_t>(i)];
  }
  return v;
}

ByteView Reader::raw(std::size_t n)
{
  if (n > remaining())
  {
    throw InvalidArgument("truncated encoding");
  }
  auto out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

ByteView Reader::field()
{
  return raw(u32());
}

}  // namespace anchorsim
