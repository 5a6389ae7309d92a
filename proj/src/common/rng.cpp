#include "anchorsim/common/rng.hpp"

#include "anchorsim/common/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace anchorsim {

std::uint64_t mix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed)
  : seed_(seed)
  , engine_(mix64(seed))
{}

Rng Rng::fork(std::uint64_t stream) const
{
  return Rng(mix64(seed_ ^ mix64(stream + 0x5bd1e995ULL)));
}

double Rng::uniform()
{
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n)
{
  if (n == 0)
  {
    throw InvalidArgument("Rng::below(0)");
  }
  // rejection sampling removes modulo bias
  std::uint64_t const limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v = engine_();
  while (v >= limit)
  {
    v = engine_();
  }
  return v % n;
}

double Rng::exponential(double rate)
{
  if (!(rate > 0.0))
  {
    throw InvalidArgument("exponential rate must be positive");
  }
  return -std::log1p(-uniform()) / rate;
}

double Rng::normal(double mean, double stddev)
{
  double u1 = uniform();
  while (u1 <= 0.0)
  {
    u1 = uniform();
  }
  double const u2 = uniform();
  return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::gamma(double shape, double scale)
{
  if (!(shape > 0.0) || !(scale > 0.0))
  {
    throw InvalidArgument("gamma parameters must be positive");
  }
  if (shape < 1.0)
  {
    // boost trick: G(a) = G(a + 1) * U^(1/a)
    double u = uniform();
    while (u <= 0.0)
    {
      u = uniform();
    }
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang
  double const d = shape - 1.0 / 3.0;
  double const c = 1.0 / std::sqrt(9.0 * d);
  for (;;)
  {
    double x = normal(0.0, 1.0);
    double v = 1.0 + c * x;
    if (v <= 0.0)
    {
      continue;
    }
    v = v * v * v;
    double const u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x)
    {
      return d * v * scale;
    }
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
    {
      return d * v * scale;
    }
  }
}

Bytes Rng::bytes(std::size_t n)
{
  Bytes out(n);
  for (std::size_t i = 0; i < n; i += 8)
  {
    std::uint64_t v = engine_();
    for (std::size_t k = 0; k < 8 && i + k < n; ++k)
    {
      out[i + k] = static_cast<std::uint8_t>(v >> (8 * k));
    }
  }
  return out;
}

}  // namespace anchorsim
