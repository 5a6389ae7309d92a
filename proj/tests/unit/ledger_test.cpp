#include "anchorsim/common/rng.hpp"
#include "anchorsim/ledger/block.hpp"
#include "anchorsim/ledger/transaction.hpp"

#include <doctest.h>

#include <unordered_set>

using namespace anchorsim;
using namespace anchorsim::ledger;

namespace {

Transaction sample_tx(KeyedHashScheme &scheme, Identity const &from, std::optional<Address> to, Tokens fee)
{
  return make_signed(scheme, from, TxKind::OpinionUpdate, to, Bytes{1, 2, 3, 4}, fee);
}

}  // namespace

TEST_CASE("sha256 of empty input is the published constant")
{
  CHECK(hash(std::string_view{}).hex() == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(hash(std::string_view("abc")).hex() ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("hash is deterministic")
{
  Rng rng(3);
  for (int i = 0; i < 100; ++i)
  {
    auto x = rng.bytes(rng.below(200));
    CHECK(hash(x) == hash(x));
  }
}

TEST_CASE("no collisions over a million random distinct inputs")
{
  // Inputs are distinct by construction: a counter prefix plus random tail.
  Rng                                     rng(11);
  std::unordered_set<Digest, DigestHash> seen;
  seen.reserve(1'000'000);
  for (std::uint64_t i = 0; i < 1'000'000; ++i)
  {
    Writer w;
    w.u64(i);
    w.raw(rng.bytes(8));
    REQUIRE(seen.insert(hash(w.bytes())).second);
  }
}

TEST_CASE("keyed-hash signatures")
{
  KeyedHashScheme scheme;
  auto            a = scheme.generate(1, "alice");
  auto            b = scheme.generate(1, "bob");
  auto const      m = as_bytes("transfer 5");
  auto const      s = scheme.sign(a, m);

  CHECK(a.address() != b.address());
  CHECK(scheme.verify(a.address(), m, s));
  CHECK_FALSE(scheme.verify(b.address(), m, s));
  CHECK_FALSE(scheme.verify(a.address(), as_bytes("transfer 6"), s));
  CHECK_FALSE(scheme.verify(a.address(), m, Signature{}));

  SUBCASE("generation is deterministic")
  {
    KeyedHashScheme other;
    CHECK(other.generate(1, "alice").address() == a.address());
    CHECK(scheme.generate(2, "alice").address() != a.address());
  }
  SUBCASE("unknown address never verifies")
  {
    Address stranger{hash(std::string_view("stranger"))};
    CHECK_FALSE(scheme.verify(stranger, m, s));
  }
}

TEST_CASE("transaction round trip and accounting")
{
  KeyedHashScheme scheme;
  auto            a  = scheme.generate(5, "a");
  auto            b  = scheme.generate(5, "b");
  auto            tx = sample_tx(scheme, a, b.address(), 42);

  CHECK(deserialize_transaction(serialize_transaction(tx)) == tx);
  CHECK(verify_transaction(scheme, tx));
  CHECK(accounting_size(tx) == 99);

  auto null_receiver = sample_tx(scheme, a, std::nullopt, 0);
  CHECK(deserialize_transaction(serialize_transaction(null_receiver)) == null_receiver);

  SUBCASE("oversized payload is a distinct error")
  {
    CHECK_THROWS_AS(make_signed(scheme, a, TxKind::TransferChannel, std::nullopt, Bytes(kMaxPayloadBytes + 1), 0),
                    PayloadTooLarge);
  }
  SUBCASE("negative fee rejected")
  {
    CHECK_THROWS_AS(sample_tx(scheme, a, b.address(), -1), InvalidArgument);
  }
  SUBCASE("truncated encoding rejected")
  {
    auto bytes = serialize_transaction(tx);
    bytes.pop_back();
    CHECK_THROWS_AS(deserialize_transaction(bytes), InvalidArgument);
  }
}

TEST_CASE("any single bit flip breaks verification")
{
  KeyedHashScheme scheme;
  auto            a     = scheme.generate(9, "a");
  auto            b     = scheme.generate(9, "b");
  auto const      tx    = sample_tx(scheme, a, b.address(), 7);
  auto const      bytes = serialize_transaction(tx);
  int             decoded = 0;
  for (std::size_t i = 0; i < bytes.size(); ++i)
  {
    for (int bit = 0; bit < 8; ++bit)
    {
      auto flipped = bytes;
      flipped[i] ^= static_cast<std::uint8_t>(1u << bit);
      try
      {
        auto t = deserialize_transaction(flipped);
        ++decoded;
        CHECK_FALSE(verify_transaction(scheme, t));
      }
      catch (InvalidArgument const &)
      {
        // length prefixes that no longer fit are rejected outright
      }
    }
  }
  CHECK(decoded > 0);
}

TEST_CASE("roll-up and poison payloads")
{
  RollupRecord r;
  for (int i = 0; i < 1000; ++i)
  {
    r.hashes.push_back(hash(std::to_string(i)));
  }
  r.root = hash(std::string_view("root"));
  CHECK(r.accounting_size() == 32 * 1000 + 32);
  auto enc = encode_rollup(r);
  CHECK(decode_rollup(enc) == r);
  CHECK_FALSE(decode_poison(enc).has_value());

  PoisonRecord p{r.root};
  auto pe = encode_poison(p);
  CHECK(decode_poison(pe) == p);
  CHECK_FALSE(decode_rollup(pe).has_value());

  // 1000 hashes against 1000 plain records: 32000 vs 99000 bytes
  double const reduction = 1.0 - 32000.0 / 99000.0;
  CHECK(reduction == doctest::Approx(0.6768).epsilon(1e-4));
}

TEST_CASE("block accounting is additive")
{
  KeyedHashScheme scheme;
  auto            a = scheme.generate(2, "a");
  Block           blk;
  blk.header.index = 0;
  CHECK(blk.accounting_size() == 120);
  for (int i = 0; i < 17; ++i)
  {
    blk.transactions.push_back(sample_tx(scheme, a, std::nullopt, i));
  }
  blk.header.tx_root = transactions_root(blk.transactions);
  CHECK(blk.accounting_size() == 120 + 99 * 17);
}
