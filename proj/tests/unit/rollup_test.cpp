#include "anchorsim/rollup/rollup_engine.hpp"

#include <doctest.h>

using namespace anchorsim;
using namespace anchorsim::rollup;
using ledger::Identity;

namespace {

struct World
{
  ledger::KeyedHashScheme  scheme;
  std::vector<Identity>    clients;
  std::vector<Identity>    masps;
  std::vector<Address>     masp_addrs;
  chain::ChainParams       chain_params;
  chain::AnchorChain       anchor{chain_params, scheme, 1};
  std::uint64_t            round{0};

  explicit World(std::size_t n_clients = 6, std::size_t n_masps = 5)
  {
    for (std::size_t i = 0; i < n_clients; ++i)
    {
      clients.push_back(scheme.generate(1, "client/" + std::to_string(i)));
    }
    for (std::size_t j = 0; j < n_masps; ++j)
    {
      masps.push_back(scheme.generate(1, "masp/" + std::to_string(j)));
      masp_addrs.push_back(masps.back().address());
    }
  }

  RollupEngine engine(RollupParams p = {}) { return RollupEngine(p, scheme, masp_addrs, 7); }

  std::vector<ledger::Transaction> opinions(std::size_t n, Rng &rng)
  {
    std::vector<ledger::Transaction> out;
    for (std::size_t k = 0; k < n; ++k)
    {
      auto const &c = clients[rng.below(clients.size())];
      auto const &m = masp_addrs[rng.below(masp_addrs.size())];
      OpinionPayload p;
      p.satisfied = rng.bernoulli(0.6);
      p.value     = to_tokens(rng.uniform(0.5, 3.0));
      p.block     = round / 10;
      p.round     = round++;
      out.push_back(make_opinion_tx(scheme, c, m, p));
    }
    return out;
  }

  void drain(double &now)
  {
    while (!anchor.pool().empty())
    {
      now = anchor.next_block_time();
      anchor.produce_block(now);
    }
  }
};

}  // namespace

TEST_CASE("fixed-point leaf values round half to even")
{
  CHECK(to_fixed(0.5) == 500'000'000'000);
  CHECK(to_fixed(2.5e-12) == 2);
  CHECK(to_fixed(3.5e-12) == 4);
  CHECK(from_fixed(to_fixed(0.123456789012)) == doctest::Approx(0.123456789012));
}

TEST_CASE("reputation tree commitment")
{
  ledger::KeyedHashScheme scheme;
  std::vector<Address>    addrs;
  for (int i = 0; i < 13; ++i)
  {
    addrs.push_back(scheme.generate(3, std::to_string(i)).address());
  }
  auto rt = ReputationTree::genesis(addrs, 0.5);
  CHECK(rt.size() == 13);
  CHECK(std::is_sorted(rt.leaves().begin(), rt.leaves().end(),
                       [](Leaf const &a, Leaf const &b) { return a.masp < b.masp; }));
  CHECK(rt.root() == compute_root(rt.leaves()));

  // order of construction is irrelevant
  auto reversed = addrs;
  std::reverse(reversed.begin(), reversed.end());
  CHECK(ReputationTree::genesis(reversed, 0.5).root() == rt.root());

  SUBCASE("every single-leaf perturbation changes the root")
  {
    Rng rng(9);
    for (int trial = 0; trial < 500; ++trial)
    {
      auto const &leaf  = rt.leaves()[rng.below(rt.size())];
      FixedValue  delta = static_cast<FixedValue>(rng.below(1000)) + 1;
      auto        t     = rt.with_values({{leaf.masp, leaf.value + delta}});
      CHECK(t.root() != rt.root());
    }
  }
  SUBCASE("unknown MASP")
  {
    Address stranger{ledger::hash(std::string_view("x"))};
    CHECK_THROWS_AS(rt.with_values({{stranger, 1}}), LookupError);
    CHECK_FALSE(rt.value(stranger).has_value());
  }
  SUBCASE("duplicates rejected")
  {
    CHECK_THROWS_AS(ReputationTree({Leaf{addrs[0], 1}, Leaf{addrs[0], 2}}), InvalidArgument);
  }
}

TEST_CASE("opinion payload codec")
{
  OpinionPayload p{true, to_tokens(1.5), 12, 99, mwsl::local_opinion(3, 1)};
  CHECK(decode_opinion(encode_opinion(p)) == p);
  auto bytes = encode_opinion(p);
  bytes.push_back(0);
  CHECK_THROWS_AS(decode_opinion(bytes), InvalidArgument);
}

TEST_CASE("compression")
{
  World w;
  Rng   rng(1);
  auto  txs = w.opinions(1000, rng);
  auto  r   = compress(txs);
  CHECK(r.hashes.size() == 1000);
  CHECK(r.hashes.front() == ledger::transaction_id(txs.front()));
  CHECK(32.0 * 1000 / (99.0 * 1000) == doctest::Approx(1.0 - 0.6768).epsilon(1e-3));

  auto one = compress(std::span(txs).first(1));
  CHECK(one.hashes.size() == 1);
  CHECK(one.hashes[0] == ledger::hash(ledger::serialize_transaction(txs[0])));

  auto swapped = txs;
  std::swap(swapped[0], swapped[1]);
  CHECK(compress(swapped).hashes != r.hashes);

  CHECK_THROWS_AS(compress({}), InvalidArgument);
}

TEST_CASE("collection and trigger")
{
  World        w;
  Rng          rng(2);
  auto         eng = w.engine();
  auto         txs = w.opinions(500, rng);
  for (std::size_t i = 0; i + 1 < txs.size(); ++i)
  {
    CHECK(eng.accept(txs[i], 0.0));
    CHECK_FALSE(eng.due(0.0));
  }
  CHECK(eng.accept(txs.back(), 0.0));
  CHECK(eng.due(0.0));
  CHECK(eng.replicas_agree());
  CHECK(eng.pending(2).size() == 500);

  SUBCASE("forged signature leaves pending unchanged")
  {
    auto forged = w.opinions(1, rng).front();
    forged.fee += 1;
    CHECK_FALSE(eng.accept(forged, 0.0));
    CHECK(eng.pending().size() == 500);
  }
  SUBCASE("time threshold")
  {
    World  w2;
    auto   e2 = w2.engine();
    CHECK(e2.accept(w2.opinions(1, rng).front(), 1.0));
    CHECK_FALSE(e2.due(59.0));
    CHECK(e2.due(60.0));
  }
}

TEST_CASE("honest roll-ups anchor and replay")
{
  World  w;
  Rng    rng(3);
  auto   eng  = w.engine();
  auto   before = eng.last_committed_root();
  double now  = 0.0;
  for (auto const &tx : w.opinions(1200, rng))
  {
    REQUIRE(eng.accept(tx, now));
  }
  auto results = eng.poll(w.anchor, now);
  REQUIRE(results.size() == 2);
  CHECK(results[0].accepted);
  CHECK(results[1].accepted);
  CHECK(results[0].duty != results[1].duty);
  CHECK(results[0].record.hashes.size() == 500);
  CHECK(eng.last_committed_root() != before);
  CHECK(eng.pending().size() == 200);

  results.push_back(eng.roll_up(w.anchor, now + 1));
  w.drain(now);
  // anchored in submission order
  auto b0 = w.anchor.ledger().locate(results[0].tx_id);
  auto b1 = w.anchor.ledger().locate(results[1].tx_id);
  REQUIRE(b0.has_value());
  REQUIRE(b1.has_value());
  CHECK(*b0 <= *b1);
  CHECK(eng.replay(w.anchor.ledger()) == eng.last_committed_root());

  SUBCASE("second replica reconstructs the same tree")
  {
    mwsl::InteractionLedger ledger(eng.params().decay);
    ClientDirectory         dir;
    auto                    rt = ReputationTree::genesis(w.masp_addrs, eng.params().reputation.gamma);
    for (auto const &r : eng.results())
    {
      std::vector<ledger::Transaction> batch;
      for (auto const &h : r.record.hashes)
      {
        batch.push_back(*eng.archived(h));
      }
      rt = apply_opinions(ledger, rt, batch, dir, eng.params().reputation);
    }
    CHECK(rt.root() == eng.last_committed_root());
  }
}

TEST_CASE("untouched MASP leaf is unchanged")
{
  World w;
  Rng   rng(4);
  auto  eng   = w.engine();
  auto  other = w.masp_addrs[3];
  for (int k = 0; k < 20; ++k)
  {
    OpinionPayload p{k % 4 != 0, to_tokens(1.0), 0, static_cast<std::uint64_t>(k), {}};
    eng.collect_opinion(w.clients[k % 3], w.masp_addrs[0], p, 0.0);
  }
  auto before = eng.tree().value(other);
  eng.roll_up(w.anchor, 0.0);
  CHECK(eng.tree().value(other) == before);
  CHECK(eng.tree().value(w.masp_addrs[0]) != before);
}

TEST_CASE("unknown MASP is named")
{
  World w;
  auto  eng = w.engine();
  auto  stranger = w.scheme.generate(1, "stranger");
  OpinionPayload p{true, 0, 0, 0, {}};
  eng.collect_opinion(w.clients[0], stranger.address(), p, 0.0);
  try
  {
    eng.roll_up(w.anchor, 0.0);
    FAIL("expected a lookup error");
  }
  catch (LookupError const &e)
  {
    CHECK(std::string(e.what()).find(stranger.address().hex()) != std::string::npos);
  }
}

TEST_CASE("tampered roll-up is poisoned and re-rolled honestly")
{
  Rng  rng(5);
  World honest_world;
  World faulty_world;
  auto  honest = honest_world.engine();
  auto  faulty = faulty_world.engine();
  Rng   r1(77), r2(77);
  auto  ops_h = honest_world.opinions(900, r1);
  auto  ops_f = faulty_world.opinions(900, r2);
  faulty.tamper_at(1);

  double now = 0.0;
  for (std::size_t i = 0; i < ops_h.size(); ++i)
  {
    honest.accept(ops_h[i], now);
    faulty.accept(ops_f[i], now);
  }
  auto h0 = honest.roll_up(honest_world.anchor, now);
  auto f0 = faulty.roll_up(faulty_world.anchor, now);
  CHECK(f0.accepted);
  auto pre = faulty.last_committed_root();

  auto f1 = faulty.roll_up(faulty_world.anchor, now);
  CHECK_FALSE(f1.accepted);
  REQUIRE(f1.poison_tx.has_value());
  CHECK(faulty.last_committed_root() == pre);
  CHECK(faulty.pending().size() == 400);

  // rolling back again is a no-op
  faulty.poison_rollback(faulty_world.anchor, f1.tx_id, now);
  CHECK(faulty.last_committed_root() == pre);
  CHECK(faulty.pending().size() == 400);

  auto h1 = honest.roll_up(honest_world.anchor, now);
  auto f2 = faulty.roll_up(faulty_world.anchor, now);
  CHECK(f2.accepted);
  CHECK(faulty.last_committed_root() == honest.last_committed_root());
  CHECK(f2.record.root == h1.record.root);

  faulty_world.drain(now);
  CHECK(faulty.replay(faulty_world.anchor.ledger()) == faulty.last_committed_root());
  CHECK_THROWS_AS(faulty.poison_rollback(faulty_world.anchor, f0.tx_id, now), InvalidArgument);
  (void)h0;
}
