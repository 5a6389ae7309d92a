#include "anchorsim/common/error.hpp"
#include "anchorsim/common/rng.hpp"
#include "anchorsim/mwsl/reputation.hpp"
#include "anchorsim/mwsl/selection.hpp"

#include <doctest.h>

#include <cmath>

using namespace anchorsim;
using namespace anchorsim::mwsl;

TEST_CASE("local opinion")
{
  auto o = local_opinion(1, 0);
  CHECK(o == Opinion{0.0, 0.0, 1.0});
  o = local_opinion(3, 1);
  CHECK(o.c == doctest::Approx(0.25));
  CHECK(o.s == doctest::Approx(0.5625));
  CHECK(o.u == doctest::Approx(0.1875));
  CHECK_THROWS_AS(local_opinion(0, 0), InvalidArgument);

  for (std::uint64_t p = 0; p < 40; ++p)
  {
    for (std::uint64_t n = 0; n < 40; ++n)
    {
      if (p + n == 0)
      {
        continue;
      }
      auto x = local_opinion(p, n);
      CHECK(std::abs(x.sum() - 1.0) < 1e-9);
      CHECK(x.s >= 0.0);
      CHECK(x.u >= 0.0);
      CHECK(x.c > 0.0);
    }
  }
}

TEST_CASE("familiarity")
{
  InteractionLedger l;
  l.record(0, 7, true, 1.0, 0);
  CHECK(familiarity(l, 0, 7) == 1.0);

  InteractionLedger m;
  for (int i = 0; i < 6; ++i)
  {
    m.record(0, 1, true, 1.0, 0);
  }
  for (int i = 0; i < 3; ++i)
  {
    m.record(1, 1, false, 1.0, 0);
  }
  m.record(2, 1, true, 1.0, 0);
  CHECK(familiarity(m, 0, 1) == doctest::Approx(0.6));
  CHECK(familiarity(m, 1, 1) == doctest::Approx(0.3));
  CHECK(familiarity(m, 2, 1) == doctest::Approx(0.1));
  CHECK(familiarity(m, 9, 1) == 0.0);
  CHECK_THROWS_AS(familiarity(m, 0, 2), InvalidArgument);

  Rng               rng(2);
  InteractionLedger big;
  for (int i = 0; i < 2000; ++i)
  {
    big.record(static_cast<ClientId>(rng.below(30)), static_cast<MaspId>(rng.below(5)), rng.bernoulli(0.5), 1.0, 0);
  }
  for (MaspId j = 0; j < 5; ++j)
  {
    double total = 0.0;
    for (auto c : big.clients_of(j))
    {
      total += familiarity(big, c, j);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("freshness")
{
  CHECK(freshness(10, 10, 0.2, 0.95) == 1.0);
  CHECK(freshness(0, 2, 1.0, 0.9) == doctest::Approx(0.81));
  CHECK(freshness(0, 5, 0.2, 0.95) < freshness(1, 5, 0.2, 0.95));
  CHECK_THROWS_AS(freshness(5, 4, 0.2, 0.95), InvalidArgument);
}

TEST_CASE("market worth")
{
  DecayParams d{0.9, 1.0, true};
  std::vector<HistoryEntry> h;
  CHECK(market_worth(h, 0, d) == 0.0);
  h.push_back({{}, 10.0, 4, true});
  CHECK(market_worth(h, 4, d) == 0.0);  // the latest entry never counts
  h.push_back({{}, 3.0, 4, true});
  CHECK(market_worth(h, 4, d) == doctest::Approx(10.0));
  CHECK(market_worth(h, 400, d) < 1e-15);

  SUBCASE("incremental accumulator matches the direct sum")
  {
    Rng               rng(5);
    DecayParams       dd{0.95, 0.2, true};
    InteractionLedger l(dd);
    std::uint64_t     block = 0;
    for (int i = 0; i < 300; ++i)
    {
      block += rng.below(3);
      l.record(1, 2, rng.bernoulli(0.7), rng.uniform(0.0, 5.0), block);
      auto const *rec    = l.find(1, 2);
      auto        latest = block + rng.below(4);
      CHECK(l.worth(*rec, latest) == doctest::Approx(market_worth(rec->history, latest, dd)).epsilon(1e-9));
    }
  }
}

TEST_CASE("reference opinion")
{
  std::array<double, 3> mu{1.0, 1.0, 1.0};
  std::vector<ReferenceInput> one{{{0.6, 0.2, 0.2}, 0.3, 0.9, 0.1}};
  auto r = reference_opinion(one, mu, 0.5);
  CHECK(r.s == doctest::Approx(0.3));
  CHECK(r.u == doctest::Approx(0.1));
  CHECK(r.c == doctest::Approx(0.2));

  CHECK(reference_opinion(one, mu, 1.0).s == 0.0);

  std::array<double, 3> fam_only{1.0, 0.0, 0.0};
  std::vector<ReferenceInput> two{{{0.8, 0.1, 0.1}, 3.0, 0.0, 0.0}, {{0.4, 0.3, 0.3}, 1.0, 0.0, 0.0}};
  CHECK(reference_opinion(two, fam_only, 0.0).s == doctest::Approx(0.7));

  std::vector<ReferenceInput> dead{{{0.8, 0.1, 0.1}, 0.0, 0.0, 0.0}};
  CHECK_THROWS_AS(reference_opinion(dead, mu, 0.5), InvalidArgument);
}

TEST_CASE("fusion")
{
  Opinion local{0.5625, 0.1875, 0.25};
  Opinion ref{0.35, 0.35, 0.3};
  auto    f = fuse_opinions(local, ref);
  CHECK(f.s == doctest::Approx((0.5625 * 0.3 + 0.35 * 0.25) / 0.475));

  Opinion certain{0.7, 0.3, 0.0};
  CHECK(fuse_opinions(certain, ref) == certain);
  Opinion ref_certain{0.2, 0.8, 0.0};
  CHECK(fuse_opinions(local, ref_certain) == ref_certain);
  CHECK_THROWS_AS(fuse_opinions(certain, ref_certain), InvalidArgument);

  Rng rng(12);
  for (int i = 0; i < 1000; ++i)
  {
    auto a = local_opinion(rng.below(20) + 1, rng.below(20));
    auto b = local_opinion(rng.below(20) + 1, rng.below(20));
    auto x = fuse_opinions(a, b);
    CHECK(std::abs(x.sum() - 1.0) < 1e-9);
  }
}

TEST_CASE("reputation")
{
  CHECK(reputation({0.6, 0.2, 0.2}, 0.5) == doctest::Approx(0.7));
  CHECK(reputation({0.6, 0.2, 0.2}, 0.0) == 0.6);
  CHECK_THROWS_AS(reputation({0.6, 0.2, 0.2}, 1.5), InvalidArgument);
  Rng rng(3);
  for (int i = 0; i < 500; ++i)
  {
    auto o = local_opinion(rng.below(30) + 1, rng.below(30));
    CHECK(reputation(o, rng.uniform()) <= 1.0 + 1e-12);
  }
}

TEST_CASE("client and aggregate reputation")
{
  ReputationParams  params;
  InteractionLedger l;
  CHECK(aggregate_reputation(l, params, 0, 0) == params.gamma);
  for (int i = 0; i < 20; ++i)
  {
    l.record(0, 0, true, 2.0, static_cast<std::uint64_t>(i));
    l.record(1, 0, i % 4 != 0, 2.0, static_cast<std::uint64_t>(i));
    l.record(1, 1, i % 4 == 0, 2.0, static_cast<std::uint64_t>(i));
  }
  double good = aggregate_reputation(l, params, 0, 20);
  double bad  = aggregate_reputation(l, params, 1, 20);
  CHECK(good > bad);

  // a newcomer sees only the reference path
  double fresh = client_reputation(l, params, 9, 0, 0.5, 20);
  CHECK(fresh > 0.0);
  // the satisfied client ranks MASP 0 above what a strict newcomer does
  CHECK(client_reputation(l, params, 0, 0, 0.5, 20) > client_reputation(l, params, 9, 0, 0.9, 20));

  SUBCASE("ablation zeroes weight components")
  {
    ReputationParams p = params;
    p.ablation.familiarity = false;
    auto mu = p.effective_mu();
    CHECK(mu[0] == 0.0);
    CHECK(mu[1] == params.mu[1]);
  }
}

TEST_CASE("ledger journal rollback restores state")
{
  InteractionLedger l;
  l.record(0, 0, true, 1.0, 1);
  l.record(1, 0, false, 2.0, 1);
  auto before_worth = l.worth(*l.find(0, 0), 5);
  l.checkpoint();
  l.record(0, 0, true, 4.0, 3);
  l.record(2, 0, true, 4.0, 3);
  l.record(2, 5, true, 4.0, 3);
  l.rollback();
  CHECK(l.find(2, 0) == nullptr);
  CHECK(l.find(2, 5) == nullptr);
  CHECK(l.clients_of(5).empty());
  CHECK(l.total_interactions(0) == 2);
  CHECK(l.find(0, 0)->history.size() == 1);
  CHECK(l.worth(*l.find(0, 0), 5) == before_worth);
}

TEST_CASE("MASP selection")
{
  auto always = [](MaspId, Handshake) { return true; };
  auto out    = select_masp({{1, 0.7}, {0, 0.9}}, always);
  CHECK(out.selected == MaspId{0});

  auto first_rejects = [](MaspId m, Handshake h) { return !(m == 0 && h == Handshake::Request); };
  out = select_masp({{0, 0.9}, {1, 0.7}}, first_rejects);
  CHECK(out.selected == MaspId{1});
  CHECK(out.attempts == std::vector<MaspId>{0, 1});

  auto prompts_reject = [](MaspId m, Handshake h) { return !(m == 0 && h == Handshake::Prompts); };
  CHECK(select_masp({{0, 0.9}, {1, 0.7}}, prompts_reject).selected == MaspId{1});

  auto never = [](MaspId, Handshake) { return false; };
  out = select_masp({{0, 0.9}, {1, 0.7}}, never);
  CHECK_FALSE(out.selected.has_value());
  CHECK(select_masp({}, always).attempts.empty());

  SUBCASE("order is invariant under positive scaling")
  {
    Rng rng(6);
    for (int trial = 0; trial < 100; ++trial)
    {
      std::vector<Candidate> c;
      for (MaspId m = 0; m < 10; ++m)
      {
        c.push_back({m, rng.uniform()});
      }
      auto scaled = c;
      double k    = rng.uniform(0.01, 100.0);
      for (auto &x : scaled)
      {
        x.reputation *= k;
      }
      auto reject_all = [](MaspId, Handshake) { return false; };
      CHECK(select_masp(c, reject_all).attempts == select_masp(scaled, reject_all).attempts);
    }
  }
}

TEST_CASE("reputation view matches direct evaluation")
{
  Rng rng(11);
  for (int variant = 0; variant < 4; ++variant)
  {
    ReputationParams params;
    params.ablation.familiarity  = variant != 1;
    params.ablation.freshness    = variant != 2;
    params.ablation.market_worth = variant != 3;
    InteractionLedger l(DecayParams{0.9, 0.5, params.ablation.freshness});
    for (int i = 0; i < 600; ++i)
    {
      auto const block = static_cast<std::uint64_t>(i / 20);
      l.record(static_cast<ClientId>(rng.below(30)), static_cast<MaspId>(rng.below(6)), rng.bernoulli(0.6),
               rng.uniform(0.1, 9.0), block);
    }
    ReputationView view(l, params, 40);
    for (MaspId m = 0; m < 7; ++m)
    {
      CHECK(view.aggregate(m) == doctest::Approx(aggregate_reputation(l, params, m, 40)).epsilon(1e-12));
      for (ClientId k = 0; k < 32; ++k)
      {
        double const th = 0.1 + 0.02 * static_cast<double>(k);
        CHECK(view.client_reputation(k, m, th) ==
              doctest::Approx(client_reputation(l, params, k, m, th, 40)).epsilon(1e-12));
      }
    }
  }
}
