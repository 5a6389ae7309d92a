#include "anchorsim/common/error.hpp"
#include "anchorsim/common/rng.hpp"
#include "anchorsim/contract/contract.hpp"

#include <doctest.h>

using namespace anchorsim;
using namespace anchorsim::contract;

namespace {

ActionGrid small_actions() { return {{5.0, 50.0, 10}, {0.1, 4.0, 10}}; }

// Flat enumeration oracle: every (contract, action) pair is scored directly
// through masp_utility with no shared intermediate state.
Outcome flat_oracle(ContractGrid const &cg, Assessor const &as, double threshold)
{
  Outcome best;
  auto const actions = as.grid().actions();
  for (auto const &c : cg.contracts())
  {
    MaspAction arg{};
    double     u_best = 0.0;
    bool       have   = false;
    for (auto const &a : actions)
    {
      double u = masp_utility(c, a, as);
      if (!have || u > u_best || (u == u_best && (a.compute < arg.compute ||
                                                  (a.compute == arg.compute && a.fee < arg.fee))))
      {
        arg    = a;
        u_best = u;
        have   = true;
      }
    }
    if (u_best < threshold)
    {
      continue;
    }
    double os = as.os2a(arg);
    double im = service_fee(c, os, as.state().difficulty);
    double uc = client_utility(im, os, as.state().roi, as.params().expected_os2a);
    if (!best.feasible || uc > best.response.client_utility ||
        (uc == best.response.client_utility &&
         (c.bonus < best.contract.bonus || (c.bonus == best.contract.bonus && c.kappa < best.contract.kappa))))
    {
      best.feasible = true;
      best.contract = c;
      best.response = {arg, os, im, u_best, uc};
    }
  }
  return best;
}

MarketState random_state(Rng &rng)
{
  MarketState e;
  e.output_bytes      = rng.uniform(1e5, 1e7);
  e.bandwidth         = rng.uniform(1e5, 1e7);
  e.difficulty        = rng.uniform(10.0, 100.0);
  e.block_capacity    = 500 + rng.below(2000);
  e.participants      = 4 + rng.below(60);
  e.neighbors         = rng.uniform(2.0, 8.0);
  e.honest_broadcast  = rng.uniform(0.5, 1.0);
  e.mean_queue_length = rng.uniform(10.0, 500.0);
  e.block_rate        = rng.uniform(0.1, 1.0);
  e.roi               = rng.uniform(0.05, 0.5);
  e.unit_cost         = rng.uniform(0.01, 0.3);
  e.rounds            = 1 + rng.below(20);
  return e;
}

}  // namespace

TEST_CASE("service fee and utilities by hand")
{
  Contract c{5.0, 0.2};
  CHECK(service_fee(c, 0.8, 50.0) == doctest::Approx(14.0));
  CHECK(service_fee({0.0, 0.2}, 0.3, 50.0) == doctest::Approx(10.0));
  CHECK(service_fee(c, 0.0, 50.0) == doctest::Approx(10.0));
  CHECK_THROWS_AS(service_fee(c, 1.5, 50.0), InvalidArgument);

  CHECK(client_utility(14.0, 0.6, 0.2, 0.6) == doctest::Approx(2.8));
  CHECK(client_utility(14.0, 0.6, 0.0, 0.6) == doctest::Approx(0.0));
  CHECK(client_utility(14.0, 0.4, 0.0, 0.6) < 0.0);

  MarketState e;
  e.difficulty = 50.0;
  e.unit_cost  = 0.1;
  e.rounds     = 2;
  CHECK(masp_utility(14.0, {10.0, 2.0}, e) == doctest::Approx(8.0));
  // compute cost r * c * D_t / c is flat in c
  CHECK(masp_utility(14.0, {40.0, 2.0}, e) == doctest::Approx(8.0));
  e.rounds = 1'000'000'000;
  CHECK(masp_utility(14.0, {10.0, 2.0}, e) == doctest::Approx(14.0 - 5.0).epsilon(1e-6));
}

TEST_CASE("best response")
{
  MarketState e;
  SUBCASE("single-point grid")
  {
    Assessor as(e, {{10.0, 10.0, 1}, {1.0, 1.0, 1}});
    CHECK(best_response({1.0, 0.1}, as).action == MaspAction{10.0, 1.0});
  }
  SUBCASE("flat contract minimises the fee")
  {
    Assessor as(e, small_actions());
    auto     r = best_response({0.0, 0.2}, as);
    CHECK(r.action.fee == doctest::Approx(0.1));
    CHECK(r.action.compute == doctest::Approx(5.0));
  }
  SUBCASE("large bonus pushes compute to the grid maximum")
  {
    AssessmentParams p;
    p.channel_active = true;
    Assessor as(e, {{5.0, 50.0, 2}, {1.0, 1.0, 1}}, p);
    CHECK(best_response({1000.0, 0.2}, as).action.compute == 50.0);
  }
  SUBCASE("refining the grid never lowers the achieved utility")
  {
    AssessmentParams p;
    p.channel_active = true;
    Assessor coarse(e, {{5.0, 45.0, 5}, {0.5, 2.5, 5}}, p);
    Assessor fine(e, {{5.0, 45.0, 9}, {0.5, 2.5, 9}}, p);
    // both grids share the same objective extremes, so OS2A values coincide on shared points
    REQUIRE(coarse.objective_bounds().lo == fine.objective_bounds().lo);
    REQUIRE(coarse.objective_bounds().hi == fine.objective_bounds().hi);
    for (double bonus : {0.0, 3.0, 30.0})
    {
      CHECK(best_response({bonus, 0.1}, fine).masp_utility >= best_response({bonus, 0.1}, coarse).masp_utility);
    }
  }
}

TEST_CASE("optimiser agrees with flat enumeration")
{
  Rng rng(31);
  for (int trial = 0; trial < 8; ++trial)
  {
    auto             e = random_state(rng);
    AssessmentParams p;
    p.channel_active = trial % 2 == 0;
    p.subjective     = rng.uniform();
    Assessor     as(e, small_actions(), p);
    ContractGrid cg{{0.0, 20.0, 5}, {0.0, 0.5, 5}};
    double       th = rng.uniform(-5.0, 5.0);
    auto         a  = optimize_contract(cg, as, th);
    auto         b  = flat_oracle(cg, as, th);
    REQUIRE(a.feasible == b.feasible);
    if (a.feasible)
    {
      CHECK(a.contract == b.contract);
      CHECK(a.response.action == b.response.action);
      CHECK(a.response.client_utility == b.response.client_utility);
      CHECK(a.response.masp_utility >= th);
    }
  }
}

TEST_CASE("IR threshold")
{
  MarketState  e;
  Assessor     as(e, small_actions());
  ContractGrid cg{{0.0, 10.0, 4}, {0.0, 0.4, 4}};
  auto         free = optimize_contract(cg, as);
  CHECK(free.feasible);
  CHECK(free.rejected_ir == 0);
  auto none = optimize_contract(cg, as, 1e9);
  CHECK_FALSE(none.feasible);
  CHECK(none.rejected_ir == 16);
}

TEST_CASE("moral hazard audit")
{
  MarketState      e;
  AssessmentParams p;
  p.channel_active = true;
  Assessor as(e, small_actions(), p);
  Contract c{8.0, 0.2};
  auto     rep = moral_hazard_audit(c, as);
  CHECK(rep.profitable == 0);
  CHECK(rep.max_delta == 0.0);
  CHECK(rep.compute_cost_constant);
  for (auto const &d : rep.surface)
  {
    CHECK(d.delta <= 0.0);
    if (d.action == rep.best.action)
    {
      CHECK(d.delta == 0.0);
    }
    // OS2A strictly increases in compute here, so less compute at the same fee strictly loses
    if (d.action.fee == rep.best.action.fee && d.action.compute < rep.best.action.compute)
    {
      CHECK(d.delta < 0.0);
    }
  }
}
