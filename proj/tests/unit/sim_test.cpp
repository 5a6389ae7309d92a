#include "anchorsim/common/error.hpp"
#include "anchorsim/common/rng.hpp"
#include "anchorsim/sim/experiments.hpp"
#include "anchorsim/sim/queue_oracle.hpp"
#include "anchorsim/sim/scenario_parser.hpp"
#include "anchorsim/sim/simulator.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <sstream>

using namespace anchorsim;
using namespace anchorsim::sim;

namespace {

std::filesystem::path const kScenarios = ANCHORSIM_SCENARIO_DIR;

Scenario small(std::uint64_t seed = 1)
{
  Scenario s;
  s.id           = "small";
  s.seed         = seed;
  s.rounds       = 20;
  s.levels       = {{"high", 4, 0.8, std::nullopt, 0.0}, {"low", 4, 0.3, std::nullopt, 0.0}};
  s.client_types = {{"plain", 8, 0.0, 0.5}};
  return s;
}

ParseError parse_error(std::string const &text)
{
  std::istringstream in(text);
  try
  {
    parse_scenario(in);
  }
  catch (ParseError const &e)
  {
    return e;
  }
  FAIL("expected a parse error");
  return ParseError(0, "", "");
}

ledger::Digest digest_of(Scenario const &s) { return run(s).metrics.digest(); }

}  // namespace

TEST_CASE("scenario parser reports line and field")
{
  auto e = parse_error("[scenario]\nrounds = 12x\n");
  CHECK(e.line() == 2);
  CHECK(e.field() == "scenario.rounds");

  e = parse_error("# comment\n\n[level]\nmasps = 3\nsatisfy = high\n");
  CHECK(e.line() == 5);
  CHECK(e.field() == "level.satisfy");

  e = parse_error("[chain]\nblock_size = 3\n");
  CHECK(e.line() == 2);
  CHECK(e.field() == "chain.block_size");

  e = parse_error("rounds = 3\n");
  CHECK(e.line() == 1);

  e = parse_error("[nowhere]\n");
  CHECK(e.field() == "nowhere");

  e = parse_error("[scenario\n");
  CHECK(e.line() == 1);

  e = parse_error("[channel]\nstep_durations = 1, 2\n");
  CHECK(e.field() == "channel.step_durations");

  e = parse_error("[attack]\nkind = meteor\n");
  CHECK(e.field() == "attack.kind");

  // semantic errors surface after parsing
  e = parse_error("[level]\nmasps = 2\n[client_type]\nclients = 1\n[attack]\nkind = flooding\nattackers = 2\n"
                  "sybils = 1\ntarget_level = 1\n");
  CHECK(e.line() == 0);
  CHECK(std::string(e.what()).find("half") != std::string::npos);
}

TEST_CASE("scenario parser applies sections")
{
  std::istringstream in("[scenario]\nid = t\nrounds = 7\n[level]\nname = a\nmasps = 2\nsatisfy = 0.6\n"
                        "drop_round = 3\ndrop_satisfy = 0.1\n[level]\nmasps = 1\n[client_type]\nclients = 3\n"
                        "[reputation]\nfreshness = off\nmu = 0.2, 0.3, 0.5\n[selection]\ncapacity = 2\n");
  auto const s = parse_scenario(in);
  CHECK(s.id == "t");
  CHECK(s.rounds == 7);
  REQUIRE(s.levels.size() == 2);
  CHECK(s.levels[0].name == "a");
  CHECK(s.levels[1].name == "level-2");
  CHECK(s.levels[0].satisfy_at(2) == 0.6);
  CHECK(s.levels[0].satisfy_at(3) == 0.1);
  CHECK(s.clients() == 3);
  CHECK(s.masps() == 3);
  CHECK(s.level_of(2) == 1);
  CHECK_FALSE(s.rollup.reputation.ablation.freshness);
  CHECK(s.rollup.reputation.mu[0] == doctest::Approx(0.2));
}

TEST_CASE("shipped scenario files match the built-in scenarios")
{
  auto same = [](Scenario file, Scenario built) {
    file.rounds  = 12;
    built.rounds = 12;
    CHECK(file.id == built.id);
    CHECK(file.clients() == built.clients());
    CHECK(file.masps() == built.masps());
    CHECK(digest_of(file) == digest_of(built));
  };
  same(load_scenario(kScenarios / "explicit.scn"), explicit_scenario(1));
  same(load_scenario(kScenarios / "flooding.scn"), attack_scenario(AttackKind::Flooding));
  same(load_scenario(kScenarios / "long_range.scn"), attack_scenario(AttackKind::LongRange));
  same(load_scenario(kScenarios / "dusting.scn"), attack_scenario(AttackKind::Dusting));
  for (auto const *name : {"base.scn", "stress.scn"})
  {
    CHECK_NOTHROW(load_scenario(kScenarios / name));
  }
  CHECK_THROWS_AS(load_scenario(kScenarios / "missing.scn"), LookupError);
}

TEST_CASE("runs are deterministic per seed")
{
  auto const a = run(small(3));
  auto const b = run(small(3));
  CHECK(a.metrics.digest() == b.metrics.digest());
  CHECK(a.summary.final_root == b.summary.final_root);
  CHECK(a.metrics.digest() != run(small(4)).metrics.digest());

  auto const x = baseline_run(small(3));
  CHECK(x.metrics.digest() == baseline_run(small(3)).metrics.digest());
}

TEST_CASE("attack generators respect the threat bound")
{
  auto s          = small();
  s.attack.kind   = AttackKind::Flooding;
  s.attack.target_level = 1;
  s.attack.sybils = 4;
  s.attack.start  = 0;
  s.attack.end    = 5;
  s.attack.attackers = 4;
  CHECK_NOTHROW(s.validate());
  Rng rng(1);
  auto const events = attack_events(s, 1, rng);
  CHECK(events.size() == 4);
  for (auto const &e : events)
  {
    CHECK(s.level_of(e.masp) == 1);
  }
  CHECK(attack_events(s, 6, rng).empty());

  s.levels[1].masps = 6;
  s.attack.attackers = 6;  // 6 of 10 MASPs
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  CHECK_THROWS_AS(attack_events(s, 1, rng), InvalidArgument);
}

TEST_CASE("tokens are conserved and settlement balances")
{
  auto s   = small();
  s.rounds = 30;
  auto const r = run(s);
  CHECK(r.summary.supply == to_tokens(s.client_funds) * static_cast<Tokens>(s.clients()));
  CHECK(r.summary.opinions == s.rounds * s.clients());
  CHECK(r.summary.committed + r.summary.rolled_back + r.summary.rejected + r.summary.unserved ==
        s.rounds * s.clients());
  for (auto const &row : r.metrics.table("atomicity").rows)
  {
    CHECK(std::get<std::int64_t>(row.back()) == 1);
  }

  auto const b = baseline_run(s);
  CHECK(b.summary.supply == r.summary.supply);
  CHECK(b.summary.committed == s.rounds * s.clients());
}

TEST_CASE("ledger bytes metric equals the block accounting")
{
  auto const r      = run(small());
  auto const &table = r.metrics.table("ledger");
  REQUIRE_FALSE(table.rows.empty());
  auto const last = std::get<std::int64_t>(table.rows.back()[1]);
  CHECK(static_cast<std::size_t>(last) <= r.summary.ledger_bytes);
  CHECK(r.summary.reputation_bytes < r.summary.ledger_bytes);
}

TEST_CASE("symmetric population converges to one band")
{
  Scenario s;
  s.id           = "symmetric";
  s.rounds       = 200;
  s.levels       = {{"only", 10, 0.7, std::nullopt, 0.0}};
  s.client_types = {{"plain", 40, 0.0, 0.5}};
  s.selection.capacity = 4;
  auto const r   = run(s);
  auto const [lo, hi] = std::minmax_element(r.summary.final_reputation.begin(), r.summary.final_reputation.end());
  CHECK(*hi - *lo <= 0.05);
}

TEST_CASE("metrics sink tables")
{
  MetricsSink m("demo", 9);
  m.declare("t", {"a", "b"});
  CHECK_NOTHROW(m.declare("t", {"a", "b"}));
  CHECK_THROWS_AS(m.declare("t", {"a"}), InvalidArgument);
  CHECK_THROWS_AS(m.add("u", 0, {}), LookupError);
  CHECK_THROWS_AS(m.add("t", 0, {std::int64_t{1}}), InvalidArgument);
  m.add("t", 4, {std::int64_t{1}, 0.5});
  m.add("t", 5, {std::string("x"), 0.1});
  CHECK(m.render("t", Format::Csv) == "seed,scenario,round,a,b\n9,demo,4,1,0.5\n9,demo,5,x,0.1\n");
  auto const json = m.render("t", Format::Json);
  CHECK(json.find("\"scenario\": \"demo\"") != std::string::npos);
  CHECK(format_cell(0.1 + 0.2) == "0.30000000000000004");

  MetricsSink n("demo", 9);
  n.declare("t", {"a", "b"});
  n.add("t", 4, {std::int64_t{1}, 0.5});
  CHECK(n.digest() != m.digest());
  n.add("t", 5, {std::string("x"), 0.1});
  CHECK(n.digest() == m.digest());
}

TEST_CASE("queue oracle sanity")
{
  QueueOracleParams p;
  p.horizon = 4000.0;
  p.warmup  = 500.0;
  auto const r = run_queue_oracle(p);
  CHECK(std::accumulate(r.served.begin(), r.served.end(), std::size_t{0}) == r.arrivals);
  double const expected = p.load * p.block_rate * static_cast<double>(p.block_capacity) * p.horizon;
  CHECK(static_cast<double>(r.arrivals) == doctest::Approx(expected).epsilon(0.05));
  CHECK(r.mean_queue_length > 0.0);
  // below capacity every arrival leaves with the next block, whatever its fee
  double const interval = 1.0 / p.block_rate;
  for (double t : r.simulated)
  {
    CHECK(t > 0.0);
    CHECK(t < interval);
  }
  CHECK(r.analytic.size() == p.bands);

  // above capacity the top band overtakes the backlog
  p.load    = 1.2;
  p.horizon = 1000.0;
  auto const over = run_queue_oracle(p);
  CHECK(over.simulated.back() < interval);
  CHECK(over.simulated.front() > 10.0 * interval);

  p.load = 0.0;
  CHECK_THROWS_AS(run_queue_oracle(p), InvalidArgument);
}

TEST_CASE("contract optimizer matches the flat enumeration on small grids")
{
  auto const rep = contract_experiment(5, {4, 6});
  CHECK(rep.states == 4);
  CHECK(rep.mismatches == 0);
  CHECK(rep.ir_failures == 0);
  CHECK(rep.profitable == 0);
  CHECK(rep.check.pass);
}

TEST_CASE("channel stress stays atomic")
{
  AtomicityParams p;
  p.rounds   = 600;
  p.channels = 4;
  auto const rep = atomicity_experiment(2, p);
  REQUIRE(rep.rows.size() == 3);
  for (auto const &row : rep.rows)
  {
    CHECK(row.violations == 0);
    CHECK(row.stalled == 0);
    CHECK(row.committed + row.rolled_back + row.rejected == p.rounds);
  }
  CHECK(rep.supply_conserved);
  CHECK(rep.check.pass);

  p.channel.timers = false;
  auto const untimed = atomicity_experiment(2, p);
  for (auto const &row : untimed.rows)
  {
    CHECK(row.violations == 0);
  }
}

TEST_CASE("contract sweep marks one optimum")
{
  auto       s = small();
  auto const m = contract_sweep(s);
  auto const &t = m.table("contract_sweep");
  auto const col = static_cast<std::size_t>(
    std::find(t.columns.begin(), t.columns.end(), "optimal") - t.columns.begin());
  REQUIRE(col < t.columns.size());
  std::int64_t optimal = 0;
  for (auto const &row : t.rows)
  {
    optimal += std::get<std::int64_t>(row[col]);
  }
  CHECK(optimal == 1);
}
