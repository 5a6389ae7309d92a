#include "anchorsim/common/error.hpp"
#include "anchorsim/sim/experiments.hpp"
#include "anchorsim/sim/scenario_parser.hpp"
#include "anchorsim/sim/simulator.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

using namespace anchorsim;
using namespace anchorsim::sim;

namespace {

constexpr int kOk         = 0;
constexpr int kDomainFail = 1;
constexpr int kUsage      = 2;

struct Options
{
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> rounds;
  std::string                  out{"out"};
  std::string                  format{"csv"};
  std::string                  scenario;
  std::string                  attack;
};

Format format_of(Options const &o) { return o.format == "json" ? Format::Json : Format::Csv; }

Scenario load(Options const &o)
{
  auto s = load_scenario(o.scenario);
  if (o.seed)
  {
    s.seed = *o.seed;
  }
  if (o.rounds)
  {
    s.rounds = *o.rounds;
  }
  s.validate();
  return s;
}

void write(MetricsSink const &m, std::filesystem::path const &dir, Options const &o)
{
  m.write(dir, format_of(o));
  std::cout << "wrote " << m.tables().size() << " tables to " << dir.string() << "\n";
}

int cmd_run(Options const &o)
{
  auto const s = load(o);
  auto const r = run(s);
  write(r.metrics, o.out, o);
  auto const &sum = r.summary;
  std::cout << s.id << " seed " << s.seed << ": " << sum.opinions << " opinions, " << sum.rollups << " roll-ups, "
            << sum.committed << " transfers committed, " << sum.ledger_bytes << " ledger bytes, root "
            << sum.final_root.hex().substr(0, 16) << "\n";
  return kOk;
}

double saving(double baseline, double ours) { return baseline > 0.0 ? 100.0 * (1.0 - ours / baseline) : 0.0; }

int cmd_compare(Options const &o)
{
  auto const s    = load(o);
  auto const ours = run(s);
  auto const base = baseline_run(s);
  std::filesystem::path const dir(o.out);
  write(ours.metrics, dir / "rollup", o);
  write(base.metrics, dir / "baseline", o);

  MetricsSink summary(s.id, s.seed);
  summary.declare("summary", {"metric", "baseline", "rollup", "saving_percent"});
  auto row = [&](std::string const &name, double b, double p, bool saving_column) {
    summary.add("summary", s.rounds, {name, b, p, saving_column ? saving(b, p) : 0.0});
  };
  auto const &a = base.summary;
  auto const &b = ours.summary;
  row("reputation_bytes", static_cast<double>(a.reputation_bytes), static_cast<double>(b.reputation_bytes), true);
  row("ledger_bytes", static_cast<double>(a.ledger_bytes), static_cast<double>(b.ledger_bytes), true);
  row("blocks", static_cast<double>(a.blocks), static_cast<double>(b.blocks), false);
  row("opinions", static_cast<double>(a.opinions), static_cast<double>(b.opinions), false);
  row("transfers_committed", static_cast<double>(a.committed), static_cast<double>(b.committed), false);
  row("mean_transfer_latency", a.mean_transfer_latency, b.mean_transfer_latency, true);
  write(summary, dir, o);
  std::cout << summary.render("summary", Format::Csv);
  return kOk;
}

int cmd_attack(Options const &o)
{
  auto s        = load(o);
  s.attack.kind = parse_attack_kind(o.attack);
  if (s.attack.attackers == 0)
  {
    throw InvalidArgument("scenario has no attackers; set attack.attackers");
  }
  s.id = std::string("attack-") + to_string(s.attack.kind);
  std::filesystem::path const dir(o.out);

  auto const as_written = run(s);
  write(as_written.metrics, dir / "run", o);

  auto const rep = attack_experiment(s, {s.seed});
  write(rep.metrics, dir / "ablation", o);
  std::cout << to_string(s.attack.kind) << " ablation " << (rep.check.pass ? "PASS" : "FAIL") << ": "
            << rep.check.detail << "\n";
  return rep.check.pass ? kOk : kDomainFail;
}

int cmd_contract_sweep(Options const &o)
{
  auto const s = load(o);
  auto const m = contract_sweep(s);
  write(m, o.out, o);
  std::cout << m.render("contract_sweep", Format::Csv);
  return kOk;
}

int cmd_channel_stress(Options const &o)
{
  auto const      s = load(o);
  AtomicityParams p;
  p.rounds   = s.rounds;
  p.channels = std::min(s.clients(), s.masps());
  p.channel  = s.channel;
  auto const rep = atomicity_experiment(s.seed, p);
  write(rep.metrics, o.out, o);
  std::cout << rep.metrics.render("atomicity", Format::Csv);
  std::cout << "atomicity " << (rep.check.pass ? "PASS" : "FAIL") << ": " << rep.check.detail << "\n";
  return rep.check.pass ? kOk : kDomainFail;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Two-layer anchor chain and roll-up simulator"};
  app.require_subcommand(1);

  Options o;
  app.add_option("--seed", o.seed, "Override the scenario seed");
  app.add_option("--rounds", o.rounds, "Override the number of rounds")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "Output directory")->envname("ANCHORSIM_OUT")->capture_default_str();
  app.add_option("--format", o.format, "Output format")
    ->check(CLI::IsMember({"csv", "json"}))
    ->capture_default_str();
  app.fallthrough();

  auto *run_cmd = app.add_subcommand("run", "Simulate a scenario and write its metrics");
  run_cmd->add_option("scenario", o.scenario, "Scenario file")->required()->check(CLI::ExistingFile);

  auto *compare_cmd = app.add_subcommand("compare", "Run the scenario and its on-chain baseline side by side");
  compare_cmd->add_option("scenario", o.scenario, "Scenario file")->required()->check(CLI::ExistingFile);

  auto *attack_cmd = app.add_subcommand("attack", "Run an attack scenario and its defense ablation");
  attack_cmd->add_option("kind", o.attack, "flooding, long_range or dusting")
    ->required()
    ->check(CLI::IsMember({"flooding", "long_range", "long-range", "dusting"}));
  attack_cmd->add_option("scenario", o.scenario, "Scenario file")->required()->check(CLI::ExistingFile);

  auto *sweep_cmd = app.add_subcommand("contract-sweep", "Optimal contract and best responses over the grids");
  sweep_cmd->add_option("scenario", o.scenario, "Scenario file")->required()->check(CLI::ExistingFile);

  auto *stress_cmd = app.add_subcommand("channel-stress", "Transfer rounds under injected delays and faults");
  stress_cmd->add_option("scenario", o.scenario, "Scenario file")->required()->check(CLI::ExistingFile);

  for (auto *sub : {run_cmd, compare_cmd, attack_cmd, sweep_cmd, stress_cmd})
  {
    sub->fallthrough();
  }

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::ParseError const &e)
  {
    int const code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try
  {
    if (*run_cmd)
    {
      return cmd_run(o);
    }
    if (*compare_cmd)
    {
      return cmd_compare(o);
    }
    if (*attack_cmd)
    {
      return cmd_attack(o);
    }
    if (*sweep_cmd)
    {
      return cmd_contract_sweep(o);
    }
    return cmd_channel_stress(o);
  }
  catch (ParseError const &e)
  {
    std::cerr << "error: " << o.scenario << ": " << e.what() << "\n";
    return kDomainFail;
  }
  catch (Error const &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainFail;
  }
  catch (std::filesystem::filesystem_error const &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainFail;
  }
}
