#include "anchorsim/sim/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace anchorsim;
using namespace anchorsim::sim;

namespace {

struct Outcome
{
  std::string name;
  Check       check;
  double      seconds{0.0};
  double      budget{0.0};  ///< wall-clock limit in seconds, 0 for none
  std::string fingerprint;  ///< metrics digests plus detail, compared across runs
};

template <class Report>
Outcome timed(std::string name, double budget, std::function<Report()> const &body)
{
  auto const   t0      = std::chrono::steady_clock::now();
  Report const rep     = body();
  double const seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome      out{std::move(name), rep.check, seconds, budget, rep.metrics.digest().hex() + "|" + rep.check.detail};
  if (budget > 0.0 && seconds >= budget)
  {
    out.check.pass = false;
  }
  return out;
}

void print(Outcome const &o)
{
  std::string budget;
  if (o.budget > 0.0)
  {
    char buf[64];
    std::snprintf(buf, sizeof buf, " (budget %.0fs)", o.budget);
    budget = buf;
  }
  std::printf("%s %s [%.2fs%s] %s\n", o.check.pass ? "PASS" : "FAIL", o.name.c_str(), o.seconds, budget.c_str(),
              o.check.detail.c_str());
  std::fflush(stdout);
}

/// Runs criteria 1 to 8, printing each line as soon as it is known when `report` is set.
std::vector<Outcome> run_all(bool report)
{
  std::vector<Outcome> out;
  auto                 push = [&](Outcome o) {
    if (report)
    {
      print(o);
    }
    out.push_back(std::move(o));
  };
  push(timed<StorageReport>("1 storage compression", 10.0, [] { return storage_experiment(1); }));
  push(timed<ScalingReport>("2 roll-up scaling", 0.0, [] { return scaling_experiment(1); }));
  push(timed<LatencyReport>("3 latency decoupling", 0.0, [] { return latency_experiment(1); }));
  push(timed<AtomicityReport>("4 atomicity", 60.0, [] { return atomicity_experiment(1); }));
  push(timed<ReputationReport>("5 reputation semantics", 30.0, [] {
    return explicit_experiment({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  }));

  std::vector<std::uint64_t> const seeds{1, 2, 3, 4};
  Outcome                          attacks{"6 attack ablations", {true, ""}, 0.0, 0.0, ""};
  for (auto [kind, label] : {std::pair{AttackKind::Flooding, "(a) flooding"},
                             std::pair{AttackKind::LongRange, "(b) long-range"},
                             std::pair{AttackKind::Dusting, "(c) dusting"}})
  {
    auto const part = timed<AttackReport>(label, 0.0, [kind, &seeds] {
      return attack_experiment(attack_scenario(kind), seeds);
    });
    attacks.check.pass = attacks.check.pass && part.check.pass;
    attacks.seconds += part.seconds;
    attacks.check.detail += std::string(attacks.check.detail.empty() ? "" : "; ") + label + " " +
                            (part.check.pass ? "PASS" : "FAIL") + ": " + part.check.detail;
    attacks.fingerprint += part.fingerprint + "|";
  }
  push(std::move(attacks));

  push(timed<ContractReport>("7 contract correctness", 30.0, [] { return contract_experiment(1); }));
  push(timed<QueueReport>("8 queuing model", 0.0, [] { return queue_experiment(1); }));
  return out;
}

}  // namespace

int main()
{
  auto const  first     = run_all(true);
  auto const  second    = run_all(false);
  std::size_t differing = 0;
  bool        all_pass  = true;
  std::string names;
  for (std::size_t i = 0; i < first.size(); ++i)
  {
    all_pass = all_pass && first[i].check.pass && second[i].check.pass;
    if (first[i].fingerprint != second[i].fingerprint || first[i].check.pass != second[i].check.pass)
    {
      ++differing;
      names += " " + first[i].name.substr(0, 1);
    }
  }
  Outcome repro{"9 reproducibility", {}, 0.0, 0.0, ""};
  repro.check.pass   = differing == 0 && all_pass;
  repro.check.detail = differing == 0
                           ? "metrics digests and results identical across two runs for all 8 criteria"
                           : std::to_string(differing) + " criteria differ between runs:" + names;
  if (differing == 0 && !all_pass)
  {
    repro.check.detail += ", but not every criterion passes";
  }
  print(repro);

  bool ok = repro.check.pass;
  for (auto const &o : first)
  {
    ok = ok && o.check.pass;
  }
  return ok ? 0 : 1;
}
