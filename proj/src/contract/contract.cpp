#include "anchorsim/contract/contract.hpp"

#include "anchorsim/common/error.hpp"

#include <algorithm>
#include <cmath>

namespace anchorsim::contract {

void MarketState::validate() const
{
  if (!(output_bytes > 0.0 && bandwidth > 0.0 && difficulty > 0.0 && neighbors > 0.0 &&
        mean_queue_length > 0.0 && block_rate > 0.0 && roi > 0.0 && unit_cost > 0.0) ||
      block_capacity == 0 || participants == 0)
  {
    throw InvalidArgument("market state components must be positive");
  }
  if (!(honest_broadcast > 0.0 && honest_broadcast <= 1.0))
  {
    throw InvalidArgument("p_b must lie in (0, 1]");
  }
  if (rounds < 1)
  {
    throw InvalidArgument("zeta must be at least 1");
  }
}

std::vector<double> Grid::values() const
{
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

void Grid::validate(char const *what) const
{
  if (n == 0 || !(hi >= lo))
  {
    throw InvalidArgument(std::string(what) + " grid must be non-empty with lo <= hi");
  }
}

std::vector<MaspAction> ActionGrid::actions() const
{
  compute.validate("compute");
  fee.validate("fee");
  if (!(compute.lo > 0.0))
  {
    throw InvalidArgument("compute grid must be positive");
  }
  std::vector<MaspAction> out;
  for (double c : compute.values())
  {
    for (double f : fee.values())
    {
      out.push_back({c, f});
    }
  }
  return out;
}

std::vector<Contract> ContractGrid::contracts() const
{
  bonus.validate("bonus");
  kappa.validate("kappa");
  if (bonus.lo < 0.0 || kappa.lo < 0.0)
  {
    throw InvalidArgument("contract items must be non-negative");
  }
  std::vector<Contract> out;
  for (double b : bonus.values())
  {
    for (double k : kappa.values())
    {
      out.push_back({b, k});
    }
  }
  return out;
}

double action_latency(MarketState const &e, MaspAction const &a, os2a::FeeModel const &fees,
                      AssessmentParams const &p)
{
  os2a::ServiceParams s;
  s.output_bytes      = e.output_bytes;
  s.bandwidth         = e.bandwidth;
  s.difficulty        = e.difficulty;
  s.compute           = a.compute;
  s.block_capacity    = e.block_capacity;
  s.nodes             = e.participants;
  s.neighbors         = e.neighbors;
  s.honest_broadcast  = e.honest_broadcast;
  s.block_rate        = e.block_rate;
  s.mean_queue_length = e.mean_queue_length;
  s.log_base          = p.log_base;
  s.channel_active    = p.channel_active;
  return os2a::total_latency(s, fees, fees.band_of(a.fee));
}

namespace {

os2a::FeeModel fee_model_for(ActionGrid const &g, AssessmentParams const &p)
{
  double hi = g.fee.hi > g.fee.lo ? g.fee.hi : g.fee.lo + 1.0;
  return os2a::FeeModel(g.fee.lo, hi, p.fee_bands);
}

double objective_of(MarketState const &e, MaspAction const &a, os2a::FeeModel const &fees, AssessmentParams const &p)
{
  double const t     = action_latency(e, a, fees, p);
  double const kpi[] = {1.0 / t};
  // a non-positive analytic latency gives a negative KPI, which the step gate zeroes
  return os2a::objective_score(p.kpis, kpi);
}

}  // namespace

Assessor::Assessor(MarketState state, ActionGrid grid, AssessmentParams params)
  : state_(state)
  , grid_(grid)
  , params_(std::move(params))
  , fees_(fee_model_for(grid, params_))
{
  state_.validate();
  if (!(params_.expected_os2a > 0.0))
  {
    throw InvalidArgument("expected OS2A must be positive");
  }
  bool first = true;
  for (auto const &a : grid_.actions())
  {
    double v = objective_of(state_, a, fees_, params_);
    if (first)
    {
      bounds_ = {v, v};
      first   = false;
    }
    bounds_.lo = std::min(bounds_.lo, v);
    bounds_.hi = std::max(bounds_.hi, v);
  }
}

double Assessor::objective(MaspAction const &a) const { return objective_of(state_, a, fees_, params_); }

double Assessor::os2a(MaspAction const &a) const
{
  double const o     = objective(a);
  double const o_n   = bounds_.hi > bounds_.lo ? os2a::normalize(o, bounds_) : 0.0;
  double const s_n   = os2a::normalize(params_.subjective, params_.subjective_bounds);
  return params_.alpha * o_n + (1.0 - params_.alpha) * s_n;
}

double service_fee(Contract const &c, double os2a, double difficulty)
{
  if (os2a < 0.0 || os2a > 1.0)
  {
    throw InvalidArgument("OS2A must lie in [0, 1]");
  }
  return c.fixed_fee(difficulty) + c.bonus * os2a;
}

double client_utility(double service_fee, double os2a, double roi, double expected_os2a)
{
  if (!(expected_os2a > 0.0))
  {
    throw InvalidArgument("expected OS2A must be positive");
  }
  return (1.0 + roi) * service_fee * (os2a / expected_os2a) - service_fee;
}

double masp_utility(double service_fee, MaspAction const &a, MarketState const &e)
{
  if (!(a.compute > 0.0))
  {
    throw InvalidArgument("invested compute must be positive");
  }
  double const t2 = e.difficulty / a.compute;
  return service_fee - (a.fee / static_cast<double>(e.rounds) + e.unit_cost * a.compute * t2);
}

double masp_utility(Contract const &c, MaspAction const &a, Assessor const &assessor)
{
  auto const &e = assessor.state();
  return masp_utility(service_fee(c, assessor.os2a(a), e.difficulty), a, e);
}

namespace {

struct Evaluated
{
  MaspAction action;
  double     os2a;
};

std::vector<Evaluated> evaluate_grid(Assessor const &assessor)
{
  std::vector<Evaluated> out;
  for (auto const &a : assessor.grid().actions())
  {
    out.push_back({a, assessor.os2a(a)});
  }
  return out;
}

Response respond(Contract const &c, std::vector<Evaluated> const &grid, Assessor const &assessor)
{
  auto const &e = assessor.state();
  Response    best;
  bool        first = true;
  for (auto const &g : grid)
  {
    double const im = service_fee(c, g.os2a, e.difficulty);
    double const u  = masp_utility(im, g.action, e);
    // the grid is ascending in (compute, fee), so keeping the first maximum
    // implements the tie-break
    if (first || u > best.masp_utility)
    {
      best  = {g.action, g.os2a, im, u, 0.0};
      first = false;
    }
  }
  best.client_utility =
    client_utility(best.fee, best.os2a, e.roi, assessor.params().expected_os2a);
  return best;
}

}  // namespace

Response best_response(Contract const &c, Assessor const &assessor)
{
  return respond(c, evaluate_grid(assessor), assessor);
}

Outcome optimize_contract(ContractGrid const &contracts, Assessor const &assessor, double threshold)
{
  auto const grid = evaluate_grid(assessor);
  Outcome    out;
  for (auto const &c : contracts.contracts())
  {
    ++out.evaluated;
    auto r = respond(c, grid, assessor);
    if (r.masp_utility < threshold)
    {
      ++out.rejected_ir;
      continue;
    }
    if (!out.feasible || r.client_utility > out.response.client_utility)
    {
      out.feasible = true;
      out.contract = c;
      out.response = r;
    }
  }
  return out;
}

AuditReport moral_hazard_audit(Contract const &c, Assessor const &assessor)
{
  auto const  grid = evaluate_grid(assessor);
  AuditReport rep;
  rep.best = respond(c, grid, assessor);
  auto const &e   = assessor.state();
  double      ref = std::numeric_limits<double>::quiet_NaN();
  for (auto const &g : grid)
  {
    double const u     = masp_utility(service_fee(c, g.os2a, e.difficulty), g.action, e);
    double const delta = u - rep.best.masp_utility;
    rep.surface.push_back({g.action, delta});
    rep.max_delta = rep.surface.size() == 1 ? delta : std::max(rep.max_delta, delta);
    if (delta > 0.0)
    {
      ++rep.profitable;
    }
    double const cost = e.unit_cost * g.action.compute * (e.difficulty / g.action.compute);
    if (std::isnan(ref))
    {
      ref = cost;
    }
    else if (std::abs(cost - ref) > 1e-9 * std::max(1.0, std::abs(ref)))
    {
      rep.compute_cost_constant = false;
    }
  }
  return rep;
}

}  // namespace anchorsim::contract
