#pragma once

#include "anchorsim/os2a/assessment.hpp"
#include "anchorsim/os2a/latency.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace anchorsim::contract {

/// Payment contract {mu_s, F_s}, with F_s = kappa * D_t.
struct Contract
{
  double bonus{0.0};  ///< mu_s: tokens per unit OS2A
  double kappa{0.0};  ///< fixed fee per unit task difficulty

  double fixed_fee(double difficulty) const { return kappa * difficulty; }
  bool   operator==(Contract const &) const = default;
};

/// The twelve-component market state.
struct MarketState
{
  double      output_bytes{1.0e6};      ///< S_p
  double      bandwidth{1.0e6};         ///< b-bar
  double      difficulty{50.0};         ///< D_t
  std::size_t block_capacity{2000};     ///< S_b
  std::size_t participants{8};          ///< |C|: nodes relaying the establish transaction
  double      neighbors{4.0};           ///< k-bar
  double      honest_broadcast{1.0};    ///< p_b
  double      mean_queue_length{100.0}; ///< E(L)
  double      block_rate{0.2};          ///< lambda
  double      roi{0.2};                 ///< epsilon-bar: client's average return on investment
  double      unit_cost{0.1};           ///< r: cost per unit compute-second
  std::uint64_t rounds{10};             ///< zeta: rounds sharing one channel

  void validate() const;
};

struct MaspAction
{
  double compute{10.0};  ///< c-bar
  double fee{1.0};       ///< F_e

  bool operator==(MaspAction const &) const = default;
};

/// n evenly spaced points on [lo, hi]; n == 1 gives {lo}.
struct Grid
{
  double      lo{0.0};
  double      hi{1.0};
  std::size_t n{1};

  std::vector<double> values() const;
  void                validate(char const *what) const;
};

struct ActionGrid
{
  Grid compute;
  Grid fee;

  std::vector<MaspAction> actions() const;  ///< compute-major, both ascending
};

struct ContractGrid
{
  Grid bonus;
  Grid kappa;

  std::vector<Contract> contracts() const;  ///< bonus-major, both ascending
};

/// How an action translates into an OS2A value.
struct AssessmentParams
{
  double         alpha{0.5};
  double         subjective{0.5};     ///< OS2A_S: the MASP's reputation, taken as given within one round
  os2a::Bounds   subjective_bounds{0.0, 1.0};
  double         expected_os2a{0.5};  ///< E(OS2A) held by the client
  std::size_t    fee_bands{5};
  os2a::LogBase  log_base{os2a::LogBase::Natural};
  os2a::KpiSpec  kpis{os2a::KpiSpec::reciprocal_latency()};
  /// Round served over an already-open channel: no establishment latency.
  bool           channel_active{false};
};

/// Latency of the establishing round under `action`.
double action_latency(MarketState const &e, MaspAction const &a, os2a::FeeModel const &fees,
                      AssessmentParams const &p);

/// Evaluates OS2A for every action of a grid; the objective component is
/// normalised by the extremes of the objective score across the grid.
class Assessor
{
public:
  Assessor(MarketState state, ActionGrid grid, AssessmentParams params = {});

  double                  os2a(MaspAction const &a) const;
  double                  objective(MaspAction const &a) const;
  os2a::Bounds const     &objective_bounds() const { return bounds_; }
  MarketState const      &state() const { return state_; }
  AssessmentParams const &params() const { return params_; }
  ActionGrid const       &grid() const { return grid_; }
  os2a::FeeModel const   &fees() const { return fees_; }

private:
  MarketState      state_;
  ActionGrid       grid_;
  AssessmentParams params_;
  os2a::FeeModel   fees_;
  os2a::Bounds     bounds_;
};

/// I_M = F_s(D_t) + mu_s * OS2A.
double service_fee(Contract const &c, double os2a, double difficulty);
/// U_C = (1 + eps) * I_M * OS2A / E(OS2A) - I_M.
double client_utility(double service_fee, double os2a, double roi, double expected_os2a);
/// U_SP = I_M - [F_e / zeta + r * c * (D_t / c)].
double masp_utility(double service_fee, MaspAction const &a, MarketState const &e);
double masp_utility(Contract const &c, MaspAction const &a, Assessor const &assessor);

struct Response
{
  MaspAction action;
  double     os2a{0.0};
  double     fee{0.0};  ///< I_M
  double     masp_utility{0.0};
  double     client_utility{0.0};
};

/// Exhaustive argmax of U_SP over the action grid; ties go to the lowest
/// compute, then the lowest fee.
Response best_response(Contract const &c, Assessor const &assessor);

struct Outcome
{
  bool                  feasible{false};
  Contract              contract;
  Response              response;
  std::size_t           evaluated{0};
  std::size_t           rejected_ir{0};
};

/// Outer maximisation of U_C over the contract grid at the MASP's best
/// response, subject to U_SP >= threshold. Ties go to the lowest bonus, then
/// the lowest kappa.
Outcome optimize_contract(ContractGrid const &contracts, Assessor const &assessor,
                          double threshold = -std::numeric_limits<double>::infinity());

struct Deviation
{
  MaspAction action;
  double     delta{0.0};  ///< U_SP(action) - U_SP(best response)
};

struct AuditReport
{
  Response               best;
  std::vector<Deviation> surface;
  double                 max_delta{0.0};
  std::size_t            profitable{0};
  /// r * c * (D_t / c) = r * D_t: compute cost does not depend on c.
  bool                   compute_cost_constant{true};
};

AuditReport moral_hazard_audit(Contract const &c, Assessor const &assessor);

}  // namespace anchorsim::contract
