#pragma once

#include "anchorsim/mwsl/interaction_ledger.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace anchorsim::mwsl {

struct Candidate
{
  MaspId masp;
  double reputation;
};

enum class Handshake
{
  Request,  ///< service details; MASP acknowledges or rejects
  Prompts,  ///< encrypted prompts; MASP acknowledges or rejects
};

/// Returns true when the MASP acknowledges the given handshake round.
using Responder = std::function<bool(MaspId, Handshake)>;

struct SelectionOutcome
{
  std::optional<MaspId> selected;
  /// MASPs contacted, in order.
  std::vector<MaspId>   attempts;
};

/// Tries candidates in descending reputation (ties: lower id first) through
/// the two-round handshake; the first MASP acknowledging both rounds wins.
SelectionOutcome select_masp(std::vector<Candidate> candidates, Responder const &respond);

}  // namespace anchorsim::mwsl
