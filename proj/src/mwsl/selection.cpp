#include "anchorsim/mwsl/selection.hpp"

#include <algorithm>

namespace anchorsim::mwsl {

SelectionOutcome select_masp(std::vector<Candidate> candidates, Responder const &respond)
{
  std::stable_sort(candidates.begin(), candidates.end(), [](Candidate const &a, Candidate const &b) {
    return a.reputation != b.reputation ? a.reputation > b.reputation : a.masp < b.masp;
  });
  SelectionOutcome out;
  for (auto const &c : candidates)
  {
    out.attempts.push_back(c.masp);
    if (!respond(c.masp, Handshake::Request))
    {
      continue;
    }
    if (!respond(c.masp, Handshake::Prompts))
    {
      continue;
    }
    out.selected = c.masp;
    break;
  }
  return out;
}

}  // namespace anchorsim::mwsl
