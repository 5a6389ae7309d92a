#pragma once

#include "anchorsim/ledger/transaction.hpp"
#include "anchorsim/mwsl/opinion.hpp"

namespace anchorsim::rollup {

/// Body of an OpinionUpdate transaction: one client judgement of one service round.
struct OpinionPayload
{
  bool          satisfied{false};
  Tokens        value{0};  ///< market value: fee paid for the judged round
  std::uint64_t block{0};  ///< anchor height when the judgement was made
  std::uint64_t round{0};
  mwsl::Opinion local;     ///< client's local opinion after this judgement

  bool operator==(OpinionPayload const &) const = default;
};

Bytes          encode_opinion(OpinionPayload const &p);
OpinionPayload decode_opinion(ByteView payload);

ledger::Transaction make_opinion_tx(ledger::SignatureScheme const &scheme, ledger::Identity const &client,
                                    ledger::Address const &masp, OpinionPayload const &payload, Tokens fee = 0);

}  // namespace anchorsim::rollup
