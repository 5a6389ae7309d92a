#include "anchorsim/rollup/opinion_tx.hpp"

#include "anchorsim/rollup/reputation_tree.hpp"

namespace anchorsim::rollup {

namespace {
constexpr std::uint8_t kOpinionTag = 0x10;
}

Bytes encode_opinion(OpinionPayload const &p)
{
  Writer w;
  w.u8(kOpinionTag);
  w.u8(p.satisfied ? 1 : 0);
  w.i64(p.value);
  w.u64(p.block);
  w.u64(p.round);
  w.i64(to_fixed(p.local.s));
  w.i64(to_fixed(p.local.u));
  w.i64(to_fixed(p.local.c));
  return std::move(w).take();
}

OpinionPayload decode_opinion(ByteView payload)
{
  Reader r(payload);
  if (r.u8() != kOpinionTag)
  {
    throw InvalidArgument("not an opinion payload");
  }
  OpinionPayload p;
  auto const flag = r.u8();
  if (flag > 1)
  {
    throw InvalidArgument("bad satisfaction flag");
  }
  p.satisfied = flag == 1;
  p.value     = r.i64();
  p.block     = r.u64();
  p.round     = r.u64();
  p.local.s   = from_fixed(r.i64());
  p.local.u   = from_fixed(r.i64());
  p.local.c   = from_fixed(r.i64());
  if (!r.done())
  {
    throw InvalidArgument("trailing bytes after opinion payload");
  }
  if (p.value < 0)
  {
    throw InvalidArgument("negative market value");
  }
  return p;
}

ledger::Transaction make_opinion_tx(ledger::SignatureScheme const &scheme, ledger::Identity const &client,
                                    ledger::Address const &masp, OpinionPayload const &payload, Tokens fee)
{
  return ledger::make_signed(scheme, client, ledger::TxKind::OpinionUpdate, masp, encode_opinion(payload), fee);
}

}  // namespace anchorsim::rollup
