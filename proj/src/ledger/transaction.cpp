#include "anchorsim/ledger/transaction.hpp"

#include "anchorsim/ledger/block.hpp"

namespace anchorsim::ledger {

namespace {

constexpr std::uint8_t kRollupTag = 0x01;
constexpr std::uint8_t kPoisonTag = 0x02;

void write_body(Writer &w, Transaction const &tx)
{
  if (tx.payload.size() > kMaxPayloadBytes)
  {
    throw PayloadTooLarge("payload of " + std::to_string(tx.payload.size()) + " bytes exceeds " +
                          std::to_string(kMaxPayloadBytes));
  }
  w.u8(static_cast<std::uint8_t>(tx.kind));
  w.field(tx.sender.view());
  if (tx.receiver)
  {
    w.field(tx.receiver->view());
  }
  else
  {
    w.field({});
  }
  w.field(tx.payload);
  w.i64(tx.fee);
}

Address read_address(ByteView raw)
{
  return Address{Digest::from_bytes(raw)};
}

}  // namespace

char const *to_string(TxKind kind)
{
  switch (kind)
  {
  case TxKind::OpinionUpdate:
    return "OpinionUpdate";
  case TxKind::ReputationRollup:
    return "ReputationRollup";
  case TxKind::TransferChannel:
    return "TransferChannel";
  }
  return "Unknown";
}

Bytes Transaction::signing_bytes() const
{
  Writer w;
  write_body(w, *this);
  return std::move(w).take();
}

Bytes serialize_transaction(Transaction const &tx)
{
  Writer w;
  write_body(w, tx);
  w.field(tx.signature.bytes);
  return std::move(w).take();
}

Transaction deserialize_transaction(ByteView bytes)
{
  Reader      r(bytes);
  Transaction tx;
  auto        kind = r.u8();
  if (kind < 1 || kind > 3)
  {
    throw InvalidArgument("unknown transaction kind " + std::to_string(kind));
  }
  tx.kind   = static_cast<TxKind>(kind);
  tx.sender = read_address(r.field());
  auto recv = r.field();
  if (!recv.empty())
  {
    tx.receiver = read_address(recv);
  }
  auto payload = r.field();
  if (payload.size() > kMaxPayloadBytes)
  {
    throw PayloadTooLarge("payload exceeds limit");
  }
  tx.payload.assign(payload.begin(), payload.end());
  tx.fee = r.i64();
  auto sig = r.field();
  tx.signature.bytes.assign(sig.begin(), sig.end());
  if (!r.done())
  {
    throw InvalidArgument("trailing bytes after transaction");
  }
  return tx;
}

Digest transaction_id(Transaction const &tx)
{
  return hash(serialize_transaction(tx));
}

Transaction make_signed(SignatureScheme const &scheme, Identity const &sender, TxKind kind,
                        std::optional<Address> receiver, Bytes payload, Tokens fee)
{
  if (fee < 0)
  {
    throw InvalidArgument("negative fee");
  }
  Transaction tx;
  tx.kind      = kind;
  tx.sender    = sender.address();
  tx.receiver  = receiver;
  tx.payload   = std::move(payload);
  tx.fee       = fee;
  tx.signature = scheme.sign(sender, tx.signing_bytes());
  return tx;
}

bool verify_transaction(SignatureScheme const &scheme, Transaction const &tx)
{
  if (tx.payload.size() > kMaxPayloadBytes || tx.fee < 0)
  {
    return false;
  }
  return scheme.verify(tx.sender, tx.signing_bytes(), tx.signature);
}

Bytes encode_rollup(RollupRecord const &r)
{
  Writer w;
  w.u8(kRollupTag);
  w.u32(static_cast<std::uint32_t>(r.hashes.size()));
  for (auto const &h : r.hashes)
  {
    w.raw(h.view());
  }
  w.raw(r.root.view());
  return std::move(w).take();
}

Bytes encode_poison(PoisonRecord const &p)
{
  Writer w;
  w.u8(kPoisonTag);
  w.raw(p.target.view());
  return std::move(w).take();
}

std::optional<RollupRecord> decode_rollup(ByteView payload)
{
  Reader r(payload);
  if (r.u8() != kRollupTag)
  {
    return std::nullopt;
  }
  RollupRecord rec;
  auto const   n = r.u32();
  rec.hashes.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i)
  {
    rec.hashes.push_back(Digest::from_bytes(r.raw(Digest::kSize)));
  }
  rec.root = Digest::from_bytes(r.raw(Digest::kSize));
  if (!r.done())
  {
    throw InvalidArgument("trailing bytes after roll-up record");
  }
  return rec;
}

std::optional<PoisonRecord> decode_poison(ByteView payload)
{
  Reader r(payload);
  if (r.u8() != kPoisonTag)
  {
    return std::nullopt;
  }
  PoisonRecord p{Digest::from_bytes(r.raw(Digest::kSize))};
  return p;
}

std::size_t accounting_size(Transaction const &tx)
{
  if (tx.kind == TxKind::ReputationRollup)
  {
    if (auto rec = decode_rollup(tx.payload))
    {
      return rec->accounting_size();
    }
  }
  return kTxRecordBytes;
}

Digest transactions_root(std::vector<Transaction> const &txs)
{
  Writer w;
  w.raw(as_bytes("anchorsim/tx-root"));
  for (auto const &tx : txs)
  {
    w.raw(transaction_id(tx).view());
  }
  return hash(w.bytes());
}

Bytes serialize_header(BlockHeader const &h)
{
  Writer w;
  w.u64(h.index);
  w.raw(h.previous.view());
  w.i64(h.timestamp_us);
  w.raw(h.producer.view());
  w.raw(h.tx_root.view());
  return std::move(w).take();
}

Digest Block::digest() const
{
  return hash(serialize_header(header));
}

std::size_t Block::accounting_size() const
{
  std::size_t total = kBlockHeaderBytes;
  for (auto const &tx : transactions)
  {
    total += ledger::accounting_size(tx);
  }
  return total;
}

}  // namespace anchorsim::ledger
