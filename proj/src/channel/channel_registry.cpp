#include "anchorsim/channel/channel_registry.hpp"

#include "anchorsim/common/error.hpp"

namespace anchorsim::channel {

namespace {

Digest read_digest(Reader &r) { return Digest::from_bytes(r.raw(Digest::kSize)); }

}  // namespace

Bytes encode_establish(EstablishRecord const &r)
{
  Writer w;
  w.u8(static_cast<std::uint8_t>(ChannelOp::Establish));
  w.raw(r.channel_id.view());
  w.raw(r.client.view());
  w.raw(r.masp.view());
  w.i64(r.deposit);
  w.u64(r.timeout_us);
  return std::move(w).take();
}

Bytes encode_close(CloseRecord const &r)
{
  Writer w;
  w.u8(static_cast<std::uint8_t>(ChannelOp::Close));
  w.raw(r.channel_id.view());
  w.u64(r.rounds);
  w.i64(r.refund);
  w.u32(static_cast<std::uint32_t>(r.ownership.size()));
  for (auto const &d : r.ownership)
  {
    w.raw(d.view());
  }
  return std::move(w).take();
}

std::optional<EstablishRecord> decode_establish(ByteView payload)
{
  Reader r(payload);
  if (payload.empty() || r.u8() != static_cast<std::uint8_t>(ChannelOp::Establish))
  {
    return std::nullopt;
  }
  EstablishRecord e;
  e.channel_id = read_digest(r);
  e.client     = Address{read_digest(r)};
  e.masp       = Address{read_digest(r)};
  e.deposit    = r.i64();
  e.timeout_us = r.u64();
  if (!r.done())
  {
    throw InvalidArgument("trailing bytes after establish record");
  }
  return e;
}

std::optional<CloseRecord> decode_close(ByteView payload)
{
  Reader r(payload);
  if (payload.empty() || r.u8() != static_cast<std::uint8_t>(ChannelOp::Close))
  {
    return std::nullopt;
  }
  CloseRecord c;
  c.channel_id = read_digest(r);
  c.rounds     = r.u64();
  c.refund     = r.i64();
  auto n       = r.u32();
  for (std::uint32_t i = 0; i < n; ++i)
  {
    c.ownership.push_back(read_digest(r));
  }
  if (!r.done())
  {
    throw InvalidArgument("trailing bytes after close record");
  }
  return c;
}

ChannelRegistry::ChannelRegistry(chain::AnchorChain &anchor, ChannelConfig defaults, std::uint64_t seed,
                                 Tokens tx_fee)
  : anchor_(anchor)
  , scheme_(anchor.scheme())
  , defaults_(defaults)
  , seed_(seed)
  , tx_fee_(tx_fee)
{
  defaults_.validate();
  if (tx_fee_ < 0)
  {
    throw InvalidArgument("negative channel transaction fee");
  }
  anchor_.on_block([this](ledger::Block const &b, double) { on_block(b); });
}

void ChannelRegistry::credit(Address const &account, Tokens amount)
{
  if (amount < 0)
  {
    throw InvalidArgument("negative credit");
  }
  balances_[account] += amount;
}

Tokens ChannelRegistry::balance(Address const &account) const
{
  auto it = balances_.find(account);
  return it == balances_.end() ? 0 : it->second;
}

void ChannelRegistry::debit(Address const &account, Tokens amount)
{
  auto &b = balances_[account];
  if (b < amount)
  {
    throw InvalidArgument("insufficient balance: " + account.short_hex() + " holds " + std::to_string(b) +
                          ", needs " + std::to_string(amount));
  }
  b -= amount;
}

Tokens ChannelRegistry::total_supply() const
{
  Tokens t = escrow_ + fees_collected_;
  for (auto const &[_, b] : balances_)
  {
    t += b;
  }
  return t;
}

Channel &ChannelRegistry::open_channel(ledger::Identity const &client, ledger::Identity const &masp, Tokens deposit,
                                       double now, std::optional<ChannelConfig> config)
{
  if (deposit < 0)
  {
    throw InvalidArgument("negative channel deposit");
  }
  if (live(client.address(), masp.address()) != nullptr)
  {
    throw InvalidArgument("a channel between " + client.address().short_hex() + " and " +
                          masp.address().short_hex() + " is already open");
  }
  if (balance(client.address()) < deposit + tx_fee_)
  {
    throw InvalidArgument("insufficient balance to open a channel with deposit " + std::to_string(deposit));
  }
  auto const cfg = config.value_or(defaults_);

  Writer idw;
  idw.raw(client.address().view());
  idw.raw(masp.address().view());
  idw.u64(nonce_++);
  auto const id = ledger::hash(idw.bytes());

  EstablishRecord rec{id, client.address(), masp.address(), deposit,
                      static_cast<std::uint64_t>(cfg.step_timeout * 1e6)};
  auto tx = ledger::make_signed(scheme_, client, ledger::TxKind::TransferChannel, masp.address(),
                                encode_establish(rec), tx_fee_);
  auto const tx_id = ledger::transaction_id(tx);
  anchor_.submit(std::move(tx), now);

  debit(client.address(), deposit + tx_fee_);
  escrow_ += deposit;
  fees_collected_ += tx_fee_;

  auto ch = std::make_unique<Channel>(id, client, masp, deposit, cfg, scheme_, mix64(seed_ ^ nonce_));
  auto &ref = *ch;
  channels_.emplace(id, std::move(ch));
  live_[{client.address(), masp.address()}] = id;
  pending_open_.emplace(tx_id, id);
  return ref;
}

Settlement ChannelRegistry::close_channel(Digest const &id, double now,
                                          std::optional<std::vector<ChannelState>> submitted)
{
  auto *ch = find(id);
  if (ch == nullptr)
  {
    throw LookupError("unknown channel " + id.hex());
  }
  if (ch->status() == ChannelStatus::Closing)
  {
    for (auto const &s : settlements_)
    {
      if (s.channel_id == id && s.accepted)
      {
        return s;
      }
    }
  }
  if (ch->status() != ChannelStatus::Open)
  {
    throw InvalidArgument("channel " + id.hex().substr(0, 12) + " is not open");
  }
  ch->release_stalled();
  auto const log = submitted.value_or(ch->log());

  Settlement s;
  s.channel_id = id;
  if (!verify_state_log(log, id, ch->deposit(), ch->client(), ch->masp(), scheme_))
  {
    ch->set_status(ChannelStatus::Frozen);
    live_.erase({ch->client(), ch->masp()});
    ++frozen_;
    settlements_.push_back(s);
    return s;
  }

  auto const &fin = log.back();
  s.accepted      = true;
  s.rounds        = fin.round;
  s.refund        = fin.balance;
  s.fees          = ch->deposit() - fin.balance;
  s.digests       = fin.ownership;

  auto const &client = ch->client_identity();
  debit(client.address(), tx_fee_);
  fees_collected_ += tx_fee_;
  auto tx = ledger::make_signed(scheme_, client, ledger::TxKind::TransferChannel, ch->masp(),
                                encode_close({id, s.rounds, s.refund, s.digests}), tx_fee_);
  s.tx_id = ledger::transaction_id(tx);
  anchor_.submit(std::move(tx), now);

  ch->set_status(ChannelStatus::Closing);
  live_.erase({ch->client(), ch->masp()});
  pending_close_.emplace(s.tx_id, settlements_.size());
  settlements_.push_back(s);
  return s;
}

void ChannelRegistry::on_block(ledger::Block const &block)
{
  for (auto const &tx : block.transactions)
  {
    if (tx.kind != ledger::TxKind::TransferChannel)
    {
      continue;
    }
    auto const tx_id = ledger::transaction_id(tx);
    if (auto it = pending_open_.find(tx_id); it != pending_open_.end())
    {
      channels_.at(it->second)->set_status(ChannelStatus::Open);
      pending_open_.erase(it);
    }
    else if (auto jt = pending_close_.find(tx_id); jt != pending_close_.end())
    {
      auto &s  = settlements_[jt->second];
      auto &ch = *channels_.at(s.channel_id);
      escrow_ -= ch.deposit();
      balances_[ch.client()] += s.refund;
      balances_[ch.masp()] += s.fees;
      for (auto const &d : s.digests)
      {
        owners_.emplace(d, ch.client());
      }
      s.anchored = true;
      ch.set_status(ChannelStatus::Closed);
      pending_close_.erase(jt);
    }
  }
}

Channel *ChannelRegistry::find(Digest const &id)
{
  auto it = channels_.find(id);
  return it == channels_.end() ? nullptr : it->second.get();
}

Channel const *ChannelRegistry::find(Digest const &id) const
{
  auto it = channels_.find(id);
  return it == channels_.end() ? nullptr : it->second.get();
}

Channel *ChannelRegistry::live(Address const &client, Address const &masp)
{
  auto it = live_.find({client, masp});
  return it == live_.end() ? nullptr : find(it->second);
}

std::optional<Address> ChannelRegistry::owner_of(Digest const &content) const
{
  auto it = owners_.find(content);
  if (it == owners_.end())
  {
    return std::nullopt;
  }
  return it->second;
}

std::size_t ChannelRegistry::open_count() const
{
  std::size_t n = 0;
  for (auto const &[_, ch] : channels_)
  {
    n += ch->status() == ChannelStatus::Open ? 1 : 0;
  }
  return n;
}

}  // namespace anchorsim::channel
