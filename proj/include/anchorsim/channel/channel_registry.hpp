#pragma once

#include "anchorsim/chain/anchor_chain.hpp"
#include "anchorsim/channel/channel.hpp"

#include <map>
#include <memory>

namespace anchorsim::channel {

enum class ChannelOp : std::uint8_t
{
  Establish = 1,
  Close     = 2,
};

struct EstablishRecord
{
  Digest        channel_id;
  Address       client;
  Address       masp;
  Tokens        deposit{0};
  std::uint64_t timeout_us{0};

  bool operator==(EstablishRecord const &) const = default;
};

struct CloseRecord
{
  Digest              channel_id;
  std::uint64_t       rounds{0};
  Tokens              refund{0};
  std::vector<Digest> ownership;

  bool operator==(CloseRecord const &) const = default;
};

Bytes                          encode_establish(EstablishRecord const &r);
Bytes                          encode_close(CloseRecord const &r);
std::optional<EstablishRecord> decode_establish(ByteView payload);
std::optional<CloseRecord>     decode_close(ByteView payload);

struct Settlement
{
  Digest              channel_id;
  std::uint64_t       rounds{0};
  Tokens              fees{0};    ///< moved to the MASP
  Tokens              refund{0};  ///< returned to the client
  std::vector<Digest> digests;    ///< ownership registered to the client
  Digest              tx_id;
  bool                accepted{false};
  bool                anchored{false};
};

/// On-chain side of the transfer channels: account balances, escrowed
/// deposits, the content-ownership registry and settlement.
///
/// Balance effects of channel operations apply when the carrying transaction
/// is anchored; deposits are reserved in escrow at submission.
class ChannelRegistry
{
public:
  ChannelRegistry(chain::AnchorChain &anchor, ChannelConfig defaults, std::uint64_t seed, Tokens tx_fee = 0);
  ChannelRegistry(ChannelRegistry const &)            = delete;
  ChannelRegistry &operator=(ChannelRegistry const &) = delete;

  void   credit(Address const &account, Tokens amount);
  Tokens balance(Address const &account) const;
  Tokens escrowed() const { return escrow_; }
  Tokens fees_collected() const { return fees_collected_; }
  /// Balances + escrow + collected transaction fees; constant after funding.
  Tokens total_supply() const;

  /// Submits the establish transaction; the channel opens once it is anchored.
  Channel &open_channel(ledger::Identity const &client, ledger::Identity const &masp, Tokens deposit, double now,
                        std::optional<ChannelConfig> config = std::nullopt);

  /// Validates `submitted` (default: the channel's own log) and submits the
  /// close transaction. An invalid log freezes the channel instead. Closing
  /// a channel already closing returns its pending settlement.
  Settlement close_channel(Digest const &id, double now,
                           std::optional<std::vector<ChannelState>> submitted = std::nullopt);

  Channel       *find(Digest const &id);
  Channel const *find(Digest const &id) const;
  /// The pending or open channel between the pair, if any. A closing channel
  /// is no longer live, so the pair may reopen before its settlement anchors.
  Channel *live(Address const &client, Address const &masp);

  std::optional<Address>         owner_of(Digest const &content) const;
  std::vector<Settlement> const &settlements() const { return settlements_; }
  std::size_t                    frozen() const { return frozen_; }
  std::size_t                    open_count() const;

private:
  void on_block(ledger::Block const &block);
  void debit(Address const &account, Tokens amount);

  chain::AnchorChain                                    &anchor_;
  ledger::SignatureScheme                               &scheme_;
  ChannelConfig                                          defaults_;
  std::uint64_t                                          seed_;
  Tokens                                                 tx_fee_;
  std::map<Address, Tokens>                              balances_;
  Tokens                                                 escrow_{0};
  Tokens                                                 fees_collected_{0};
  std::map<Digest, std::unique_ptr<Channel>>             channels_;
  std::map<std::pair<Address, Address>, Digest>         live_;
  std::map<Digest, Digest>                               pending_open_;   ///< tx id -> channel
  std::map<Digest, std::size_t>                          pending_close_;  ///< tx id -> settlement index
  std::map<Digest, Address>                              owners_;
  std::vector<Settlement>                                settlements_;
  std::size_t                                            frozen_{0};
  std::uint64_t                                          nonce_{0};
};

}  // namespace anchorsim::channel
