#pragma once

#include "anchorsim/common/bytes.hpp"
#include "anchorsim/common/error.hpp"
#include "anchorsim/ledger/crypto.hpp"
#include "anchorsim/ledger/digest.hpp"

#include <optional>
#include <vector>

namespace anchorsim::ledger {

// Storage-accounting model. These are the units ledger sizes are reported in;
// the in-memory encoding is larger and irrelevant to the metrics.
inline constexpr std::size_t kTxRecordBytes     = 99;
inline constexpr std::size_t kHashRecordBytes   = 32;
inline constexpr std::size_t kBlockHeaderBytes  = 120;
inline constexpr std::size_t kMaxPayloadBytes   = 1u << 20;

enum class TxKind : std::uint8_t
{
  OpinionUpdate    = 1,
  ReputationRollup = 2,
  TransferChannel  = 3,
};

char const *to_string(TxKind kind);

class PayloadTooLarge : public InvalidArgument
{
public:
  using InvalidArgument::InvalidArgument;
};

struct Transaction
{
  TxKind                 kind{TxKind::OpinionUpdate};
  Address                sender;
  std::optional<Address> receiver;
  Bytes                  payload;
  Tokens                 fee{0};
  Signature              signature;

  /// Canonical bytes covered by the signature: every field except the signature.
  Bytes signing_bytes() const;

  bool operator==(Transaction const &) const = default;
};

/// Length-prefixed field concatenation in declaration order.
Bytes       serialize_transaction(Transaction const &tx);
Transaction deserialize_transaction(ByteView bytes);

/// Transaction id: hash of the canonical serialization.
Digest transaction_id(Transaction const &tx);

Transaction make_signed(SignatureScheme const &scheme, Identity const &sender, TxKind kind,
                        std::optional<Address> receiver, Bytes payload, Tokens fee);
bool        verify_transaction(SignatureScheme const &scheme, Transaction const &tx);

/// Roll-up block body carried by a ReputationRollup transaction.
struct RollupRecord
{
  std::vector<Digest> hashes;
  Digest              root;

  std::size_t accounting_size() const { return kHashRecordBytes * hashes.size() + kHashRecordBytes; }
  bool        operator==(RollupRecord const &) const = default;
};

/// Claim that a previously submitted roll-up (identified by its tx id) is invalid.
struct PoisonRecord
{
  Digest target;

  bool operator==(PoisonRecord const &) const = default;
};

Bytes encode_rollup(RollupRecord const &r);
Bytes encode_poison(PoisonRecord const &p);
/// Returns nullopt when the payload is a poison claim.
std::optional<RollupRecord> decode_rollup(ByteView payload);
std::optional<PoisonRecord> decode_poison(ByteView payload);

/// Accounting size of one transaction record: a roll-up costs its hash list
/// plus root, everything else is a plain 99-byte record.
std::size_t accounting_size(Transaction const &tx);

}  // namespace anchorsim::ledger
