#pragma once

#include "anchorsim/channel/content_store.hpp"
#include "anchorsim/channel/hash_lock.hpp"
#include "anchorsim/common/rng.hpp"
#include "anchorsim/ledger/crypto.hpp"

#include <array>
#include <optional>
#include <vector>

namespace anchorsim::channel {

/// One entry of the signed state log.
struct ChannelState
{
  Digest              channel_id;
  std::uint64_t       round{0};
  Tokens              balance{0};    ///< tokens still owed to the client
  std::vector<Digest> ownership;     ///< content keys owned by the client, ascending
  ledger::Signature   client_sig;
  ledger::Signature   masp_sig;

  /// Bytes both parties sign: (channel id, round, balance, ownership).
  Bytes signing_bytes() const;
  bool  owns(Digest const &key) const;

  bool operator==(ChannelState const &) const = default;
};

enum class Step : std::uint8_t
{
  SendLockDigest,  ///< client draws R and sends H(R)
  LockContent,     ///< MASP locks H(P) under H(R)
  LockFee,         ///< client locks f_i under H(R)
  UnlockContent,   ///< client reveals R, unlocks H(P), signs the new balance
  UnlockFee,       ///< MASP unlocks f_i with R
  SignOwnership,   ///< MASP signs the new ownership; state committed
};

inline constexpr std::size_t kSteps = 6;

char const *to_string(Step step);

/// Injected misbehaviour for one step of one round.
struct StepFault
{
  double delay{0.0};            ///< extra seconds before the step completes
  bool   halt{false};           ///< acting party never completes the step
  bool   wrong_preimage{false}; ///< unlock attempted with R' != R
};

using RoundFaults = std::array<StepFault, kSteps>;

struct ChannelConfig
{
  double                         step_timeout{10.0};
  bool                           timers{true};
  /// Nominal duration of each step without injected delay.
  std::array<double, kSteps>     step_durations{0.6, 0.6, 0.5, 0.6, 0.6, 0.5};

  double nominal_round_latency() const;
  void   validate() const;
};

struct StepTiming
{
  bool   done{false};
  bool   timed_out{false};
  double elapsed{0.0};
};

/// Runs one step under its timer. Without timers a halted step never completes.
StepTiming execute_with_timer(double duration, StepFault const &fault, ChannelConfig const &config);

enum class RoundOutcome
{
  Committed,
  RolledBack,  ///< timer fired or an unlock was refused; previous state kept
  Stalled,     ///< halted with timers off; locks rolled back when the channel closes
  Rejected,    ///< refused before any lock (insufficient balance, unknown content, channel not open)
};

struct RoundResult
{
  RoundOutcome        outcome{RoundOutcome::Rejected};
  std::optional<Step> failed_step;
  double              started{0.0};
  double              finished{0.0};
  Tokens              fee{0};
  Digest              content;

  double latency() const { return finished - started; }
};

enum class ChannelStatus
{
  Pending,  ///< establish transaction not yet anchored
  Open,
  Closing,
  Closed,
  Frozen,   ///< settlement rejected; funds held pending dispute
};

/// Off-chain side of a duplex client-MASP channel. Both parties are simulated,
/// so the channel holds both identities.
class Channel
{
public:
  Channel(Digest id, ledger::Identity client, ledger::Identity masp, Tokens deposit, ChannelConfig config,
          ledger::SignatureScheme const &scheme, std::uint64_t seed);

  /// Six-step hash-lock exchange of `fee` for the content keyed `content`.
  RoundResult transfer_round(Tokens fee, Digest const &content, ContentStore const &store, double now,
                             RoundFaults const &faults = {});

  Digest const                    &id() const { return id_; }
  Address const                   &client() const { return client_.address(); }
  ledger::Identity const          &client_identity() const { return client_; }
  Address const                   &masp() const { return masp_.address(); }
  Tokens                           deposit() const { return deposit_; }
  ChannelState const              &current() const { return log_.back(); }
  std::vector<ChannelState> const &log() const { return log_; }
  ChannelStatus                    status() const { return status_; }
  ChannelConfig const             &config() const { return config_; }
  std::vector<HashLock> const     &locks() const { return locks_; }
  bool                             stalled() const { return stalled_; }

  void set_status(ChannelStatus s) { status_ = s; }
  /// Releases the locks of a stalled round in reverse lock order.
  void release_stalled();

private:
  void sign_both(ChannelState &s) const;
  void roll_back_locks();

  Digest                          id_;
  ledger::Identity                client_;
  ledger::Identity                masp_;
  Tokens                          deposit_;
  ChannelConfig                   config_;
  ledger::SignatureScheme const  &scheme_;
  Rng                             rng_;
  std::vector<ChannelState>       log_;
  std::vector<HashLock>           locks_;  ///< locks of the round in flight
  ChannelStatus                   status_{ChannelStatus::Pending};
  bool                            stalled_{false};
};

/// Checks a submitted state log: genesis form, consecutive rounds, monotone
/// balance and ownership, and both signatures on every state.
bool verify_state_log(std::span<ChannelState const> log, Digest const &channel_id, Tokens deposit,
                      Address const &client, Address const &masp, ledger::SignatureScheme const &scheme);

}  // namespace anchorsim::channel
