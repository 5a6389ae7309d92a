#pragma once

#include "anchorsim/ledger/digest.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace anchorsim::rollup {

using ledger::Address;
using ledger::Digest;

/// Reputation scaled by 10^12 and rounded half-to-even.
using FixedValue = std::int64_t;

inline constexpr double kFixedScale = 1.0e12;

FixedValue to_fixed(double value);
double     from_fixed(FixedValue value);

struct Leaf
{
  Address    masp;
  FixedValue value{0};

  bool operator==(Leaf const &) const = default;
};

Digest leaf_digest(Leaf const &leaf);
Digest interior_digest(Digest const &left, Digest const &right);
Digest empty_leaf_digest();

/// Immutable binary hash tree over (MASP, reputation) leaves.
///
/// Leaves are kept in ascending address order and the tree is padded to the
/// next power of two with empty-leaf digests.
class ReputationTree
{
public:
  ReputationTree();
  explicit ReputationTree(std::vector<Leaf> leaves);

  /// One leaf per MASP, every value set to `initial`.
  static ReputationTree genesis(std::vector<Address> masps, double initial);

  /// Copy with the given leaves replaced. Throws LookupError for an unknown MASP.
  ReputationTree with_values(std::map<Address, FixedValue> const &updates) const;

  Digest const            &root() const { return root_; }
  std::vector<Leaf> const &leaves() const { return leaves_; }
  std::size_t              size() const { return leaves_.size(); }
  std::optional<std::size_t> index_of(Address const &masp) const;
  std::optional<double>      value(Address const &masp) const;

  bool operator==(ReputationTree const &other) const { return root_ == other.root_ && leaves_ == other.leaves_; }

private:
  std::vector<Leaf> leaves_;
  Digest            root_;
};

/// Root recomputed bottom-up from scratch; independent of ReputationTree's cache.
Digest compute_root(std::vector<Leaf> const &leaves);

}  // namespace anchorsim::rollup
