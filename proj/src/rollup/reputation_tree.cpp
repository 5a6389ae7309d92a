#include "anchorsim/rollup/reputation_tree.hpp"

#include "anchorsim/common/error.hpp"
#include "anchorsim/ledger/crypto.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace anchorsim::rollup {

FixedValue to_fixed(double value)
{
  if (!std::isfinite(value))
  {
    throw InvalidArgument("reputation value must be finite");
  }
  double const scaled = value * kFixedScale;
  if (std::abs(scaled) >= static_cast<double>(std::numeric_limits<FixedValue>::max()))
  {
    throw InvalidArgument("reputation value out of fixed-point range");
  }
  // default rounding mode is round-to-nearest-even
  return static_cast<FixedValue>(std::nearbyint(scaled));
}

double from_fixed(FixedValue value) { return static_cast<double>(value) / kFixedScale; }

Digest leaf_digest(Leaf const &leaf)
{
  Writer w;
  w.u8(0x00);
  w.raw(leaf.masp.view());
  w.i64(leaf.value);
  return ledger::hash(w.bytes());
}

Digest interior_digest(Digest const &left, Digest const &right)
{
  Writer w;
  w.u8(0x01);
  w.raw(left.view());
  w.raw(right.view());
  return ledger::hash(w.bytes());
}

Digest empty_leaf_digest()
{
  static Digest const d = ledger::hash(std::string_view("anchorsim/empty-leaf"));
  return d;
}

Digest compute_root(std::vector<Leaf> const &leaves)
{
  if (leaves.empty())
  {
    return empty_leaf_digest();
  }
  std::size_t const width = std::bit_ceil(leaves.size());
  std::vector<Digest> level(width, empty_leaf_digest());
  for (std::size_t i = 0; i < leaves.size(); ++i)
  {
    level[i] = leaf_digest(leaves[i]);
  }
  while (level.size() > 1)
  {
    std::vector<Digest> up(level.size() / 2);
    for (std::size_t i = 0; i < up.size(); ++i)
    {
      up[i] = interior_digest(level[2 * i], level[2 * i + 1]);
    }
    level = std::move(up);
  }
  return level.front();
}

ReputationTree::ReputationTree()
  : root_(compute_root({}))
{
}

ReputationTree::ReputationTree(std::vector<Leaf> leaves)
  : leaves_(std::move(leaves))
{
  std::sort(leaves_.begin(), leaves_.end(), [](Leaf const &a, Leaf const &b) { return a.masp < b.masp; });
  auto dup = std::adjacent_find(leaves_.begin(), leaves_.end(),
                                [](Leaf const &a, Leaf const &b) { return a.masp == b.masp; });
  if (dup != leaves_.end())
  {
    throw InvalidArgument("duplicate MASP leaf " + dup->masp.hex());
  }
  root_ = compute_root(leaves_);
}

ReputationTree ReputationTree::genesis(std::vector<Address> masps, double initial)
{
  std::vector<Leaf> leaves;
  leaves.reserve(masps.size());
  FixedValue const v = to_fixed(initial);
  for (auto const &m : masps)
  {
    leaves.push_back(Leaf{m, v});
  }
  return ReputationTree(std::move(leaves));
}

std::optional<std::size_t> ReputationTree::index_of(Address const &masp) const
{
  auto it = std::lower_bound(leaves_.begin(), leaves_.end(), masp,
                             [](Leaf const &l, Address const &a) { return l.masp < a; });
  if (it == leaves_.end() || it->masp != masp)
  {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - leaves_.begin());
}

std::optional<double> ReputationTree::value(Address const &masp) const
{
  auto i = index_of(masp);
  if (!i)
  {
    return std::nullopt;
  }
  return from_fixed(leaves_[*i].value);
}

ReputationTree ReputationTree::with_values(std::map<Address, FixedValue> const &updates) const
{
  auto leaves = leaves_;
  for (auto const &[masp, v] : updates)
  {
    auto i = index_of(masp);
    if (!i)
    {
      throw LookupError("unknown MASP " + masp.hex());
    }
    leaves[*i].value = v;
  }
  ReputationTree out;
  out.leaves_ = std::move(leaves);
  out.root_   = compute_root(out.leaves_);
  return out;
}

}  // namespace anchorsim::rollup
