#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace aim {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

/// Dense bit set used for both node sets and edge sets.
using Bits = boost::dynamic_bitset<std::uint64_t>;
using NodeSet = Bits;
using EdgeSet = Bits;

inline constexpr std::size_t kNpos = std::numeric_limits<std::size_t>::max();
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

// --- errors -----------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input text; carries the 1-based line number when known.
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t line_no)
      : Error(line_no ? "line " + std::to_string(line_no) + ": " + what : what), line(line_no) {}
  std::size_t line;
};

/// Two realizations assign opposite states to the same edge.
struct ConflictError : Error {
  explicit ConflictError(EdgeId e)
      : Error("conflicting observations on edge " + std::to_string(e)), edge(e) {}
  EdgeId edge;
};

/// An exhaustive enumeration would exceed its configured bound.
struct CapExceeded : Error {
  using Error::Error;
};

// --- horizon ----------------------------------------------------------------

/// Number of diffusion rounds, either a finite count or unbounded.
class Horizon {
 public:
  static constexpr Horizon finite(std::uint32_t rounds) { return Horizon(rounds, false); }
  static constexpr Horizon unbounded() { return Horizon(0, true); }

  constexpr bool is_unbounded() const { return unbounded_; }
  std::uint32_t rounds() const {
    if (unbounded_) throw std::logic_error("unbounded horizon has no finite round count");
    return rounds_;
  }
  /// Longest path length that matters on an n-node graph; unbounded maps to n-1.
  constexpr std::size_t hop_limit(std::size_t node_count) const {
    if (!unbounded_) return rounds_;
    return node_count == 0 ? 0 : node_count - 1;
  }

  /// t - d; unbounded minus anything stays unbounded.
  friend Horizon operator-(Horizon t, Horizon d) {
    if (t.unbounded_) return unbounded();
    if (d.unbounded_ || d.rounds_ > t.rounds_) throw std::invalid_argument("horizon subtraction requires d <= t");
    return finite(t.rounds_ - d.rounds_);
  }
  friend constexpr bool operator==(Horizon, Horizon) = default;

  std::string to_string() const { return unbounded_ ? "inf" : std::to_string(rounds_); }

 private:
  constexpr Horizon(std::uint32_t r, bool u) : rounds_(r), unbounded_(u) {}
  std::uint32_t rounds_;
  bool unbounded_;
};

// --- set helpers ------------------------------------------------------------

inline NodeSet make_node_set(std::size_t n, std::span<const NodeId> ids) {
  NodeSet s(n);
  for (NodeId v : ids) {
    if (v >= n) throw std::out_of_range("node id " + std::to_string(v) + " out of range");
    s.set(v);
  }
  return s;
}

inline NodeSet make_node_set(std::size_t n, std::initializer_list<NodeId> ids) {
  return make_node_set(n, std::span<const NodeId>(ids.begin(), ids.size()));
}

/// Members of a bit set in increasing order.
inline std::vector<std::uint32_t> members(const Bits& s) {
  std::vector<std::uint32_t> out;
  out.reserve(s.count());
  for (auto i = s.find_first(); i != Bits::npos; i = s.find_next(i)) out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

inline std::size_t hash_bits(const Bits& b, std::size_t seed = 0) {
  std::vector<std::uint64_t> blocks;
  blocks.reserve(b.num_blocks());
  boost::to_block_range(b, std::back_inserter(blocks));
  std::size_t h = seed ^ (b.size() * 0x9e3779b97f4a7c15ULL);
  for (auto w : blocks) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

}  // namespace aim
