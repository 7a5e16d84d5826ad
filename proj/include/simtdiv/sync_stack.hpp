#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "simtdiv/isa.hpp"

namespace simtdiv {

using LaneMask = std::uint32_t;

inline constexpr unsigned kWarpSize = 32;
inline constexpr LaneMask kFullMask = 0xFFFFFFFFu;

enum class TokenId : std::uint8_t { kSync, kDiv };

std::string_view token_id_name(TokenId id);

/// Synchronization-stack entry. Conceptually 64 bits: a 32-bit mask plus
/// the id and the resume pc.
struct Token {
  LaneMask mask = 0;
  TokenId id = TokenId::kSync;
  Address pc = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

enum class CostEvent : std::uint8_t {
  kSyncPush,
  kDivPush,
  kSyncPop,
  kDivPop,
  kSpillStore,
  kSpillLoad,
};

std::string_view cost_event_name(CostEvent event);

/// Events emitted by a single stack operation or instruction step. A step
/// performs at most one push or one pop, plus at most one spill transfer.
class StepEvents {
 public:
  void add(CostEvent e) { items_[size_++] = e; }
  std::span<const CostEvent> view() const { return {items_.data(), size_}; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.begin() + size_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool contains(CostEvent e) const;
  void append(const StepEvents& other);

 private:
  std::array<CostEvent, 4> items_{};
  std::size_t size_ = 0;
};

inline constexpr std::size_t kUnboundedCapacity =
    std::numeric_limits<std::size_t>::max();

/// Logical LIFO of tokens split into an on-chip segment of bounded
/// capacity and a spilled segment in backing memory.
///
/// Pushing onto a full on-chip segment first evicts its `spill_chunk`
/// oldest entries (one kSpillStore). Popping with an empty on-chip segment
/// first reloads the most recently spilled chunk (one kSpillLoad).
class SyncStack {
 public:
  explicit SyncStack(std::size_t phys_capacity = 16, std::size_t spill_chunk = 4);

  StepEvents push(const Token& token);
  /// Throws ModelError when empty.
  std::pair<Token, StepEvents> pop();

  std::size_t depth() const { return on_chip_.size() + spilled_.size(); }
  bool empty() const { return depth() == 0; }
  std::size_t on_chip() const { return on_chip_.size(); }
  std::size_t spilled() const { return spilled_.size(); }
  std::size_t phys_capacity() const { return capacity_; }
  std::size_t spill_chunk() const { return chunk_; }
  std::optional<Token> top() const;

 private:
  std::size_t capacity_;
  std::size_t chunk_;
  std::vector<Token> on_chip_;  // bottom .. top
  std::vector<Token> spilled_;  // bottom .. top, whole chunks
};

}  // namespace simtdiv
