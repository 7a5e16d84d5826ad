#include "simtdiv/sync_stack.hpp"

#include <algorithm>
#include <string>

#include "simtdiv/error.hpp"

namespace simtdiv {

std::string_view token_id_name(TokenId id) {
  return id == TokenId::kSync ? "SYNC" : "DIV";
}

std::string_view cost_event_name(CostEvent event) {
  switch (event) {
    case CostEvent::kSyncPush: return "SYNC_PUSH";
    case CostEvent::kDivPush: return "DIV_PUSH";
    case CostEvent::kSyncPop: return "SYNC_POP";
    case CostEvent::kDivPop: return "DIV_POP";
    case CostEvent::kSpillStore: return "SPILL_STORE";
    case CostEvent::kSpillLoad: return "SPILL_LOAD";
  }
  return "?";
}

bool StepEvents::contains(CostEvent e) const {
  return std::find(begin(), end(), e) != end();
}

void StepEvents::append(const StepEvents& other) {
  for (CostEvent e : other) add(e);
}

SyncStack::SyncStack(std::size_t phys_capacity, std::size_t spill_chunk)
    : capacity_(phys_capacity), chunk_(spill_chunk) {
  if (chunk_ == 0 || chunk_ > capacity_) {
    throw ConfigError("spill chunk must be in 1..phys_capacity (got chunk " +
                      std::to_string(chunk_) + ", capacity " +
                      std::to_string(capacity_) + ")");
  }
}

StepEvents SyncStack::push(const Token& token) {
  StepEvents events;
  if (on_chip_.size() == capacity_) {
    spilled_.insert(spilled_.end(), on_chip_.begin(), on_chip_.begin() + chunk_);
    on_chip_.erase(on_chip_.begin(), on_chip_.begin() + chunk_);
    events.add(CostEvent::kSpillStore);
  }
  on_chip_.push_back(token);
  events.add(token.id == TokenId::kSync ? CostEvent::kSyncPush
                                        : CostEvent::kDivPush);
  return events;
}

std::pair<Token, StepEvents> SyncStack::pop() {
  if (empty()) throw ModelError("pop on empty synchronization stack");
  StepEvents events;
  if (on_chip_.empty()) {
    auto first = spilled_.end() - static_cast<std::ptrdiff_t>(chunk_);
    on_chip_.assign(first, spilled_.end());
    spilled_.erase(first, spilled_.end());
    events.add(CostEvent::kSpillLoad);
  }
  Token token = on_chip_.back();
  on_chip_.pop_back();
  events.add(token.id == TokenId::kSync ? CostEvent::kSyncPop
                                        : CostEvent::kDivPop);
  return {token, events};
}

std::optional<Token> SyncStack::top() const {
  if (!on_chip_.empty()) return on_chip_.back();
  if (!spilled_.empty()) return spilled_.back();
  return std::nullopt;
}

}  // namespace simtdiv
