#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "p2psim/pricing.hpp"
#include "p2psim/profiles.hpp"

namespace p2psim::market {

using profiles::AgentId;

enum class Side { Bid, Ask };

struct Order {
  AgentId agent_id = 0;
  Side side = Side::Bid;
  double price = 0.0;
  double quantity = 0.0;
  // Submission index; breaks price ties first-come first-served.
  std::uint64_t seq = 0;

  bool operator==(const Order&) const = default;
};

// Price-time priority books for one auction period. Orders are checked
// against the period's tariff band on entry.
class OrderBook {
public:
  explicit OrderBook(const pricing::TariffSlot& slot) : slot_(slot) {}

  void add(const Order& order);
  void add(std::span<const Order> orders);

  // Best first: bids by price descending, asks ascending; seq ascending within a price.
  const std::vector<Order>& bids() const { return bids_; }
  const std::vector<Order>& asks() const { return asks_; }
  const pricing::TariffSlot& slot() const { return slot_; }

private:
  pricing::TariffSlot slot_;
  std::vector<Order> bids_;
  std::vector<Order> asks_;
};

struct TradeRecord {
  AgentId buyer_id = 0;
  AgentId seller_id = 0;
  double price = 0.0;
  double quantity = 0.0;
  int hour = 0;

  bool operator==(const TradeRecord&) const = default;
};

struct Settlement {
  std::vector<TradeRecord> trades;
  // Unmatched remainder per submitting agent, settled with the grid.
  std::map<AgentId, double> grid_buys;
  std::map<AgentId, double> grid_sells;

  double traded_kwh() const;
  bool operator==(const Settlement&) const = default;
};

struct ClearingOptions {
  // Match the book strictly in sequence even when the best bid is below the
  // best ask (no crossing check).
  bool strict_paper_mode = false;
};

// Sequential double auction: best bid meets best ask, trade the smaller
// quantity at the midpoint price, advance whichever side is exhausted.
Settlement clear(const OrderBook& book, int hour, const ClearingOptions& options = {});

// What each agent wants to move this hour, before clearing.
struct Position {
  AgentId agent_id = 0;
  double buy_kwh = 0.0;
  double sell_kwh = 0.0;
};

// Buyers bid their quantity at IBP, sellers ask at ISP.
std::vector<Order> default_orders(std::span<const Position> positions, const pricing::PriceQuote& quote);

// Same, but priced at the grid tariff (bid at lambda_buy, ask at lambda_sell).
std::vector<Order> grid_priced_orders(std::span<const Position> positions, const pricing::TariffSlot& slot);

} // namespace p2psim::market
