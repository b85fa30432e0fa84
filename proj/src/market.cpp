#include "p2psim/market.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "p2psim/error.hpp"

namespace p2psim::market {

namespace {

// Tolerance on the tariff band check; advisor prices are computed in
// floating point and may land an ulp outside.
constexpr double kPriceSlack = 1e-12;

bool bid_before(const Order& a, const Order& b) {
  if (a.price != b.price) return a.price > b.price;
  return a.seq < b.seq;
}

bool ask_before(const Order& a, const Order& b) {
  if (a.price != b.price) return a.price < b.price;
  return a.seq < b.seq;
}

} // namespace

void OrderBook::add(const Order& order) {
  if (!(order.quantity > 0.0) || !std::isfinite(order.quantity))
    throw ValidationError("order from agent " + std::to_string(order.agent_id) + ": quantity must be > 0");
  if (!std::isfinite(order.price) || order.price < slot_.lambda_sell - kPriceSlack ||
      order.price > slot_.lambda_buy + kPriceSlack)
    throw ValidationError("order from agent " + std::to_string(order.agent_id) + ": price " +
                          std::to_string(order.price) + " outside [FiT, ToU] band");
  auto& book = order.side == Side::Bid ? bids_ : asks_;
  const auto pos = std::upper_bound(book.begin(), book.end(), order, order.side == Side::Bid ? bid_before : ask_before);
  book.insert(pos, order);
}

void OrderBook::add(std::span<const Order> orders) {
  for (const auto& o : orders) add(o);
}

double Settlement::traded_kwh() const {
  double total = 0.0;
  for (const auto& t : trades) total += t.quantity;
  return total;
}

Settlement clear(const OrderBook& book, int hour, const ClearingOptions& options) {
  std::vector<Order> bids = book.bids();
  std::vector<Order> asks = book.asks();
  Settlement s;

  std::size_t i = 0;
  std::size_t j = 0;
  while (i < bids.size() && j < asks.size()) {
    Order& bid = bids[i];
    Order& ask = asks[j];
    if (!options.strict_paper_mode && bid.price < ask.price) break;
    const double q = std::min(bid.quantity, ask.quantity);
    s.trades.push_back(TradeRecord{bid.agent_id, ask.agent_id, 0.5 * (bid.price + ask.price), q, hour});
    bid.quantity -= q;
    ask.quantity -= q;
    if (bid.quantity == 0.0) ++i;
    if (ask.quantity == 0.0) ++j;
  }

  for (const auto& b : book.bids()) s.grid_buys.try_emplace(b.agent_id, 0.0);
  for (const auto& a : book.asks()) s.grid_sells.try_emplace(a.agent_id, 0.0);
  for (const auto& b : bids) s.grid_buys[b.agent_id] += b.quantity;
  for (const auto& a : asks) s.grid_sells[a.agent_id] += a.quantity;
  return s;
}

std::vector<Order> default_orders(std::span<const Position> positions, const pricing::PriceQuote& quote) {
  std::vector<Order> orders;
  std::uint64_t seq = 0;
  for (const auto& p : positions) {
    if (p.buy_kwh > 0.0) orders.push_back(Order{p.agent_id, Side::Bid, quote.ibp, p.buy_kwh, seq++});
    if (p.sell_kwh > 0.0) orders.push_back(Order{p.agent_id, Side::Ask, quote.isp, p.sell_kwh, seq++});
  }
  return orders;
}

std::vector<Order> grid_priced_orders(std::span<const Position> positions, const pricing::TariffSlot& slot) {
  std::vector<Order> orders;
  std::uint64_t seq = 0;
  for (const auto& p : positions) {
    if (p.buy_kwh > 0.0) orders.push_back(Order{p.agent_id, Side::Bid, slot.lambda_buy, p.buy_kwh, seq++});
    if (p.sell_kwh > 0.0) orders.push_back(Order{p.agent_id, Side::Ask, slot.lambda_sell, p.sell_kwh, seq++});
  }
  return orders;
}

} // namespace p2psim::market
