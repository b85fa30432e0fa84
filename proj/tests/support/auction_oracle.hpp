#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "p2psim/market.hpp"

namespace p2psim::testing {

// Reference clearing built on cumulative supply/demand intervals: bid i covers
// [B(i-1), B(i)) of the stacked demand, ask j covers [A(j-1), A(j)) of the
// stacked supply, and every overlapping pair trades its overlap until the
// first point where the bid price falls below the ask price.
inline market::Settlement oracle_clear(std::vector<market::Order> orders, int hour, bool crossing_check = true) {
  using market::Side;
  std::sort(orders.begin(), orders.end(), [](const auto& a, const auto& b) { return a.seq < b.seq; });
  std::vector<market::Order> bids, asks;
  for (const auto& o : orders) (o.side == Side::Bid ? bids : asks).push_back(o);
  std::stable_sort(bids.begin(), bids.end(), [](const auto& a, const auto& b) { return a.price > b.price; });
  std::stable_sort(asks.begin(), asks.end(), [](const auto& a, const auto& b) { return a.price < b.price; });

  auto bounds = [](const std::vector<market::Order>& side) {
    std::vector<double> edge{0.0};
    for (const auto& o : side) edge.push_back(edge.back() + o.quantity);
    return edge;
  };
  const auto bedge = bounds(bids);
  const auto aedge = bounds(asks);

  // Stop line: the start of the first overlapping pair that does not cross.
  double stop = std::min(bedge.back(), aedge.back());
  if (crossing_check) {
    for (std::size_t i = 0; i < bids.size(); ++i)
      for (std::size_t j = 0; j < asks.size(); ++j) {
        const double lo = std::max(bedge[i], aedge[j]);
        const double hi = std::min(bedge[i + 1], aedge[j + 1]);
        if (hi > lo && bids[i].price < asks[j].price) stop = std::min(stop, lo);
      }
  }

  market::Settlement s;
  std::map<market::AgentId, double> bought, sold;
  struct Piece {
    double lo;
    market::TradeRecord trade;
  };
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < bids.size(); ++i)
    for (std::size_t j = 0; j < asks.size(); ++j) {
      const double lo = std::max(bedge[i], aedge[j]);
      const double hi = std::min({bedge[i + 1], aedge[j + 1], stop});
      if (hi <= lo) continue;
      pieces.push_back({lo, {bids[i].agent_id, asks[j].agent_id, (bids[i].price + asks[j].price) / 2, hi - lo, hour}});
      bought[bids[i].agent_id] += hi - lo;
      sold[asks[j].agent_id] += hi - lo;
    }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
  for (const auto& p : pieces) s.trades.push_back(p.trade);

  for (const auto& b : bids) s.grid_buys[b.agent_id] += b.quantity;
  for (const auto& a : asks) s.grid_sells[a.agent_id] += a.quantity;
  for (auto& [id, q] : s.grid_buys) q -= bought[id];
  for (auto& [id, q] : s.grid_sells) q -= sold[id];
  return s;
}

} // namespace p2psim::testing
