#include <gtest/gtest.h>

#include <random>

#include "auction_oracle.hpp"
#include "p2psim/error.hpp"
#include "p2psim/market.hpp"

using namespace p2psim;
using namespace p2psim::market;

namespace {

pricing::TariffSlot wide_slot() {
  pricing::TariffSlot s;
  s.period = pricing::Period::Peak;
  s.lambda_buy = 0.66;
  s.lambda_sell = 0.135;
  return s;
}

Order bid(AgentId id, double price, double q, std::uint64_t seq) { return Order{id, Side::Bid, price, q, seq}; }
Order ask(AgentId id, double price, double q, std::uint64_t seq) { return Order{id, Side::Ask, price, q, seq}; }

Settlement run(std::vector<Order> orders, bool strict = false) {
  OrderBook book(wide_slot());
  book.add(orders);
  return clear(book, 5, ClearingOptions{strict});
}

} // namespace

TEST(Clear, PartialFillLeavesResidualForTheGrid) {
  const auto s = run({bid(1, 0.50, 10, 0), ask(2, 0.30, 6, 1)});
  ASSERT_EQ(s.trades.size(), 1u);
  EXPECT_DOUBLE_EQ(s.trades[0].quantity, 6.0);
  EXPECT_DOUBLE_EQ(s.trades[0].price, 0.40);
  EXPECT_EQ(s.trades[0].hour, 5);
  EXPECT_DOUBLE_EQ(s.grid_buys.at(1), 4.0);
  EXPECT_DOUBLE_EQ(s.grid_sells.at(2), 0.0);
}

TEST(Clear, EmptyAskBook) {
  const auto s = run({bid(1, 0.50, 10, 0)});
  EXPECT_TRUE(s.trades.empty());
  EXPECT_DOUBLE_EQ(s.grid_buys.at(1), 10.0);
}

TEST(Clear, StopsWhenBooksNoLongerCross) {
  const auto s = run({bid(1, 0.60, 5, 0), bid(2, 0.40, 5, 1), ask(3, 0.20, 4, 2), ask(4, 0.50, 8, 3)});
  ASSERT_EQ(s.trades.size(), 2u);
  EXPECT_DOUBLE_EQ(s.trades[0].quantity, 4.0);
  EXPECT_DOUBLE_EQ(s.trades[0].price, 0.40);
  EXPECT_DOUBLE_EQ(s.trades[1].quantity, 1.0);
  EXPECT_DOUBLE_EQ(s.trades[1].price, 0.55);
  EXPECT_DOUBLE_EQ(s.grid_buys.at(2), 5.0);
  EXPECT_DOUBLE_EQ(s.grid_sells.at(4), 7.0);
}

TEST(Clear, StrictModeMatchesPastTheCross) {
  const auto s = run({bid(1, 0.60, 5, 0), bid(2, 0.40, 5, 1), ask(3, 0.20, 4, 2), ask(4, 0.50, 8, 3)}, true);
  ASSERT_EQ(s.trades.size(), 3u);
  EXPECT_DOUBLE_EQ(s.trades[2].quantity, 5.0);
  EXPECT_DOUBLE_EQ(s.trades[2].price, 0.45);
}

TEST(OrderBook, SortsByPriceThenSeqAndChecksBounds) {
  OrderBook book(wide_slot());
  book.add(bid(1, 0.4, 1, 0));
  book.add(bid(2, 0.5, 1, 1));
  book.add(bid(3, 0.4, 1, 2));
  EXPECT_EQ(book.bids()[0].agent_id, 2);
  EXPECT_EQ(book.bids()[1].agent_id, 1);
  EXPECT_EQ(book.bids()[2].agent_id, 3);
  EXPECT_THROW(book.add(bid(4, 0.7, 1, 3)), ValidationError);
  EXPECT_THROW(book.add(ask(4, 0.1, 1, 3)), ValidationError);
  EXPECT_THROW(book.add(ask(4, 0.3, 0, 3)), ValidationError);
}

TEST(Orders, DefaultOrdersUseAdvisorPrices) {
  pricing::PriceQuote quote{0.22, 0.44, pricing::Sdr::idle(), true};
  const std::vector<Position> pos{{1, 3.0, 0.0}, {2, 0.0, 0.0}, {3, 0.0, 2.5}};
  const auto orders = default_orders(pos, quote);
  ASSERT_EQ(orders.size(), 2u);
  EXPECT_EQ(orders[0], (Order{1, Side::Bid, 0.44, 3.0, 0}));
  EXPECT_EQ(orders[1], (Order{3, Side::Ask, 0.22, 2.5, 1}));

  const auto surplus = pricing::advise(10.0, 2.0, wide_slot());
  EXPECT_DOUBLE_EQ(default_orders(std::vector<Position>{{3, 0.0, 2.5}}, surplus)[0].price, 0.135);
  EXPECT_DOUBLE_EQ(grid_priced_orders(pos, wide_slot())[0].price, 0.66);
}

TEST(Clear, PropertiesAndOracleOnRandomBooks) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> count(0, 4);
  std::uniform_int_distribution<int> qty(1, 5);
  std::uniform_real_distribution<double> price(0.135, 0.66);
  const auto slot = wide_slot();
  for (int n = 0; n < 20000; ++n) {
    std::vector<Order> orders;
    std::uint64_t seq = 0;
    const int nb = count(rng), na = count(rng);
    for (int i = 0; i < nb; ++i) orders.push_back(bid(i + 1, price(rng), qty(rng), seq++));
    for (int j = 0; j < na; ++j) orders.push_back(ask(100 + j, (n % 3 == 0) ? 0.4 : price(rng), qty(rng), seq++));
    std::shuffle(orders.begin(), orders.end(), rng);
    const bool strict = n % 5 == 0;
    const auto s = run(orders, strict);
    ASSERT_EQ(s, p2psim::testing::oracle_clear(orders, 5, !strict)) << "book " << n;
    ASSERT_EQ(s, run(orders, strict));

    double spend = 0.0, revenue = 0.0, traded = 0.0;
    std::map<AgentId, double> got;
    for (const auto& t : s.trades) {
      ASSERT_GT(t.quantity, 0.0);
      ASSERT_GE(t.price, slot.lambda_sell);
      ASSERT_LE(t.price, slot.lambda_buy);
      spend += t.price * t.quantity;
      revenue += t.price * t.quantity;
      traded += t.quantity;
      got[t.buyer_id] += t.quantity;
      got[t.seller_id] += t.quantity;
      if (!strict) {
        double bp = 0, ap = 0;
        for (const auto& o : orders) {
          if (o.agent_id == t.buyer_id) bp = o.price;
          if (o.agent_id == t.seller_id) ap = o.price;
        }
        ASSERT_LE(ap, t.price + 1e-15);
        ASSERT_GE(bp, t.price - 1e-15);
      }
    }
    EXPECT_NEAR(spend, revenue, 1e-9);
    double sb = 0.0, sa = 0.0;
    for (const auto& o : orders) {
      (o.side == Side::Bid ? sb : sa) += o.quantity;
      const double grid = o.side == Side::Bid ? s.grid_buys.at(o.agent_id) : s.grid_sells.at(o.agent_id);
      ASSERT_EQ(got[o.agent_id] + grid, o.quantity);
      // Dominance against settling the whole order with the grid.
      double p2p_value = 0.0;
      for (const auto& t : s.trades)
        if (t.buyer_id == o.agent_id || t.seller_id == o.agent_id) p2p_value += t.price * t.quantity;
      if (o.side == Side::Bid)
        ASSERT_LE(p2p_value + grid * slot.lambda_buy, o.quantity * slot.lambda_buy + 1e-12);
      else
        ASSERT_GE(p2p_value + grid * slot.lambda_sell, o.quantity * slot.lambda_sell - 1e-12);
    }
    ASSERT_LE(traded, std::min(sb, sa) + 1e-12);
  }
}
