#pragma once

#include <optional>

#include "emopanel/dates.hpp"

namespace emopanel {

enum class SessionWindow { PreMarket, Market };

// Session boundaries as Eastern-time minutes of day. Defaults: the pre-market
// window runs from the previous trading day's close (16:00, exclusive)
// through 09:29 inclusive; the market window is [09:30, 16:00].
struct SessionConfig {
  int premarket_end_minute = 9 * 60 + 29;
  int market_open_minute = 9 * 60 + 30;
  int market_close_minute = 16 * 60;
};

struct SessionAssignment {
  Date trading_date;
  SessionWindow window = SessionWindow::PreMarket;
};

// Maps an instant to its (trading date, session). Comparison is at minute
// granularity in Eastern time. Rolls across weekends and holidays: anything
// after one trading day's close and at or before the next one's pre-market
// cutoff belongs to the next day's pre-market. Out of scope (nullopt) when
// the Eastern date precedes the first calendar date or falls after the last
// trading day's close.
std::optional<SessionAssignment> assign_session(Instant instant, const TradingCalendar& calendar,
                                                const SessionConfig& cfg = {});

}  // namespace emopanel
