#include "emopanel/sessions.hpp"

namespace emopanel {

std::optional<SessionAssignment> assign_session(Instant instant, const TradingCalendar& calendar,
                                                const SessionConfig& cfg) {
  if (calendar.empty()) return std::nullopt;
  const EasternTime et = to_eastern(instant);
  if (et.date < calendar.first()) return std::nullopt;

  if (calendar.is_trading_day(et.date)) {
    // Anything before the open is pre-market; with the default config this is
    // exactly the (prev close 16:00, 09:29] window at minute granularity.
    if (et.minute_of_day < cfg.market_open_minute)
      return SessionAssignment{et.date, SessionWindow::PreMarket};
    if (et.minute_of_day <= cfg.market_close_minute)
      return SessionAssignment{et.date, SessionWindow::Market};
    // After the close: next trading day's pre-market.
    const auto next = calendar.next_after(et.date);
    if (!next) return std::nullopt;
    return SessionAssignment{*next, SessionWindow::PreMarket};
  }

  // Non-trading day: everything rolls into the next trading day's pre-market.
  const auto next = calendar.next_after(et.date);
  if (!next) return std::nullopt;
  return SessionAssignment{*next, SessionWindow::PreMarket};
}

}  // namespace emopanel
