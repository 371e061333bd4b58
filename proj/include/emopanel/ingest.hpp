#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "emopanel/sessions.hpp"
#include "emopanel/types.hpp"

namespace emopanel {

struct ParseResult {
  std::vector<RawMessage> messages;
  std::int64_t parse_errors = 0;
};

// Reads line-delimited message records. Malformed lines (bad JSON, negative
// follower count, unparsable timestamp, emotion tuple with components outside
// [0,1] or sum outside [0.995, 1.005]) are counted and skipped, never fatal.
// Accepted emotion tuples are renormalized to sum exactly 1, absorbing the
// 0.1%-rounding slack of upstream model exports.
ParseResult parse_message_stream(std::istream& source);
ParseResult parse_message_file(const std::string& path);

// One line, matching the input format byte-for-byte on round-trips.
std::string serialize_message(const RawMessage& msg);

// Deterministic canonical text: NFC-normalized, lowercased, URL and cashtag
// tokens removed, then everything but alphanumerics and spaces dropped and
// whitespace collapsed.
std::string clean_text(std::string_view body);

// Case-insensitive scan for inlined hyperlinks (http://, https://, www.).
bool body_contains_url(std::string_view body);

// Ids of messages whose (user_id, cleaned text) pair occurs more than
// max_duplicates times across the whole input; all occurrences are flagged.
std::unordered_set<std::string> detect_automated(std::span<const RawMessage> messages,
                                                 int max_duplicates = 100);

struct SecurityRecord {
  std::string ticker;
  std::string secstat;  // "I" marks inactive
  std::string tpci;     // "0" marks common ordinary shares
  int exchg = 0;
  int sic = 0;
};

class SecurityMaster {
public:
  static SecurityMaster load_csv(std::istream& in);
  static SecurityMaster load_csv_file(const std::string& path);

  void add(SecurityRecord rec);
  const SecurityRecord* find(const std::string& ticker) const;
  // Active, common ordinary shares on a US exchange (11, 12, 14, 17).
  bool eligible(const std::string& ticker) const;
  std::size_t size() const { return records_.size(); }

private:
  std::unordered_map<std::string, SecurityRecord> records_;
};

// Lowercase keyword list, one term per line, '#' comments allowed. Multi-word
// phrases match as space-delimited substrings of the cleaned text.
class FinanceLexicon {
public:
  static FinanceLexicon load(std::istream& in);
  static FinanceLexicon load_file(const std::string& path);

  void add_term(std::string term);
  bool matches(const std::string& cleaned_text) const;
  std::size_t size() const { return single_.size() + phrases_.size(); }

private:
  std::unordered_set<std::string> single_;
  std::vector<std::string> phrases_;
};

struct RestrictionConfig {
  int max_duplicates = 100;
  int min_session_messages = 10;
  SessionConfig session;
};

struct RestrictionResult {
  std::vector<RawMessage> kept;
  FilterReport report;
};

// Applies the sample-restriction funnel in order: single ticker, not
// automated, security-master eligibility, minimum messages per firm-session.
// Messages that cannot be assigned to any trading session are dropped at the
// session-threshold stage.
RestrictionResult apply_restrictions(std::vector<RawMessage> messages,
                                     const SecurityMaster& master, const TradingCalendar& calendar,
                                     const RestrictionConfig& cfg = {});

// info_class is original iff the message is not a retweet, lists no urls, and
// carries no inlined hyperlink; chat_class is finance iff the cleaned text
// matches the lexicon.
ContentLabel classify_content(const RawMessage& msg, const FinanceLexicon& lexicon);

UserBuckets bucket_user(const RawMessage& msg);

}  // namespace emopanel
