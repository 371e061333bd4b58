#include "emopanel/ingest.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "json.hpp"

namespace emopanel {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const char* to_string(Experience v) {
  switch (v) {
    case Experience::novice: return "novice";
    case Experience::intermediate: return "intermediate";
    case Experience::professional: return "professional";
    default: return "unknown";
  }
}
const char* to_string(Approach v) {
  switch (v) {
    case Approach::technical: return "technical";
    case Approach::momentum: return "momentum";
    case Approach::fundamental: return "fundamental";
    case Approach::value: return "value";
    case Approach::growth: return "growth";
    case Approach::global_macro: return "global_macro";
    default: return "unknown";
  }
}
const char* to_string(Horizon v) {
  switch (v) {
    case Horizon::day: return "day";
    case Horizon::swing: return "swing";
    case Horizon::position: return "position";
    case Horizon::long_term: return "long_term";
    default: return "unknown";
  }
}
const char* to_string(SentimentTag v) {
  switch (v) {
    case SentimentTag::bullish: return "bullish";
    case SentimentTag::bearish: return "bearish";
    default: return "unclassified";
  }
}

bool from_string(const std::string& s, Experience& out) {
  if (s == "novice") out = Experience::novice;
  else if (s == "intermediate") out = Experience::intermediate;
  else if (s == "professional") out = Experience::professional;
  else if (s == "unknown") out = Experience::unknown;
  else return false;
  return true;
}
bool from_string(const std::string& s, Approach& out) {
  if (s == "technical") out = Approach::technical;
  else if (s == "momentum") out = Approach::momentum;
  else if (s == "fundamental") out = Approach::fundamental;
  else if (s == "value") out = Approach::value;
  else if (s == "growth") out = Approach::growth;
  else if (s == "global_macro") out = Approach::global_macro;
  else if (s == "unknown") out = Approach::unknown;
  else return false;
  return true;
}
bool from_string(const std::string& s, Horizon& out) {
  if (s == "day") out = Horizon::day;
  else if (s == "swing") out = Horizon::swing;
  else if (s == "position") out = Horizon::position;
  else if (s == "long_term") out = Horizon::long_term;
  else if (s == "unknown") out = Horizon::unknown;
  else return false;
  return true;
}
bool from_string(const std::string& s, SentimentTag& out) {
  if (s == "bullish") out = SentimentTag::bullish;
  else if (s == "bearish") out = SentimentTag::bearish;
  else if (s == "unclassified") out = SentimentTag::unclassified;
  else return false;
  return true;
}

// Upstream tuples arrive rounded; accept a 0.5% slack and renormalize.
constexpr double kTupleSumSlack = 5e-3;

bool parse_emotion(const json& arr, EmotionTuple& out) {
  if (!arr.is_array() || arr.size() != EmotionTuple::kSize) return false;
  double sum = 0;
  for (int i = 0; i < EmotionTuple::kSize; ++i) {
    if (!arr[i].is_number()) return false;
    const double v = arr[i].get<double>();
    if (!(v >= 0.0 && v <= 1.0)) return false;
    out[i] = v;
    sum += v;
  }
  if (std::abs(sum - 1.0) > kTupleSumSlack) return false;
  out = out.normalized();
  return true;
}

bool parse_message_line(const std::string& line, RawMessage& msg) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return false;
  try {
    msg.id = j.at("id").get<std::string>();
    msg.user_id = j.at("user_id").get<std::string>();
    const auto ts = parse_iso8601(j.at("timestamp").get<std::string>());
    if (!ts) return false;
    msg.timestamp = ts->instant;
    msg.tz_offset_minutes = ts->offset_minutes;
    msg.body = j.at("body").get<std::string>();
    msg.cashtags.clear();
    if (j.contains("cashtags")) {
      for (const auto& c : j.at("cashtags")) {
        std::string tag = c.get<std::string>();
        if (tag.empty()) return false;
        msg.cashtags.push_back(std::move(tag));
      }
    }
    msg.follower_count = j.at("follower_count").get<std::int64_t>();
    if (msg.follower_count < 0) return false;
    msg.is_retweet = j.value("is_retweet", false);
    msg.urls.clear();
    if (j.contains("urls"))
      for (const auto& u : j.at("urls")) msg.urls.push_back(u.get<std::string>());
    msg.likes = j.value("likes", std::int64_t{0});
    if (msg.likes < 0) return false;
    msg.user_experience = Experience::unknown;
    msg.user_approach = Approach::unknown;
    msg.user_horizon = Horizon::unknown;
    msg.sentiment_tag = SentimentTag::unclassified;
    if (j.contains("user_experience") && !from_string(j.at("user_experience").get<std::string>(), msg.user_experience))
      return false;
    if (j.contains("user_approach") && !from_string(j.at("user_approach").get<std::string>(), msg.user_approach))
      return false;
    if (j.contains("user_horizon") && !from_string(j.at("user_horizon").get<std::string>(), msg.user_horizon))
      return false;
    if (j.contains("sentiment_tag") && !from_string(j.at("sentiment_tag").get<std::string>(), msg.sentiment_tag))
      return false;
    msg.emotion.reset();
    msg.emotion_alt.reset();
    if (j.contains("emotion")) {
      EmotionTuple t;
      if (!parse_emotion(j.at("emotion"), t)) return false;
      msg.emotion = t;
    }
    if (j.contains("emotion_alt")) {
      EmotionTuple t;
      if (!parse_emotion(j.at("emotion_alt"), t)) return false;
      msg.emotion_alt = t;
    }
  } catch (const json::exception&) {
    return false;
  }
  return true;
}

}  // namespace

ParseResult parse_message_stream(std::istream& source) {
  if (!source) throw std::runtime_error("message stream unreadable");
  ParseResult result;
  std::string line;
  while (std::getline(source, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    RawMessage msg;
    if (parse_message_line(line, msg))
      result.messages.push_back(std::move(msg));
    else
      ++result.parse_errors;
  }
  return result;
}

ParseResult parse_message_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open message file: " + path);
  return parse_message_stream(in);
}

std::string serialize_message(const RawMessage& msg) {
  ordered_json j;
  j["id"] = msg.id;
  j["user_id"] = msg.user_id;
  j["timestamp"] = format_iso8601(msg.timestamp, msg.tz_offset_minutes);
  j["body"] = msg.body;
  j["cashtags"] = msg.cashtags;
  j["follower_count"] = msg.follower_count;
  j["is_retweet"] = msg.is_retweet;
  j["urls"] = msg.urls;
  j["likes"] = msg.likes;
  j["user_experience"] = to_string(msg.user_experience);
  j["user_approach"] = to_string(msg.user_approach);
  j["user_horizon"] = to_string(msg.user_horizon);
  if (msg.emotion) {
    ordered_json arr = ordered_json::array();
    for (int i = 0; i < EmotionTuple::kSize; ++i) arr.push_back((*msg.emotion)[i]);
    j["emotion"] = arr;
  }
  if (msg.emotion_alt) {
    ordered_json arr = ordered_json::array();
    for (int i = 0; i < EmotionTuple::kSize; ++i) arr.push_back((*msg.emotion_alt)[i]);
    j["emotion_alt"] = arr;
  }
  j["sentiment_tag"] = to_string(msg.sentiment_tag);
  return j.dump();
}

std::string clean_text(std::string_view body) {
  UErrorCode ec = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(ec);
  icu::UnicodeString us =
      icu::UnicodeString::fromUTF8(icu::StringPiece(body.data(), static_cast<int>(body.size())));
  if (nfc != nullptr && U_SUCCESS(ec)) us = nfc->normalize(us, ec);
  us.toLower(icu::Locale::getRoot());

  // Split into whitespace-delimited tokens, drop URL and cashtag tokens, then
  // keep only alphanumeric code points within the survivors.
  std::string out;
  icu::UnicodeString token;
  auto flush_token = [&]() {
    if (token.isEmpty()) return;
    std::string raw;
    token.toUTF8String(raw);
    token.remove();
    const bool is_url = raw.rfind("http://", 0) == 0 || raw.rfind("https://", 0) == 0 ||
                        raw.rfind("www.", 0) == 0;
    const bool is_cashtag = raw.size() >= 2 && raw[0] == '$' &&
                            ((raw[1] >= 'a' && raw[1] <= 'z') || (raw[1] >= 'A' && raw[1] <= 'Z'));
    if (is_url || is_cashtag) return;
    icu::UnicodeString cleaned;
    icu::UnicodeString traw = icu::UnicodeString::fromUTF8(raw);
    for (int32_t i = 0; i < traw.length();) {
      const UChar32 c = traw.char32At(i);
      i += U16_LENGTH(c);
      if (u_isalnum(c)) cleaned.append(c);
    }
    if (cleaned.isEmpty()) return;
    std::string piece;
    cleaned.toUTF8String(piece);
    if (!out.empty()) out.push_back(' ');
    out += piece;
  };

  for (int32_t i = 0; i < us.length();) {
    const UChar32 c = us.char32At(i);
    i += U16_LENGTH(c);
    if (u_isUWhiteSpace(c))
      flush_token();
    else
      token.append(c);
  }
  flush_token();
  return out;
}

bool body_contains_url(std::string_view body) {
  std::string lower(body);
  for (char& c : lower)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return lower.find("http://") != std::string::npos ||
         lower.find("https://") != std::string::npos || lower.find("www.") != std::string::npos;
}

std::unordered_set<std::string> detect_automated(std::span<const RawMessage> messages,
                                                 int max_duplicates) {
  std::unordered_map<std::string, std::int64_t> counts;
  std::vector<std::string> keys;
  keys.reserve(messages.size());
  for (const RawMessage& m : messages) {
    std::string key = m.user_id;
    key.push_back('\x1f');
    key += clean_text(m.body);
    ++counts[key];
    keys.push_back(std::move(key));
  }
  std::unordered_set<std::string> suppressed;
  for (std::size_t i = 0; i < keys.size(); ++i)
    if (counts[keys[i]] > max_duplicates) suppressed.insert(messages[i].id);
  return suppressed;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

}  // namespace

SecurityMaster SecurityMaster::load_csv(std::istream& in) {
  SecurityMaster master;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("security master: empty file");
  // header: ticker,secstat,tpci,exchg,sic
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    if (f.size() < 5) throw std::runtime_error("security master: bad row: " + line);
    SecurityRecord rec;
    rec.ticker = f[0];
    rec.secstat = f[1];
    rec.tpci = f[2];
    rec.exchg = std::stoi(f[3]);
    rec.sic = std::stoi(f[4]);
    master.add(std::move(rec));
  }
  return master;
}

SecurityMaster SecurityMaster::load_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open security master: " + path);
  return load_csv(in);
}

void SecurityMaster::add(SecurityRecord rec) {
  records_[rec.ticker] = std::move(rec);
}

const SecurityRecord* SecurityMaster::find(const std::string& ticker) const {
  auto it = records_.find(ticker);
  return it == records_.end() ? nullptr : &it->second;
}

bool SecurityMaster::eligible(const std::string& ticker) const {
  const SecurityRecord* rec = find(ticker);
  if (!rec) return false;
  if (rec->secstat == "I") return false;
  if (rec->tpci != "0") return false;
  return rec->exchg == 11 || rec->exchg == 12 || rec->exchg == 14 || rec->exchg == 17;
}

FinanceLexicon FinanceLexicon::load(std::istream& in) {
  FinanceLexicon lex;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && line.back() == ' ') line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && line[start] == ' ') ++start;
    line.erase(0, start);
    if (line.empty()) continue;
    lex.add_term(std::move(line));
  }
  return lex;
}

FinanceLexicon FinanceLexicon::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open lexicon: " + path);
  return load(in);
}

void FinanceLexicon::add_term(std::string term) {
  for (char& c : term)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  if (term.find(' ') == std::string::npos)
    single_.insert(std::move(term));
  else
    phrases_.push_back(std::move(term));
}

bool FinanceLexicon::matches(const std::string& cleaned_text) const {
  std::size_t start = 0;
  const std::size_t n = cleaned_text.size();
  while (start < n) {
    std::size_t end = cleaned_text.find(' ', start);
    if (end == std::string::npos) end = n;
    if (end > start && single_.count(cleaned_text.substr(start, end - start))) return true;
    start = end + 1;
  }
  if (!phrases_.empty()) {
    const std::string padded = " " + cleaned_text + " ";
    for (const std::string& p : phrases_)
      if (padded.find(" " + p + " ") != std::string::npos) return true;
  }
  return false;
}

RestrictionResult apply_restrictions(std::vector<RawMessage> messages,
                                     const SecurityMaster& master, const TradingCalendar& calendar,
                                     const RestrictionConfig& cfg) {
  RestrictionResult result;
  result.report.stages.emplace_back("raw", static_cast<std::int64_t>(messages.size()));

  std::vector<RawMessage> current;
  current.reserve(messages.size());
  for (RawMessage& m : messages)
    if (m.cashtags.size() == 1) current.push_back(std::move(m));
  result.report.stages.emplace_back("single_ticker", static_cast<std::int64_t>(current.size()));

  const auto suppressed = detect_automated(current, cfg.max_duplicates);
  if (!suppressed.empty()) {
    std::vector<RawMessage> next;
    next.reserve(current.size());
    for (RawMessage& m : current)
      if (!suppressed.count(m.id)) next.push_back(std::move(m));
    current = std::move(next);
  }
  result.report.stages.emplace_back("not_automated", static_cast<std::int64_t>(current.size()));

  {
    std::vector<RawMessage> next;
    next.reserve(current.size());
    for (RawMessage& m : current)
      if (master.eligible(m.cashtags.front())) next.push_back(std::move(m));
    current = std::move(next);
  }
  result.report.stages.emplace_back("security_master", static_cast<std::int64_t>(current.size()));

  {
    // Count retained messages per (ticker, trading date, session).
    std::unordered_map<std::string, std::int64_t> session_counts;
    std::vector<std::string> keys(current.size());
    for (std::size_t i = 0; i < current.size(); ++i) {
      const auto assignment = assign_session(current[i].timestamp, calendar, cfg.session);
      if (!assignment) continue;  // out of calendar scope: no valid session
      std::string key = current[i].cashtags.front();
      key.push_back('\x1f');
      key += std::to_string(assignment->trading_date.days_since_epoch());
      key.push_back(assignment->window == SessionWindow::PreMarket ? 'P' : 'M');
      ++session_counts[key];
      keys[i] = std::move(key);
    }
    std::vector<RawMessage> next;
    next.reserve(current.size());
    for (std::size_t i = 0; i < current.size(); ++i) {
      if (keys[i].empty()) continue;
      if (session_counts[keys[i]] >= cfg.min_session_messages)
        next.push_back(std::move(current[i]));
    }
    current = std::move(next);
  }
  result.report.stages.emplace_back("min_session_messages",
                                    static_cast<std::int64_t>(current.size()));

  result.kept = std::move(current);
  return result;
}

ContentLabel classify_content(const RawMessage& msg, const FinanceLexicon& lexicon) {
  ContentLabel label;
  const bool original = !msg.is_retweet && msg.urls.empty() && !body_contains_url(msg.body);
  label.info_class = original ? InfoClass::original : InfoClass::dissemination;
  label.chat_class = lexicon.matches(clean_text(msg.body)) ? ChatClass::finance : ChatClass::chat;
  return label;
}

UserBuckets bucket_user(const RawMessage& msg) {
  UserBuckets out;
  switch (msg.user_experience) {
    case Experience::novice:
    case Experience::intermediate: out.experience = ExperienceBucket::amateur; break;
    case Experience::professional: out.experience = ExperienceBucket::professional; break;
    default: out.experience = ExperienceBucket::unknown; break;
  }
  switch (msg.user_approach) {
    case Approach::technical:
    case Approach::momentum: out.approach = ApproachBucket::technical; break;
    case Approach::value:
    case Approach::fundamental:
    case Approach::growth: out.approach = ApproachBucket::fundamental; break;
    case Approach::global_macro: out.approach = ApproachBucket::other; break;
    default: out.approach = ApproachBucket::unknown; break;
  }
  switch (msg.user_horizon) {
    case Horizon::day:
    case Horizon::swing: out.horizon = HorizonBucket::short_horizon; break;
    case Horizon::position:
    case Horizon::long_term: out.horizon = HorizonBucket::long_horizon; break;
    default: out.horizon = HorizonBucket::unknown; break;
  }
  return out;
}

}  // namespace emopanel
