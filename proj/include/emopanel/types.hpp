#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "emopanel/dates.hpp"

namespace emopanel {

// Seven-component probability vector attached to a message or a firm-day
// aggregate. Component order everywhere (including the wire format):
// neutral, happy, sad, anger, disgust, surprise, fear.
struct EmotionTuple {
  static constexpr int kSize = 7;

  double neutral = 0, happy = 0, sad = 0, anger = 0, disgust = 0, surprise = 0, fear = 0;

  double& operator[](int i) { return (&neutral)[i]; }
  double operator[](int i) const { return (&neutral)[i]; }

  double sum() const {
    return neutral + happy + sad + anger + disgust + surprise + fear;
  }
  bool valid(double sum_tol) const {
    for (int i = 0; i < kSize; ++i)
      if (!((*this)[i] >= 0.0 && (*this)[i] <= 1.0)) return false;
    return std::abs(sum() - 1.0) <= sum_tol;
  }
  EmotionTuple normalized() const {
    EmotionTuple out = *this;
    const double s = sum();
    if (s > 0)
      for (int i = 0; i < kSize; ++i) out[i] /= s;
    return out;
  }
};

inline constexpr std::array<const char*, EmotionTuple::kSize> kEmotionNames = {
    "neutral", "happy", "sad", "anger", "disgust", "surprise", "fear"};

enum class Experience : std::uint8_t { novice, intermediate, professional, unknown };
enum class Approach : std::uint8_t {
  technical,
  momentum,
  fundamental,
  value,
  growth,
  global_macro,
  unknown
};
enum class Horizon : std::uint8_t { day, swing, position, long_term, unknown };
enum class SentimentTag : std::uint8_t { bullish, bearish, unclassified };

// One social-media post with metadata, as read from the line-delimited
// message file. Timestamps keep their original zone offset so a message
// re-serializes to the exact input representation.
struct RawMessage {
  std::string id;
  std::string user_id;
  Instant timestamp;
  std::int16_t tz_offset_minutes = 0;
  std::string body;
  std::vector<std::string> cashtags;  // uppercase tickers
  std::int64_t follower_count = 0;
  bool is_retweet = false;
  std::vector<std::string> urls;
  std::int64_t likes = 0;
  Experience user_experience = Experience::unknown;
  Approach user_approach = Approach::unknown;
  Horizon user_horizon = Horizon::unknown;
  std::optional<EmotionTuple> emotion;
  std::optional<EmotionTuple> emotion_alt;  // second model's tuple, if supplied
  SentimentTag sentiment_tag = SentimentTag::unclassified;
};

// Stage-by-stage retention counts of the sample-restriction funnel.
struct FilterReport {
  std::vector<std::pair<std::string, std::int64_t>> stages;

  std::int64_t raw_count() const { return stages.empty() ? 0 : stages.front().second; }
  std::int64_t final_count() const { return stages.empty() ? 0 : stages.back().second; }
  // Retention relative to the previous stage; stage 0 rate is 1.
  double pass_rate(std::size_t i) const {
    if (i == 0 || i >= stages.size()) return 1.0;
    const double prev = static_cast<double>(stages[i - 1].second);
    return prev > 0 ? static_cast<double>(stages[i].second) / prev : 1.0;
  }
  bool monotone() const {
    for (std::size_t i = 1; i < stages.size(); ++i)
      if (stages[i].second > stages[i - 1].second) return false;
    return true;
  }
};

enum class ChatClass : std::uint8_t { finance, chat };
enum class InfoClass : std::uint8_t { original, dissemination };

struct ContentLabel {
  ChatClass chat_class = ChatClass::chat;
  InfoClass info_class = InfoClass::dissemination;
};

enum class ExperienceBucket : std::uint8_t { amateur, professional, unknown };
enum class ApproachBucket : std::uint8_t { technical, fundamental, other, unknown };
enum class HorizonBucket : std::uint8_t { short_horizon, long_horizon, unknown };

struct UserBuckets {
  ExperienceBucket experience = ExperienceBucket::unknown;
  ApproachBucket approach = ApproachBucket::unknown;
  HorizonBucket horizon = HorizonBucket::unknown;
};

}  // namespace emopanel
