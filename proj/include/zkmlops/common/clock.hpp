#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>

namespace zkmlops {

// Microseconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

Timestamp wall_clock_micros();
// "2026-10-19T12:34:56.123456Z"
std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(std::string_view text);

// Hands out strictly increasing timestamps even when the underlying clock
// stalls or steps backwards.
class StrictClock {
 public:
  using Source = std::function<Timestamp()>;
  explicit StrictClock(Source source = wall_clock_micros) : source_(std::move(source)) {}

  Timestamp now();

 private:
  Source source_;
  std::mutex mu_;
  Timestamp last_ = 0;
};

}  // namespace zkmlops
