#include "zkmlops/common/clock.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "zkmlops/common/error.hpp"

namespace zkmlops {

Timestamp wall_clock_micros() {
  using namespace std::chrono;
  return duration_cast<microseconds>(system_clock::now().time_since_epoch()).count();
}

std::string format_timestamp(Timestamp t) {
  std::time_t secs = static_cast<std::time_t>(t / 1'000'000);
  long micros = static_cast<long>(t % 1'000'000);
  if (micros < 0) {
    micros += 1'000'000;
    --secs;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%06ldZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, micros);
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  std::tm tm{};
  long micros = 0;
  std::string s(text);
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%6ldZ", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                  &tm.tm_min, &tm.tm_sec, &micros) != 7)
    throw Error(Errc::InvalidArgument, "bad timestamp '" + s + "'");
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  return static_cast<Timestamp>(timegm(&tm)) * 1'000'000 + micros;
}

Timestamp StrictClock::now() {
  Timestamp t = source_();
  std::lock_guard lock(mu_);
  if (t <= last_) t = last_ + 1;
  last_ = t;
  return t;
}

}  // namespace zkmlops
