#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "roughvol/types.hpp"

namespace roughvol {

struct RawTick {
  std::string date;   // calendar date in the exchange-local clock
  int second_of_day;  // 0..86399
  double price;       // > 0
};

struct RawTickFile {
  std::vector<RawTick> ticks;  // non-decreasing time within each day
  std::string source;
};

// CSV with header "timestamp,price"; timestamps ISO-8601
// (YYYY-MM-DD[T ]HH:MM:SS) or epoch seconds, auto-detected. Epoch values are
// taken as already expressed in the exchange-local clock.
RawTickFile read_ticks_csv(std::istream& in, const std::string& source = "");
RawTickFile read_ticks_file(const std::string& path);

struct SessionSpec {
  int open_sec = 9 * 3600 + 35 * 60;  // 09:35
  int close_sec = 16 * 3600;          // 16:00
};
// "HH:MM-HH:MM"
SessionSpec parse_session(const std::string& text);

struct ResampledDay {
  std::string date;
  std::vector<double> log_prices;
  bool flat = false;              // single price over the whole session
  bool padded_at_open = false;    // grid points before the first tick
};

struct ResampleResult {
  std::vector<ResampledDay> days;
  std::vector<std::string> dropped;  // "date: reason" for tickless days
  int step_seconds = 5;
};

// Previous-tick sampling onto the regular session grid. Grid points before
// the first tick of the day take the first tick's price (flagged).
ResampleResult resample(const RawTickFile& raw, const SessionSpec& session,
                        int step_seconds = 5);

struct DayFilterConfig {
  double zero_return_threshold = 0.20;     // fraction of zero 5-minute returns
  std::vector<std::string> exclusion_dates;
  SessionSpec session;
};

struct FilterLogEntry {
  std::string date;
  bool kept = false;
  std::string reason;  // empty when kept
};

struct FilterResult {
  PricePath path;
  std::vector<FilterLogEntry> log;  // partitions the input, in order
};

// Drops excluded dates and days whose zero-5-minute-return fraction exceeds
// the threshold; surviving days keep their order and prices.
FilterResult filter_days(const ResampleResult& grids, const DayFilterConfig& config);

// One ISO date per line; '#' comments and blank lines ignored.
std::vector<std::string> read_exclusion_file(const std::string& path);

}  // namespace roughvol
