#include "roughvol/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace roughvol {

namespace {

bool parse_iso_timestamp(const std::string& s, std::string& date, int& sec) {
  // YYYY-MM-DD[T ]HH:MM:SS
  if (s.size() < 19 || s[4] != '-' || s[7] != '-') return false;
  char sep = s[10];
  if (sep != 'T' && sep != ' ') return false;
  if (s[13] != ':' || s[16] != ':') return false;
  auto digits = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (s[i] < '0' || s[i] > '9') return -1;
      v = v * 10 + (s[i] - '0');
    }
    return v;
  };
  int h = digits(11, 2), m = digits(14, 2), ss = digits(17, 2);
  if (h < 0 || m < 0 || ss < 0 || h > 23 || m > 59 || ss > 60) return false;
  date = s.substr(0, 10);
  sec = h * 3600 + m * 60 + ss;
  return true;
}

bool parse_epoch_timestamp(const std::string& s, std::string& date, int& sec) {
  long long epoch = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), epoch);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return false;
  // Epoch values are taken as already expressed in the exchange-local clock.
  long long day = epoch / 86400;
  sec = int(epoch % 86400);
  if (sec < 0) {
    sec += 86400;
    --day;
  }
  // Civil date from day number (Howard Hinnant's algorithm).
  long long z = day + 719468;
  long long era = (z >= 0 ? z : z - 146096) / 146097;
  unsigned doe = unsigned(z - era * 146097);
  unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  long long y = (long long)yoe + era * 400;
  unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  unsigned mp = (5 * doy + 2) / 153;
  unsigned d = doy - (153 * mp + 2) / 5 + 1;
  unsigned m = mp < 10 ? mp + 3 : mp - 9;
  if (m <= 2) ++y;
  char buf[24];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", y, m, d);
  date = buf;
  return true;
}

}  // namespace

RawTickFile read_ticks_csv(std::istream& in, const std::string& source) {
  RawTickFile file;
  file.source = source;
  std::string line;
  if (!std::getline(in, line)) throw layout_error("ticks", "empty tick file");
  if (line.rfind("timestamp,price", 0) != 0)
    throw layout_error("ticks", "expected header timestamp,price");
  std::size_t line_no = 1;
  std::string prev_date;
  int prev_sec = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw layout_error("ticks", "bad row at line " + std::to_string(line_no));
    std::string ts = line.substr(0, comma);
    std::string price_s = line.substr(comma + 1);
    RawTick tick;
    if (!parse_iso_timestamp(ts, tick.date, tick.second_of_day) &&
        !parse_epoch_timestamp(ts, tick.date, tick.second_of_day))
      throw layout_error("ticks", "bad timestamp at line " + std::to_string(line_no));
    auto res = std::from_chars(price_s.data(), price_s.data() + price_s.size(), tick.price);
    if (res.ec != std::errc() || !(tick.price > 0.0))
      throw layout_error("ticks", "bad price at line " + std::to_string(line_no));
    if (tick.date == prev_date && tick.second_of_day < prev_sec)
      throw layout_error("ticks", "timestamps decrease within " + tick.date);
    prev_date = tick.date;
    prev_sec = tick.second_of_day;
    file.ticks.push_back(std::move(tick));
  }
  return file;
}

RawTickFile read_ticks_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw layout_error("ticks", "cannot open " + path);
  return read_ticks_csv(in, path);
}

SessionSpec parse_session(const std::string& text) {
  int h1, m1, h2, m2;
  if (std::sscanf(text.c_str(), "%d:%d-%d:%d", &h1, &m1, &h2, &m2) != 4)
    throw std::invalid_argument("session must look like 09:35-16:00");
  SessionSpec s;
  s.open_sec = h1 * 3600 + m1 * 60;
  s.close_sec = h2 * 3600 + m2 * 60;
  if (s.open_sec >= s.close_sec)
    throw std::invalid_argument("session open must precede close");
  return s;
}

ResampleResult resample(const RawTickFile& raw, const SessionSpec& session,
                        int step_seconds) {
  if (step_seconds < 1) throw std::invalid_argument("resample: step must be >= 1s");
  if (session.open_sec >= session.close_sec)
    throw std::invalid_argument("resample: session open must precede close");
  ResampleResult out;
  out.step_seconds = step_seconds;
  const int n_steps = (session.close_sec - session.open_sec) / step_seconds;

  std::size_t i = 0;
  while (i < raw.ticks.size()) {
    const std::string& date = raw.ticks[i].date;
    std::size_t j = i;
    while (j < raw.ticks.size() && raw.ticks[j].date == date) ++j;
    bool any_in_session = false;
    for (std::size_t k = i; k < j && !any_in_session; ++k)
      any_in_session = raw.ticks[k].second_of_day >= session.open_sec &&
                       raw.ticks[k].second_of_day <= session.close_sec;
    if (!any_in_session) {
      out.dropped.push_back(date + ": no ticks in session");
      i = j;
      continue;
    }
    ResampledDay day;
    day.date = date;
    day.log_prices.resize(std::size_t(n_steps) + 1);
    std::size_t cursor = i;
    double last_price = 0.0;
    bool have_last = false;
    double first_price = raw.ticks[i].price;  // earliest tick of the day
    double min_p = 0.0, max_p = 0.0;
    bool padded = false;
    for (int g = 0; g <= n_steps; ++g) {
      int t = session.open_sec + g * step_seconds;
      while (cursor < j && raw.ticks[cursor].second_of_day <= t) {
        last_price = raw.ticks[cursor].price;
        have_last = true;
        ++cursor;
      }
      double p = last_price;
      if (!have_last) {
        // Grid point before the first tick of the day: take the first tick.
        p = first_price;
        padded = true;
      }
      day.log_prices[std::size_t(g)] = std::log(p);
      if (g == 0) {
        min_p = max_p = p;
      } else {
        min_p = std::min(min_p, p);
        max_p = std::max(max_p, p);
      }
    }
    day.padded_at_open = padded;
    day.flat = min_p == max_p;
    out.days.push_back(std::move(day));
    i = j;
  }
  return out;
}

std::vector<std::string> read_exclusion_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw layout_error("filter", "cannot open exclusion file " + path);
  std::vector<std::string> dates;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t'))
      line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    dates.push_back(line.substr(start));
  }
  return dates;
}

FilterResult filter_days(const ResampleResult& grids, const DayFilterConfig& config) {
  if (!(config.zero_return_threshold > 0.0 && config.zero_return_threshold <= 1.0))
    throw std::invalid_argument("filter: threshold must be in (0,1]");
  FilterResult out;
  out.path.delta_n =
      double(grids.step_seconds) / (double(kTradingDaysPerYear) * 6.5 * 3600.0);
  out.path.meta = "ingest";
  const int per_5min = std::max(1, 300 / grids.step_seconds);
  for (const auto& day : grids.days) {
    FilterLogEntry entry;
    entry.date = day.date;
    if (std::find(config.exclusion_dates.begin(), config.exclusion_dates.end(),
                  day.date) != config.exclusion_dates.end()) {
      entry.reason = "excluded date";
      out.log.push_back(std::move(entry));
      continue;
    }
    // Zero five-minute returns: exact equality of log-prices 5 minutes apart.
    int zeros = 0, total = 0;
    for (std::size_t g = std::size_t(per_5min); g < day.log_prices.size();
         g += std::size_t(per_5min)) {
      ++total;
      if (day.log_prices[g] == day.log_prices[g - std::size_t(per_5min)]) ++zeros;
    }
    if (total > 0 && double(zeros) / double(total) > config.zero_return_threshold) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "zero 5-minute returns %.1f%%",
                    100.0 * double(zeros) / double(total));
      entry.reason = buf;
      out.log.push_back(std::move(entry));
      continue;
    }
    entry.kept = true;
    out.log.push_back(std::move(entry));
    out.path.days.push_back(TradingDay{day.date, day.log_prices});
  }
  if (out.path.days.empty())
    throw layout_error("filter", "all days filtered out");
  return out;
}

}  // namespace roughvol
