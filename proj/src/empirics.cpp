#include "frc/empirics.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <tuple>
#include <ostream>
#include <sstream>

namespace frc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc{} && res.ptr == end;
}

int parse_fixed(std::string_view text, std::size_t pos, std::size_t len) {
  int v = 0;
  if (pos + len > text.size() || !parse_number(text.substr(pos, len), v)) {
    throw Error(Errc::ParseError, "malformed timestamp '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = line.find(sep, start);
    out.push_back(trim(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

}  // namespace

TimestampUs parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  text = trim(text);
  auto bad = [&] { return Error(Errc::ParseError, "malformed timestamp '" + std::string(text) + "'"); };
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') throw bad();
  const year_month_day ymd{year{parse_fixed(text, 0, 4)}, month{static_cast<unsigned>(parse_fixed(text, 5, 2))},
                           day{static_cast<unsigned>(parse_fixed(text, 8, 2))}};
  if (!ymd.ok()) throw bad();
  std::int64_t us = duration_cast<microseconds>(sys_days{ymd}.time_since_epoch()).count();
  std::string_view rest = text.substr(10);
  if (rest.empty()) return us;
  if (rest[0] != 'T' && rest[0] != ' ') throw bad();
  if (rest.size() < 9 || rest[3] != ':' || rest[6] != ':') throw bad();
  const int hh = parse_fixed(rest, 1, 2), mm = parse_fixed(rest, 4, 2), ss = parse_fixed(rest, 7, 2);
  if (hh > 23 || mm > 59 || ss > 60) throw bad();
  us += (static_cast<std::int64_t>(hh) * 3600 + mm * 60 + ss) * 1000000;
  rest = rest.substr(9);
  if (!rest.empty() && rest[0] == '.') {
    std::size_t n = 1;
    std::int64_t frac = 0, scale = 100000;
    while (n < rest.size() && std::isdigit(static_cast<unsigned char>(rest[n]))) {
      frac += (rest[n] - '0') * scale;
      scale /= 10;
      ++n;
    }
    if (n == 1) throw bad();
    us += frac;
    rest = rest.substr(n);
  }
  if (rest.empty() || rest == "Z" || rest == "+00:00" || rest == "+0000") return us;
  throw bad();
}

std::string format_timestamp(TimestampUs t) {
  using namespace std::chrono;
  const sys_time<microseconds> tp{microseconds{t}};
  const auto days = floor<std::chrono::days>(tp);
  const year_month_day ymd{days};
  const hh_mm_ss hms{tp - days};
  std::ostringstream os;
  os << std::setfill('0') << std::setw(4) << static_cast<int>(ymd.year()) << '-' << std::setw(2)
     << static_cast<unsigned>(ymd.month()) << '-' << std::setw(2) << static_cast<unsigned>(ymd.day()) << 'T'
     << std::setw(2) << hms.hours().count() << ':' << std::setw(2) << hms.minutes().count() << ':'
     << std::setw(2) << hms.seconds().count();
  if (hms.subseconds().count() != 0) os << '.' << std::setw(6) << hms.subseconds().count();
  os << 'Z';
  return os.str();
}

void PriceSeries::add(int tenor, TimestampUs time, double price) {
  auto& obs = data_[tenor];
  if (!obs.empty()) {
    if (obs.back().time == time) throw Error(Errc::DuplicateRecord, "duplicate (timestamp, tenor) record");
    if (obs.back().time > time) throw Error(Errc::NonMonotoneTime, "timestamps decrease for a tenor");
  }
  obs.push_back({time, price});
  ++count_;
}

std::vector<int> PriceSeries::tenors() const {
  std::vector<int> out;
  for (const auto& [t, _] : data_) out.push_back(t);
  return out;
}

const std::vector<PriceObservation>& PriceSeries::observations(int tenor) const {
  static const std::vector<PriceObservation> kEmpty;
  const auto it = data_.find(tenor);
  return it == data_.end() ? kEmpty : it->second;
}

PriceSeries ingest_csv(std::istream& in) {
  PriceSeries series;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    auto where = [&](const std::string& msg) { return "line " + std::to_string(line_no) + ": " + msg; };
    const auto fields = split(view, ',');
    if (!header) {
      if (fields.size() != 3 || fields[0] != "timestamp" || fields[1] != "tenor_months" || fields[2] != "price") {
        throw Error(Errc::ParseError, where("expected header 'timestamp,tenor_months,price'"));
      }
      header = true;
      continue;
    }
    if (fields.size() != 3) throw Error(Errc::ParseError, where("expected 3 fields"));
    TimestampUs t;
    try {
      t = parse_timestamp(fields[0]);
    } catch (const Error& e) {
      throw Error(Errc::ParseError, where(e.what()));
    }
    int months = 0;
    if (!parse_number(fields[1], months) || months <= 0 || months % kMonthsPerTenor != 0) {
      throw Error(Errc::ParseError, where("tenor_months must be a positive multiple of 3"));
    }
    double price = 0.0;
    if (!parse_number(fields[2], price) || !std::isfinite(price)) {
      throw Error(Errc::ParseError, where("invalid price"));
    }
    try {
      series.add(months / kMonthsPerTenor, t, price);
    } catch (const Error& e) {
      throw Error(e.code(), where(e.what()));
    }
  }
  return series;
}

PriceSeries ingest_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path);
  return ingest_csv(in);
}

void write_price_csv(std::ostream& out, const PriceSeries& series) {
  std::vector<std::tuple<TimestampUs, int, double>> rows;
  for (int tenor : series.tenors()) {
    for (const auto& o : series.observations(tenor)) rows.emplace_back(o.time, tenor, o.price);
  }
  std::sort(rows.begin(), rows.end());
  out << "timestamp,tenor_months,price\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& [t, tenor, p] : rows) out << format_timestamp(t) << ',' << tenor * kMonthsPerTenor << ',' << p << '\n';
}

Eigen::Index IncrementTable::column(int tenor) const {
  const auto it = std::find(tenors.begin(), tenors.end(), tenor);
  return it == tenors.end() ? -1 : static_cast<Eigen::Index>(it - tenors.begin());
}

IncrementTable increments(const PriceSeries& series, double delta_t_seconds, TimestampUs origin) {
  if (!(delta_t_seconds > 0.0)) throw Error(Errc::InvalidArgument, "bin width must be positive");
  const double width_us = delta_t_seconds * 1e6;
  auto bin_of = [&](TimestampUs t) {
    return static_cast<std::int64_t>(std::floor(static_cast<double>(t - origin) / width_us));
  };
  IncrementTable table;
  table.tenors = series.tenors();
  table.delta_t_seconds = delta_t_seconds;
  std::map<std::int64_t, Eigen::Index> rows;
  for (int tenor : table.tenors) {
    for (const auto& o : series.observations(tenor)) rows.emplace(bin_of(o.time), 0);
  }
  Eigen::Index r = 0;
  for (auto& [bin, row] : rows) {
    row = r++;
    table.bin_start.push_back(origin + static_cast<TimestampUs>(std::llround(static_cast<double>(bin) * width_us)));
  }
  table.values = Eigen::MatrixXd::Constant(r, static_cast<Eigen::Index>(table.tenors.size()), kNaN);
  for (std::size_t c = 0; c < table.tenors.size(); ++c) {
    const auto& obs = series.observations(table.tenors[c]);
    bool have_prev = false;
    double prev_close = 0.0;
    std::size_t i = 0;
    while (i < obs.size()) {
      const std::int64_t bin = bin_of(obs[i].time);
      std::size_t j = i;
      while (j + 1 < obs.size() && bin_of(obs[j + 1].time) == bin) ++j;
      const double close = obs[j].price;
      if (have_prev) table.values(rows.at(bin), static_cast<Eigen::Index>(c)) = close - prev_close;
      prev_close = close;
      have_prev = true;
      i = j + 1;
    }
  }
  return table;
}

double pairwise_pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int min_pairs, long* count) {
  long n = 0;
  double sx = 0.0, sy = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    ++n;
    sx += x[i];
    sy += y[i];
  }
  if (count) *count = n;
  if (n < std::max(2, min_pairs)) return kNaN;
  const double mx = sx / static_cast<double>(n), my = sy / static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return kNaN;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationSurface pearson_surface(const IncrementTable& inc, const TenorGrid& grid, int min_pairs) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd rho = Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd none = Eigen::VectorXd::Constant(inc.values.rows(), kNaN);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index ci = inc.column(grid[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Eigen::Index cj = inc.column(grid[static_cast<std::size_t>(j)]);
      const Eigen::VectorXd x = ci < 0 ? none : Eigen::VectorXd(inc.values.col(ci));
      const Eigen::VectorXd y = cj < 0 ? none : Eigen::VectorXd(inc.values.col(cj));
      rho(i, j) = rho(j, i) = pairwise_pearson(x, y, min_pairs);
    }
  }
  return CorrelationSurface(grid, rho);
}

bool TenorStats::defined() const { return std::isfinite(volatility); }

std::vector<TenorStats> descriptive_stats(const PriceSeries& series, const TenorGrid& grid,
                                          double delta_t_seconds, double annualization) {
  const IncrementTable inc = increments(series, delta_t_seconds);
  std::vector<TenorStats> out;
  for (int tenor : grid.tenors()) {
    TenorStats s;
    s.tenor = tenor;
    const auto& obs = series.observations(tenor);
    s.n_levels = static_cast<long>(obs.size());
    double sum = 0.0;
    for (const auto& o : obs) sum += o.price;
    s.mean_level = obs.empty() ? kNaN : sum / static_cast<double>(obs.size());
    s.volatility = kNaN;
    const Eigen::Index c = inc.column(tenor);
    if (c >= 0) {
      std::vector<double> v;
      for (Eigen::Index r = 0; r < inc.values.rows(); ++r) {
        if (!std::isnan(inc.values(r, c))) v.push_back(inc.values(r, c));
      }
      s.n_increments = static_cast<long>(v.size());
      if (v.size() >= 2) {
        const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - m) * (x - m);
        s.volatility = std::sqrt(ss / static_cast<double>(v.size() - 1)) * annualization;
      }
    }
    out.push_back(s);
  }
  return out;
}

std::vector<double> EppsCurve::insufficient_scales() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (std::isnan(correlations[i])) out.push_back(scales[i]);
  }
  return out;
}

EppsCurve epps_curve(const PriceSeries& series, std::pair<int, int> pair, std::vector<double> scales,
                     int min_pairs) {
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0)) throw Error(Errc::InvalidArgument, "scales must be positive");
    if (i > 0 && !(scales[i] > scales[i - 1])) throw Error(Errc::InvalidArgument, "scales must be strictly increasing");
  }
  PriceSeries two;
  double resolution_us = 0.0;
  for (int tenor : {pair.first, pair.second}) {
    const auto& obs = series.observations(tenor);
    if (obs.empty()) throw Error(Errc::InsufficientData, "no quotes for tenor " + std::to_string(tenor * kMonthsPerTenor) + "m");
    double finest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < obs.size(); ++i) {
      two.add(tenor, obs[i].time, obs[i].price);
      if (i > 0) finest = std::min(finest, static_cast<double>(obs[i].time - obs[i - 1].time));
    }
    resolution_us = std::max(resolution_us, finest);
  }
  EppsCurve curve;
  curve.pair = pair;
  curve.scales = scales;
  for (double s : scales) {
    long n = 0;
    double rho = kNaN;
    if (s * 1e6 >= resolution_us * (1.0 - 1e-9)) {
      const IncrementTable inc = increments(two, s);
      rho = pairwise_pearson(inc.values.col(inc.column(pair.first)), inc.values.col(inc.column(pair.second)),
                             min_pairs, &n);
    }
    curve.correlations.push_back(rho);
    curve.counts.push_back(n);
  }
  return curve;
}

void write_epps_csv(std::ostream& out, const EppsCurve& curve) {
  out << "scale_seconds,correlation\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < curve.scales.size(); ++i) {
    out << curve.scales[i] << ',';
    if (std::isnan(curve.correlations[i])) {
      out << "nan";
    } else {
      out << curve.correlations[i];
    }
    out << '\n';
  }
}

CurvatureResult antidiagonal_curvature(const CorrelationSurface& surface, int points) {
  if (points < 3) throw Error(Errc::InvalidArgument, "a parabola needs at least 3 points");
  const TenorGrid& grid = surface.grid();
  const auto n = grid.size();
  CurvatureResult result;
  if (n == 0) throw Error(Errc::InsufficientData, "empty surface");
  const int lo = 2 * grid[0], hi = 2 * grid[n - 1];
  for (int big = lo; big <= hi; ++big) {
    std::vector<std::pair<int, double>> pts;  // (x, rho)
    for (std::size_t i = 0; i < n; ++i) {
      const auto j = grid.index_of(big - grid[i]);
      if (!j) continue;
      const double v = surface(i, *j);
      if (std::isnan(v)) continue;
      pts.emplace_back(grid[i] - grid[*j], v);
    }
    if (pts.empty()) continue;
    if (static_cast<int>(pts.size()) < points) {
      result.skipped.push_back(big);
      continue;
    }
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
      return std::abs(a.first) != std::abs(b.first) ? std::abs(a.first) < std::abs(b.first) : a.first < b.first;
    });
    Eigen::MatrixXd design(points, 3);
    Eigen::VectorXd rhs(points);
    for (int k = 0; k < points; ++k) {
      const double x = pts[static_cast<std::size_t>(k)].first;
      design.row(k) << 1.0, x, x * x;
      rhs[k] = pts[static_cast<std::size_t>(k)].second;
    }
    const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
    result.points.push_back({big, -coef[2]});
  }
  if (result.points.empty()) throw Error(Errc::InsufficientData, "no anti-diagonal has enough points");
  return result;
}

void write_curvature_csv(std::ostream& out, const CurvatureResult& result) {
  out << "big_theta,curvature\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& p : result.points) out << p.big_theta << ',' << p.curvature << '\n';
}

}  // namespace frc
