// Price-series ingestion and empirical statistics: increments, Pearson
// surfaces, descriptive statistics, Epps curves and anti-diagonal curvature.
#pragma once

#include "frc/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace frc {

/// Microseconds since 1970-01-01T00:00:00Z.
using TimestampUs = std::int64_t;

/// Parses "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS[.ffffff][Z|+00:00]" (UTC only).
TimestampUs parse_timestamp(std::string_view text);
std::string format_timestamp(TimestampUs t);

struct PriceObservation {
  TimestampUs time = 0;
  double price = 0.0;
};

class PriceSeries {
 public:
  /// Appends an observation; throws DuplicateRecord or NonMonotoneTime.
  void add(int tenor, TimestampUs time, double price);

  std::vector<int> tenors() const;
  const std::vector<PriceObservation>& observations(int tenor) const;
  std::size_t record_count() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

 private:
  std::map<int, std::vector<PriceObservation>> data_;
  std::size_t count_ = 0;
};

/// Reads `timestamp,tenor_months,price` CSV. tenor_months must be a positive
/// multiple of 3. Errors carry the 1-based line number.
PriceSeries ingest_csv(std::istream& in);
PriceSeries ingest_csv_file(const std::string& path);
void write_price_csv(std::ostream& out, const PriceSeries& series);

/// Binned increments: rows are bins that contain at least one observation,
/// columns follow `tenors`; NaN marks a missing increment.
struct IncrementTable {
  std::vector<int> tenors;
  std::vector<TimestampUs> bin_start;
  Eigen::MatrixXd values;
  double delta_t_seconds = 0.0;

  Eigen::Index column(int tenor) const;
};

/// Bins [origin + k dt, origin + (k+1) dt). The increment of a tenor in a bin
/// is its last price in the bin minus its last price before the bin; it is
/// missing when the bin has no quote for the tenor or no earlier quote exists.
IncrementTable increments(const PriceSeries& series, double delta_t_seconds, TimestampUs origin = 0);

inline constexpr int kDefaultMinPairs = 30;

/// Pairwise-complete Pearson correlations. Pairs with fewer than min_pairs
/// joint observations (or zero variance) are NaN.
CorrelationSurface pearson_surface(const IncrementTable& inc, const TenorGrid& grid,
                                   int min_pairs = kDefaultMinPairs);

/// Pearson correlation of two columns over rows where both are present; NaN
/// below min_pairs.
double pairwise_pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int min_pairs, long* count = nullptr);

struct TenorStats {
  int tenor = 0;
  double mean_level = 0.0;
  double volatility = 0.0;  // NaN when undefined
  long n_levels = 0;
  long n_increments = 0;
  bool defined() const;
};

/// Mean price level and annualized increment volatility per grid tenor.
std::vector<TenorStats> descriptive_stats(const PriceSeries& series, const TenorGrid& grid,
                                          double delta_t_seconds = 86400.0,
                                          double annualization = 15.874507866387544);

struct EppsCurve {
  std::pair<int, int> pair;           // tenors
  std::vector<double> scales;         // seconds, strictly increasing
  std::vector<double> correlations;   // NaN where data are insufficient
  std::vector<long> counts;

  std::vector<double> insufficient_scales() const;
};

/// One Pearson coefficient per scale from non-overlapping bins. Scales below
/// the finest quote spacing of either tenor, or with fewer than min_pairs
/// joint increments, yield NaN.
EppsCurve epps_curve(const PriceSeries& series, std::pair<int, int> pair, std::vector<double> scales,
                     int min_pairs = kDefaultMinPairs);
void write_epps_csv(std::ostream& out, const EppsCurve& curve);

struct CurvaturePoint {
  int big_theta = 0;    // theta + theta'
  double curvature = 0.0;  // minus the quadratic coefficient
};

struct CurvatureResult {
  std::vector<CurvaturePoint> points;
  std::vector<int> skipped;  // Theta with fewer than `points` usable entries
};

/// Least-squares parabola in x = theta - theta' through the `points` entries
/// of each anti-diagonal with the smallest |x|. Throws Error{InsufficientData}
/// when no anti-diagonal qualifies.
CurvatureResult antidiagonal_curvature(const CorrelationSurface& surface, int points = 10);
void write_curvature_csv(std::ostream& out, const CurvatureResult& result);

}  // namespace frc
