#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ccf/cifs.hpp"

namespace ccf {

enum class CloudMode { Exhaustive, Random, Closure };

const char* to_string(CloudMode mode);

/// Approximate limit-set points phi_w(1/2) with the metadata needed to
/// regenerate them.
struct PointCloud {
  std::vector<Complex> points;
  double tau_u = 0.0;
  double tau_v = 1.0;
  int cutoff = 0;
  int level = 0;
  CloudMode mode = CloudMode::Exhaustive;
  std::uint64_t seed = 0;
  /// Largest sup_X |phi_w'| over the generating words; each point lies
  /// within this distance of the limit point of its word (diam X = 1).
  double max_error = 0.0;
};

/// Exhaustive: phi_w(1/2) for every w in F(N)^n, lexicographic, and
/// `count` is the point budget. Random: `count` words with letters drawn
/// uniformly from F(N) by a generator seeded with `seed`.
PointCloud generate_points(const Parameter& tau, const Truncation& trunc, int level,
                           CloudMode mode, std::int64_t count, std::uint64_t seed = 1);

/// {0} together with phi_w(0) for every word over F(N) of length
/// 1..max_len, shortest words first.
PointCloud closure_points(const Parameter& tau, const Truncation& trunc, int max_len,
                          std::int64_t budget = 10'000'000);

/// Largest image radius of the letters left out of F(N).
struct XInfinityReport {
  std::vector<int> cutoffs;
  /// s(N) = max over letters with m > N or n > N of sup_X |phi_b|
  ///      = 1 / (|b + 1/2| - 1/2), attained at (N+1, 1) or (1, N+1).
  std::vector<double> reach;
  /// |phi_b(0)| = 1/|b| at the same letter.
  std::vector<double> origin_image;
  bool strictly_decreasing = false;
  bool below_inverse_cutoff = false;  // s(N) <= 1/N

  bool passed() const { return strictly_decreasing && below_inverse_cutoff; }
};

/// Throws Precondition for an empty or non-increasing list.
XInfinityReport verify_x_infinity(const Parameter& tau, const std::vector<int>& cutoffs);

struct BoxCountResult {
  std::vector<double> scales;  // strictly decreasing
  std::vector<std::int64_t> counts;
  double slope = 0.0;
  double r2 = 0.0;
};

/// Occupied axis-aligned boxes at `levels` geometric scales from
/// scale_max down to scale_min; slope of log count against log(1/scale).
BoxCountResult box_counting_dim(const PointCloud& cloud, double scale_min, double scale_max,
                                int levels);

void write_cloud_csv(std::ostream& os, const PointCloud& cloud);
/// "CCF1" followed by little-endian float64 (re, im) pairs.
void write_cloud_binary(std::ostream& os, const PointCloud& cloud);
std::vector<Complex> read_cloud_binary(std::istream& is);
void write_boxcount_csv(std::ostream& os, const BoxCountResult& result);

}  // namespace ccf
