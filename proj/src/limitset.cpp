#include "ccf/limitset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>

#include "ccf/error.hpp"

namespace ccf {

const char* to_string(CloudMode mode) {
  switch (mode) {
    case CloudMode::Exhaustive: return "exhaustive";
    case CloudMode::Random: return "random";
    case CloudMode::Closure: return "closure";
  }
  return "unknown";
}

namespace {

/// phi_{w1} o ... o phi_{wk}(z), innermost letter first, together with
/// sup_X |phi_w'|.
struct Evaluated {
  Complex point;
  double sup_norm;
};

Evaluated evaluate(const std::vector<Complex>& values, const std::vector<int>& word, Complex z) {
  for (auto it = word.rbegin(); it != word.rend(); ++it) z = 1.0 / (z + values[static_cast<std::size_t>(*it)]);
  // Second matrix row for the derivative bound; the determinant has modulus 1.
  Complex c(0.0, 0.0);
  Complex d(1.0, 0.0);
  double log_scale = 0.0;
  for (int idx : word) {
    const Complex next_d = c + d * values[static_cast<std::size_t>(idx)];
    c = d;
    d = next_d;
    const double big = std::max(std::abs(c), std::abs(d));
    if (big > 1e100) {
      c /= big;
      d /= big;
      log_scale += std::log(big);
    }
  }
  const double near = std::abs(d + 0.5 * c) - 0.5 * std::abs(c);
  return {z, std::exp(-2.0 * log_scale - 2.0 * std::log(near))};
}

std::vector<Complex> alphabet(const Parameter& tau, const Truncation& trunc) {
  std::vector<Complex> values;
  for (const auto& l : trunc.letters()) values.push_back(letter_value(l, tau));
  return values;
}

/// Advances `word` to the next word of the same length in lexicographic
/// order; false after the last one.
bool next_word(std::vector<int>& word, int letters) {
  for (auto i = word.size(); i-- > 0;) {
    if (++word[i] < letters) return true;
    word[i] = 0;
  }
  return false;
}

}  // namespace

PointCloud generate_points(const Parameter& tau, const Truncation& trunc, int level,
                           CloudMode mode, std::int64_t count, std::uint64_t seed) {
  if (level < 1) throw Error(ErrorKind::Precondition, "word level must be >= 1");
  if (count < 1) throw Error(ErrorKind::Precondition, "point count must be >= 1");
  if (mode == CloudMode::Closure) {
    throw Error(ErrorKind::Precondition, "use closure_points for closure clouds");
  }
  const auto values = alphabet(tau, trunc);
  const int letters = static_cast<int>(values.size());

  PointCloud cloud;
  cloud.tau_u = tau.u();
  cloud.tau_v = tau.v();
  cloud.cutoff = trunc.cutoff();
  cloud.level = level;
  cloud.mode = mode;
  cloud.seed = seed;
  const Complex seed_point(0.5, 0.0);

  std::vector<int> word(static_cast<std::size_t>(level), 0);
  if (mode == CloudMode::Exhaustive) {
    const double total = std::pow(static_cast<double>(letters), level);
    if (total > static_cast<double>(count)) {
      throw Error(ErrorKind::Budget, "exhaustive cloud exceeds the point budget");
    }
    cloud.points.reserve(static_cast<std::size_t>(total));
    do {
      const auto e = evaluate(values, word, seed_point);
      cloud.points.push_back(e.point);
      cloud.max_error = std::max(cloud.max_error, e.sup_norm);
    } while (next_word(word, letters));
    return cloud;
  }

  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> pick(0, letters - 1);
  cloud.points.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    for (auto& w : word) w = pick(gen);
    const auto e = evaluate(values, word, seed_point);
    cloud.points.push_back(e.point);
    cloud.max_error = std::max(cloud.max_error, e.sup_norm);
  }
  return cloud;
}

PointCloud closure_points(const Parameter& tau, const Truncation& trunc, int max_len,
                          std::int64_t budget) {
  if (max_len < 0) throw Error(ErrorKind::Precondition, "max_len must be >= 0");
  const auto values = alphabet(tau, trunc);
  const int letters = static_cast<int>(values.size());
  double total = 1.0;
  for (int k = 1; k <= max_len; ++k) total += std::pow(static_cast<double>(letters), k);
  if (total > static_cast<double>(budget)) {
    throw Error(ErrorKind::Budget, "closure cloud exceeds the point budget");
  }

  PointCloud cloud;
  cloud.tau_u = tau.u();
  cloud.tau_v = tau.v();
  cloud.cutoff = trunc.cutoff();
  cloud.level = max_len;
  cloud.mode = CloudMode::Closure;
  cloud.points.reserve(static_cast<std::size_t>(total));
  cloud.points.emplace_back(0.0, 0.0);
  for (int k = 1; k <= max_len; ++k) {
    std::vector<int> word(static_cast<std::size_t>(k), 0);
    do {
      const auto e = evaluate(values, word, Complex(0.0, 0.0));
      cloud.points.push_back(e.point);
      cloud.max_error = std::max(cloud.max_error, e.sup_norm);
    } while (next_word(word, letters));
  }
  return cloud;
}

XInfinityReport verify_x_infinity(const Parameter& tau, const std::vector<int>& cutoffs) {
  if (cutoffs.empty()) throw Error(ErrorKind::Precondition, "cutoff list is empty");
  if (!std::is_sorted(cutoffs.begin(), cutoffs.end()) ||
      std::adjacent_find(cutoffs.begin(), cutoffs.end()) != cutoffs.end() || cutoffs.front() < 1) {
    throw Error(ErrorKind::Precondition, "cutoffs must be positive and strictly increasing");
  }
  XInfinityReport report;
  report.cutoffs = cutoffs;
  report.below_inverse_cutoff = true;
  for (int n : cutoffs) {
    // |b + 1/2| grows in m and in n, so the nearest omitted letters are
    // (N+1, 1) and (1, N+1).
    double best = 0.0;
    double origin = 0.0;
    for (const Letter l : {Letter{n + 1, 1}, Letter{1, n + 1}}) {
      const Complex b = letter_value(l, tau);
      const double reach = 1.0 / (std::abs(b + 0.5) - 0.5);
      if (reach > best) {
        best = reach;
        origin = 1.0 / std::abs(b);
      }
    }
    report.reach.push_back(best);
    report.origin_image.push_back(origin);
    if (best > 1.0 / n) report.below_inverse_cutoff = false;
  }
  report.strictly_decreasing = true;
  for (std::size_t i = 1; i < report.reach.size(); ++i) {
    if (!(report.reach[i] < report.reach[i - 1])) report.strictly_decreasing = false;
  }
  return report;
}

BoxCountResult box_counting_dim(const PointCloud& cloud, double scale_min, double scale_max,
                                int levels) {
  if (cloud.points.size() < 1000) {
    throw Error(ErrorKind::Precondition, "box counting needs at least 1000 points");
  }
  if (!(scale_min > 0.0) || !(scale_min < scale_max) || !(scale_max <= 1.0)) {
    throw Error(ErrorKind::Precondition, "need 0 < scale_min < scale_max <= 1");
  }
  if (levels < 2) throw Error(ErrorKind::Precondition, "box counting needs >= 2 levels");

  BoxCountResult result;
  std::vector<std::uint64_t> keys(cloud.points.size());
  const double ratio = std::log(scale_min / scale_max) / (levels - 1);
  for (int k = 0; k < levels; ++k) {
    const double s = (k == levels - 1) ? scale_min : scale_max * std::exp(ratio * k);
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
      // X sits in [0, 1] x [-1/2, 1/2]; shift so box indices stay nonnegative.
      const auto ix = static_cast<std::uint64_t>(std::floor(cloud.points[i].real() / s) + (1u << 30));
      const auto iy = static_cast<std::uint64_t>(std::floor(cloud.points[i].imag() / s) + (1u << 30));
      keys[i] = (ix << 32) | iy;
    }
    std::sort(keys.begin(), keys.end());
    const auto occupied = std::unique(keys.begin(), keys.end()) - keys.begin();
    result.scales.push_back(s);
    result.counts.push_back(static_cast<std::int64_t>(occupied));
  }

  if (result.counts.front() == result.counts.back()) {
    throw Error(ErrorKind::DegenerateFit, "box counts do not change across scales");
  }
  const auto n = static_cast<double>(levels);
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int k = 0; k < levels; ++k) {
    const double x = -std::log(result.scales[static_cast<std::size_t>(k)]);
    const double y = std::log(static_cast<double>(result.counts[static_cast<std::size_t>(k)]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double cov = sxy - sx * sy / n;
  const double var_x = sxx - sx * sx / n;
  const double var_y = syy - sy * sy / n;
  result.slope = cov / var_x;
  result.r2 = var_y > 0.0 ? std::clamp(cov * cov / (var_x * var_y), 0.0, 1.0) : 0.0;
  return result;
}

void write_cloud_csv(std::ostream& os, const PointCloud& cloud) {
  os << "re,im\n" << std::setprecision(17);
  for (const auto& p : cloud.points) os << p.real() << ',' << p.imag() << '\n';
}

namespace {

void put_le(std::ostream& os, double value) {
  auto bits = std::bit_cast<std::uint64_t>(value);
  char bytes[8];
  for (char& b : bytes) {
    b = static_cast<char>(bits & 0xffu);
    bits >>= 8;
  }
  os.write(bytes, 8);
}

bool get_le(std::istream& is, double& value) {
  unsigned char bytes[8];
  if (!is.read(reinterpret_cast<char*>(bytes), 8)) return false;
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
  value = std::bit_cast<double>(bits);
  return true;
}

}  // namespace

void write_cloud_binary(std::ostream& os, const PointCloud& cloud) {
  os.write("CCF1", 4);
  for (const auto& p : cloud.points) {
    put_le(os, p.real());
    put_le(os, p.imag());
  }
}

std::vector<Complex> read_cloud_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "CCF1", 4) != 0) {
    throw Error(ErrorKind::Io, "not a CCF1 point cloud");
  }
  std::vector<Complex> out;
  double re = 0.0;
  double im = 0.0;
  while (get_le(is, re)) {
    if (!get_le(is, im)) throw Error(ErrorKind::Io, "truncated CCF1 point cloud");
    out.emplace_back(re, im);
  }
  return out;
}

void write_boxcount_csv(std::ostream& os, const BoxCountResult& result) {
  os << "scale,count\n" << std::setprecision(17);
  for (std::size_t i = 0; i < result.scales.size(); ++i) {
    os << result.scales[i] << ',' << result.counts[i] << '\n';
  }
}

}  // namespace ccf
