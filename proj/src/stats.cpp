#include "peec/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace peec {

namespace {

// average rank (1-based) per value, ties share their mid-rank
std::vector<double> mid_ranks(const std::vector<double>& v) {
  size_t n = v.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t i, size_t j) { return v[i] < v[j]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

double betacf(double a, double b, double x) {
  const int kMaxIter = 300;
  const double kEps = 3e-16;
  const double kFpmin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpmin) d = kFpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpmin) d = kFpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpmin) c = kFpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpmin) d = kFpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpmin) c = kFpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                 b * std::log1p(-x);
  double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!std::isfinite(t)) return 0.0;
  if (t == 0.0) return 1.0;
  double x = df / (df + t * t);
  return reg_inc_beta(0.5 * df, 0.5, x);
}

MannWhitneyResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: empty sample");
  size_t na = a.size(), nb = b.size(), n = na + nb;
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<double> ranks = mid_ranks(pooled);

  double ra = 0.0;
  for (size_t i = 0; i < na; ++i) ra += ranks[i];
  MannWhitneyResult res;
  res.u = ra - 0.5 * static_cast<double>(na) * (na + 1);

  // tie term sum(t^3 - t) over tie groups
  std::vector<double> sorted(pooled);
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
    double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }

  double mu = 0.5 * static_cast<double>(na) * static_cast<double>(nb);
  double dn = static_cast<double>(n);
  double var = (static_cast<double>(na) * static_cast<double>(nb) / 12.0) *
               ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (var <= 0.0) {
    res.p = 1.0;
    return res;
  }
  double diff = res.u - mu;
  double cc = diff > 0.0 ? -0.5 : (diff < 0.0 ? 0.5 : 0.0);
  double z = (diff + cc) / std::sqrt(var);
  res.p = std::min(1.0, normal_two_sided_p(z));
  return res;
}

OlsResult ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
  size_t n = x.size();
  if (n != y.size()) throw std::invalid_argument("ols_fit: length mismatch");
  if (n < 3) throw std::invalid_argument("ols_fit: needs at least 3 points");

  double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw std::invalid_argument("ols_fit: x has zero variance");

  OlsResult res;
  res.slope = sxy / sxx;
  res.intercept = my - res.slope * mx;

  double ss_res = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double e = y[i] - (res.intercept + res.slope * x[i]);
    ss_res += e * e;
  }
  res.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 0.0;

  double df = static_cast<double>(n) - 2.0;
  double se2 = ss_res / df / sxx;
  if (se2 <= 0.0) {
    res.p = res.slope == 0.0 ? 1.0 : 0.0;
  } else {
    res.p = student_t_two_sided_p(res.slope / std::sqrt(se2), df);
  }
  return res;
}

std::vector<bool> benjamini_hochberg(const std::vector<double>& p_values, double q) {
  size_t m = p_values.size();
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t i, size_t j) { return p_values[i] < p_values[j]; });

  double threshold = -1.0;
  for (size_t k = m; k >= 1; --k) {
    double pk = p_values[order[k - 1]];
    if (pk <= q * static_cast<double>(k) / static_cast<double>(m)) {
      threshold = pk;
      break;
    }
  }
  std::vector<bool> reject(m, false);
  if (threshold >= 0.0) {
    for (size_t i = 0; i < m; ++i) reject[i] = p_values[i] <= threshold;
  }
  return reject;
}

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("spearman_rho: needs two same-length samples");
  std::vector<double> rx = mid_ranks(x), ry = mid_ranks(y);
  size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double dx = rx[i] - mx, dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double binomial_se(double p, int n) {
  if (n <= 0) throw std::invalid_argument("binomial_se: n must be positive");
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace peec
