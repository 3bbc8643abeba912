#include "matukuma/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "matukuma/errors.hpp"

namespace matukuma::quad {
namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights at kXgk[1], kXgk[3], kXgk[5], kXgk[7].
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double a, b, value, error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

Interval gk15(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    resk += kWgk[j] * (f1[j] + f2[j]);
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  resk *= half;
  resg *= half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);

  double err = std::abs(resk - resg);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50 * eps))
    err = std::max(err, 50 * eps * resabs);
  if (!std::isfinite(resk)) {
    std::ostringstream os;
    os << "non-finite integrand on [" << a << ", " << b << "]";
    throw QuadratureError(a, b, os.str());
  }
  return {a, b, resk, err};
}

}  // namespace

Result adaptive(const Integrand& f, std::span<const double> points, double rel_tol, double abs_tol,
                int max_intervals) {
  if (points.size() < 2) throw DomainError("quadrature needs at least two points");
  std::priority_queue<Interval> heap;
  Result out;
  double value = 0.0, error = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] >= points[i])) throw DomainError("quadrature points must be sorted");
    if (points[i + 1] == points[i]) continue;
    Interval iv = gk15(f, points[i], points[i + 1]);
    out.evaluations += 15;
    value += iv.value;
    error += iv.error;
    heap.push(iv);
  }
  // Intervals too narrow to split are retired here and no longer refined.
  double frozen_error = 0.0;
  while (!heap.empty()) {
    const double target = std::max(abs_tol, rel_tol * std::abs(value));
    if (error <= target) break;
    if (static_cast<int>(heap.size()) >= max_intervals) {
      const Interval worst = heap.top();
      std::ostringstream os;
      os << "adaptive quadrature did not converge: error " << error << " > target " << target
         << ", worst subinterval [" << worst.a << ", " << worst.b << "]";
      throw QuadratureError(worst.a, worst.b, os.str());
    }
    Interval iv = heap.top();
    heap.pop();
    const double mid = 0.5 * (iv.a + iv.b);
    if (!(mid > iv.a && mid < iv.b) ||
        (iv.b - iv.a) < 64 * std::numeric_limits<double>::epsilon() * std::abs(mid)) {
      frozen_error += iv.error;
      if (heap.empty() || frozen_error > target) {
        std::ostringstream os;
        os << "adaptive quadrature hit resolution limit on [" << iv.a << ", " << iv.b << "]";
        throw QuadratureError(iv.a, iv.b, os.str());
      }
      continue;
    }
    Interval left = gk15(f, iv.a, mid);
    Interval right = gk15(f, mid, iv.b);
    out.evaluations += 30;
    value += left.value + right.value - iv.value;
    error += left.error + right.error - iv.error;
    heap.push(left);
    heap.push(right);
  }
  // Resum to limit accumulated cancellation from incremental updates.
  double sum = 0.0, esum = frozen_error;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  out.value = sum;
  out.error = esum;
  return out;
}

Result integrate(const Integrand& f, double a, double b, double rel_tol, double abs_tol) {
  if (a == b) return {};
  if (a > b) {
    Result r = integrate(f, b, a, rel_tol, abs_tol);
    r.value = -r.value;
    return r;
  }
  const std::array<double, 2> pts{a, b};
  return adaptive(f, pts, rel_tol, abs_tol);
}

std::vector<double> log_breakpoints(double a, double b) {
  std::vector<double> pts;
  if (a == 0.0) {
    pts.push_back(0.0);
    a = b * 1e-12;
  }
  pts.push_back(a);
  double next = std::pow(10.0, std::floor(std::log10(a)) + 1.0);
  while (next < b * (1 - 1e-12)) {
    if (next > a * (1 + 1e-12)) pts.push_back(next);
    next *= 10.0;
  }
  pts.push_back(b);
  return pts;
}

Result integrate_log(const Integrand& f, double a, double b, double rel_tol, double abs_tol) {
  if (a == b) return {};
  if (!(a >= 0.0 && b > a)) throw DomainError("integrate_log requires 0 <= a < b");
  const auto pts = log_breakpoints(a, b);
  return adaptive(f, pts, rel_tol, abs_tol);
}

}  // namespace matukuma::quad
