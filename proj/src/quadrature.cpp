#include "bm/quadrature.hpp"

#include <algorithm>
#include <array>
#include <vector>

namespace bm {
namespace {

struct SimpsonPanel {
  double a, fa, m, fm, b, fb, whole;
};

double simpson(double a, double fa, double fm, double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double refine(const std::function<double(double)>& f, const SimpsonPanel& p, double abs_tol,
              double rel_tol, int depth) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(p.a, p.fa, flm, p.m, p.fm);
  const double right = simpson(p.m, p.fm, frm, p.b, p.fb);
  const double delta = left + right - p.whole;
  const double budget = std::max(abs_tol, rel_tol * std::abs(left + right));
  if (depth <= 0 || std::abs(delta) <= 15.0 * budget) return left + right + delta / 15.0;
  return refine(f, {p.a, p.fa, lm, flm, p.m, p.fm, left}, 0.5 * abs_tol, rel_tol, depth - 1) +
         refine(f, {p.m, p.fm, rm, frm, p.b, p.fb, right}, 0.5 * abs_tol, rel_tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        QuadratureTolerance tol) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const SimpsonPanel whole{a, fa, m, fm, b, fb, simpson(a, fa, fm, b, fb)};
  return refine(f, whole, tol.absolute, tol.relative, tol.max_depth);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        std::span<const double> breakpoints, QuadratureTolerance tol) {
  if (a == b) return 0.0;
  const double sign = a < b ? 1.0 : -1.0;
  const double lo = std::min(a, b), hi = std::max(a, b);
  std::vector<double> cuts{lo};
  for (double c : breakpoints)
    if (c > lo && c < hi) cuts.push_back(c);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) sum += adaptive_simpson(f, cuts[i], cuts[i + 1], tol);
  return sign * sum;
}

double gauss_legendre20(const std::function<double(double)>& f, double a, double b) {
  static constexpr std::array<double, 10> nodes = {
      0.0765265211334973337546404, 0.2277858511416450780804962, 0.3737060887154195606725482,
      0.5108670019508270980043641, 0.6360536807265150254528367, 0.7463319064601507926143051,
      0.8391169718222188233945291, 0.9122344282513259058677524, 0.9639719272779137912676661,
      0.9931285991850949247861224};
  static constexpr std::array<double, 10> weights = {
      0.1527533871307258506980843, 0.1491729864726037467878287, 0.1420961093183820513292983,
      0.1316886384491766268984945, 0.1181945319615184173123774, 0.1019301198172404350367501,
      0.0832767415767047487247581, 0.0626720483341090635695065, 0.0406014298003869413310400,
      0.0176140071391521183118620};
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    sum += weights[i] * (f(mid - half * nodes[i]) + f(mid + half * nodes[i]));
  return half * sum;
}

}  // namespace bm
