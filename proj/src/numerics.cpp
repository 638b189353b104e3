#include "leocov/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>

#include "leocov/errors.hpp"

namespace leocov::numerics {

SeriesResult sum_series(const SeriesSpec& spec) {
  if (!(spec.tolerance > 0.0)) throw InvalidParameter("series tolerance must be > 0");
  if (spec.max_terms < 1) throw InvalidParameter("series max_terms must be >= 1");
  if (!spec.next) throw InvalidParameter("series generator is empty");

  double sum = 0.0;
  double tail = std::numeric_limits<double>::infinity();
  for (std::size_t z = 0; z < spec.max_terms; ++z) {
    const SeriesTerm t = spec.next(z);
    sum += t.value;
    tail = t.tail_bound;
    if (tail < spec.tolerance) return {sum, z + 1, tail};
  }
  throw NonConvergence("series tail not certified after " + std::to_string(spec.max_terms) +
                           " terms",
                       sum, spec.max_terms);
}

namespace {

// QUADPACK qk15 abscissae and weights. Odd indices carry the 7-point Gauss rule.
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
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  std::size_t order;  // tie-breaker so the queue is deterministic
};

struct SegmentLess {
  bool operator()(const Segment& l, const Segment& r) const {
    if (l.error != r.error) return l.error < r.error;
    return l.order > r.order;
  }
};

// A piece of the support in a transformed variable t in [0, 1].
class Piece {
 public:
  enum class Map { Identity, Smooth, HalfLine };

  Piece(const std::function<double(double)>& f, double lo, double hi, Map map)
      : f_(f), lo_(lo), hi_(hi), map_(map) {}

  double operator()(double t) const {
    switch (map_) {
      case Map::Identity:
        return f_(lo_ + (hi_ - lo_) * t);
      case Map::Smooth: {
        const double w = hi_ - lo_;
        const double x = lo_ + w * t * t * (3.0 - 2.0 * t);
        const double jac = 6.0 * w * t * (1.0 - t);
        return jac == 0.0 ? 0.0 : f_(x) * jac;
      }
      case Map::HalfLine: {
        const double s = 1.0 - t;
        if (s <= 0.0) return 0.0;
        return f_(lo_ + t / s) / (s * s);
      }
    }
    return 0.0;
  }

 private:
  const std::function<double(double)>& f_;
  double lo_;
  double hi_;
  Map map_;
};

template <typename F>
void kronrod15(const F& f, double a, double b, double& value, double& error) {
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double fc = f(centr);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::fabs(resk);
  std::array<double, 7> fv1{};
  std::array<double, 7> fv2{};
  for (int j = 0; j < 7; ++j) {
    const double absc = hlgth * kXgk[j];
    const double f1 = f(centr - absc);
    const double f2 = f(centr + absc);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));
  }
  value = resk * hlgth;
  resasc *= std::fabs(hlgth);
  resabs *= std::fabs(hlgth);
  error = std::fabs((resk - resg) * hlgth);
  if (resasc != 0.0 && error != 0.0) {
    error = resasc * std::min(1.0, std::pow(200.0 * error / resasc, 1.5));
  }
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    error = std::max(50.0 * kEps * resabs, error);
  }
}

}  // namespace

QuadratureResult integrate(const QuadratureSpec& spec) {
  if (!spec.integrand) throw InvalidParameter("quadrature integrand is empty");
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0)) {
    throw InvalidParameter("quadrature tolerances must be > 0");
  }
  if (!std::is_sorted(spec.breakpoints.begin(), spec.breakpoints.end())) {
    throw InvalidParameter("quadrature breakpoints must be sorted");
  }
  if (std::isnan(spec.lower) || std::isnan(spec.upper) || std::isinf(spec.lower)) {
    throw InvalidParameter("quadrature lower limit must be finite");
  }
  if (spec.upper <= spec.lower) return {0.0, 0.0, 0};

  std::vector<double> edges{spec.lower};
  for (double p : spec.breakpoints) {
    if (p > edges.back() && p < spec.upper) edges.push_back(p);
  }
  edges.push_back(spec.upper);

  std::vector<Piece> pieces;
  pieces.reserve(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    Piece::Map map = spec.endpoint_smoothing ? Piece::Map::Smooth : Piece::Map::Identity;
    if (std::isinf(edges[i + 1])) map = Piece::Map::HalfLine;
    pieces.emplace_back(spec.integrand, edges[i], edges[i + 1], map);
  }

  // Each queue entry refers to a sub-interval of one piece in its t variable.
  struct Entry {
    Segment seg;
    std::size_t piece;
  };
  auto less = [](const Entry& l, const Entry& r) { return SegmentLess{}(l.seg, r.seg); };
  std::priority_queue<Entry, std::vector<Entry>, decltype(less)> queue(less);

  std::size_t order = 0;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    Segment s{0.0, 1.0, 0.0, 0.0, order++};
    kronrod15(pieces[p], s.a, s.b, s.value, s.error);
    total += s.value;
    total_err += s.error;
    queue.push({s, p});
  }

  auto target = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::fabs(total)); };
  std::size_t intervals = pieces.size();
  while (total_err > target()) {
    if (intervals >= spec.max_intervals || queue.empty()) {
      throw QuadratureError("quadrature tolerance not met (estimate " + std::to_string(total) +
                                ", error bound " + std::to_string(total_err) + ")",
                            total, total_err);
    }
    const Entry worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.seg.a + worst.seg.b);
    if (!(mid > worst.seg.a && mid < worst.seg.b)) {
      throw QuadratureError("quadrature interval cannot be subdivided further", total, total_err);
    }
    Segment left{worst.seg.a, mid, 0.0, 0.0, order++};
    Segment right{mid, worst.seg.b, 0.0, 0.0, order++};
    kronrod15(pieces[worst.piece], left.a, left.b, left.value, left.error);
    kronrod15(pieces[worst.piece], right.a, right.b, right.value, right.error);
    total += left.value + right.value - worst.seg.value;
    total_err += left.error + right.error - worst.seg.error;
    queue.push({left, worst.piece});
    queue.push({right, worst.piece});
    ++intervals;
  }

  // Re-sum from the leaves so the running update does not leak rounding.
  double value = 0.0;
  double error = 0.0;
  std::vector<Entry> leaves;
  leaves.reserve(queue.size());
  while (!queue.empty()) {
    leaves.push_back(queue.top());
    queue.pop();
  }
  std::sort(leaves.begin(), leaves.end(), [](const Entry& l, const Entry& r) {
    if (l.piece != r.piece) return l.piece < r.piece;
    return l.seg.a < r.seg.a;
  });
  for (const Entry& e : leaves) {
    value += e.seg.value;
    error += e.seg.error;
  }
  return {value, error, intervals};
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol,
              std::size_t max_iter) {
  if (!(x_tol > 0.0)) throw InvalidParameter("bisection tolerance must be > 0");
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi)) {
    throw InvalidParameter("bisection bracket does not change sign");
  }
  for (std::size_t i = 0; i < max_iter && (hi - lo) > x_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace leocov::numerics
