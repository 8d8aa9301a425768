#include "canonlab/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "canonlab/error.hpp"

namespace canonlab {

namespace {

bool finite_opt(const std::optional<double>& v) { return !v || std::isfinite(*v); }

}  // namespace

PLConvexFn::PLConvexFn(std::optional<double> lower, std::optional<double> upper, std::vector<double> breakpoints,
                       std::vector<double> slopes, double anchor_x, double anchor_value)
    : lower_(lower), upper_(upper) {
  if (!finite_opt(lower_) || !finite_opt(upper_) || !std::isfinite(anchor_x) || !std::isfinite(anchor_value))
    throw InvalidInput("PL function data must be finite");
  if (lower_ && upper_ && *lower_ > *upper_) throw InvalidInput("empty domain (improper function)");
  if (slopes.size() != breakpoints.size() + 1)
    throw InvalidInput("need exactly one more slope than breakpoints");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!std::isfinite(breakpoints[i])) throw InvalidInput("breakpoint is not finite");
    if (i > 0 && !(breakpoints[i - 1] < breakpoints[i]))
      throw InvalidInput("breakpoints must be strictly increasing");
    if ((lower_ && breakpoints[i] <= *lower_) || (upper_ && breakpoints[i] >= *upper_))
      throw InvalidInput("breakpoint outside the open domain");
  }
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    if (!std::isfinite(slopes[i])) throw InvalidInput("slope is not finite");
    if (i > 0 && slopes[i] < slopes[i - 1]) throw InvalidInput("slopes must be nondecreasing (convexity)");
  }
  if (is_point()) {
    if (!breakpoints.empty()) throw InvalidInput("one-point domain cannot carry breakpoints");
    slopes_ = {0.0};
    base_x_ = *lower_;
    base_value_ = anchor_value;
    if (std::abs(anchor_x - *lower_) > kTolerance) throw InvalidInput("anchor outside the domain");
    return;
  }

  // Values at the raw breakpoints from the anchor, before merging.
  breaks_ = std::move(breakpoints);
  slopes_ = std::move(slopes);
  base_x_ = anchor_x;
  base_value_ = anchor_value;
  if (!in_domain(anchor_x)) throw InvalidInput("anchor outside the domain");
  {
    // Integrate slopes outward from the anchor.
    std::vector<double> vals(breaks_.size());
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), anchor_x);
    const std::size_t seg = static_cast<std::size_t>(it - breaks_.begin());
    // breakpoints to the right of the anchor
    double x = anchor_x, v = anchor_value;
    for (std::size_t i = seg; i < breaks_.size(); ++i) {
      v += slopes_[i] * (breaks_[i] - x);
      x = breaks_[i];
      vals[i] = v;
    }
    x = anchor_x;
    v = anchor_value;
    for (std::size_t i = seg; i-- > 0;) {
      v -= slopes_[i + 1] * (x - breaks_[i]);
      x = breaks_[i];
      vals[i] = v;
    }
    values_ = std::move(vals);
  }

  // Merge equal neighbouring slopes.
  std::vector<double> b, s{slopes_[0]}, v;
  for (std::size_t i = 0; i < breaks_.size(); ++i) {
    if (slopes_[i + 1] == s.back()) continue;
    b.push_back(breaks_[i]);
    v.push_back(values_[i]);
    s.push_back(slopes_[i + 1]);
  }
  breaks_ = std::move(b);
  slopes_ = std::move(s);
  values_ = std::move(v);
  if (breaks_.empty()) {
    // A single affine piece; re-anchor canonically.
    const double ax = this->anchor_x();
    base_value_ = base_value_ + slopes_[0] * (ax - base_x_);
    base_x_ = ax;
  } else {
    base_x_ = breaks_.front();
    base_value_ = values_.front();
  }
}

PLConvexFn PLConvexFn::linear(double slope, double intercept) {
  return PLConvexFn(std::nullopt, std::nullopt, {}, {slope}, 0.0, intercept);
}

PLConvexFn PLConvexFn::absolute() { return PLConvexFn(std::nullopt, std::nullopt, {0.0}, {-1.0, 1.0}, 0.0, 0.0); }

PLConvexFn PLConvexFn::hinge_mean(std::span<const double> values, double scale) {
  if (!(scale > 0.0)) throw InvalidInput("hinge scale must be positive");
  if (values.empty()) throw InvalidInput("hinge_mean needs at least one value");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<double> breaks, slopes{0.0};
  std::size_t below = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    below = j;
    breaks.push_back(sorted[i] / scale);
    slopes.push_back(scale * static_cast<double>(below) / n);
    i = j;
  }
  return PLConvexFn(std::nullopt, std::nullopt, std::move(breaks), std::move(slopes), sorted.front() / scale, 0.0);
}

double PLConvexFn::anchor_x() const {
  if (!breaks_.empty()) return breaks_.front();
  if (lower_) return *lower_;
  if (upper_) return *upper_;
  return 0.0;
}

bool PLConvexFn::in_domain(double x, double tol) const {
  if (lower_ && x < *lower_ - tol) return false;
  if (upper_ && x > *upper_ + tol) return false;
  return true;
}

double PLConvexFn::eval_unchecked(double x) const {
  if (breaks_.empty()) return base_value_ + slopes_[0] * (x - base_x_);
  if (x <= breaks_.front()) return values_.front() + slopes_[0] * (x - breaks_.front());
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - breaks_.begin()) - 1;
  return values_[i] + slopes_[i + 1] * (x - breaks_[i]);
}

double PLConvexFn::operator()(double x) const {
  if (!in_domain(x)) throw InvalidInput("point " + std::to_string(x) + " is outside the finiteness domain");
  if (is_point()) return base_value_;
  if (lower_) x = std::max(x, *lower_);
  if (upper_) x = std::min(x, *upper_);
  return eval_unchecked(x);
}

// ---------------------------------------------------------------------------

PLConvexFn conjugate(const PLConvexFn& phi) {
  // Slopes become breakpoints and breakpoints (plus finite domain ends) become slopes.
  const auto& s = phi.slopes();
  const auto& b = phi.breakpoints();

  std::optional<double> lower, upper;
  if (!phi.lower()) lower = s.front();
  if (!phi.upper()) upper = s.back();

  std::vector<double> cslopes;
  if (phi.lower()) cslopes.push_back(*phi.lower());
  cslopes.insert(cslopes.end(), b.begin(), b.end());
  if (phi.upper()) cslopes.push_back(*phi.upper());

  std::vector<double> cbreaks;
  if (phi.is_point()) {
    // Domain {c}: φ*(t) = tc − φ(c), affine on ℝ.
    const double c = *phi.lower();
    return PLConvexFn(std::nullopt, std::nullopt, {}, {c}, 0.0, -phi(c));
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i == 0 && !phi.lower()) continue;
    if (i + 1 == s.size() && !phi.upper()) continue;
    cbreaks.push_back(s[i]);
  }

  const double t0 = s.front();
  const double x0 = b.empty() ? phi.anchor_x() : b.front();
  const double value = t0 * x0 - phi(x0);

  if (lower && upper && *lower == *upper) return PLConvexFn(lower, upper, {}, {0.0}, t0, value);
  // Distinct slopes of φ are strictly increasing after merging, so the
  // conjugate's breakpoints are strictly increasing as well.
  return PLConvexFn(lower, upper, std::move(cbreaks), std::move(cslopes), t0, value);
}

PLConvexFn biconjugate(const PLConvexFn& phi) { return conjugate(conjugate(phi)); }

OneSided one_sided_derivs(const PLConvexFn& phi, double x) {
  if (!phi.in_domain(x)) throw InvalidInput("derivative requested outside the closed domain");
  OneSided d;
  if (phi.is_point()) return d;
  const auto& b = phi.breakpoints();
  const auto& s = phi.slopes();
  // Segment index and breakpoint snapping at the library tolerance.
  std::size_t seg = static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), x) - b.begin());
  bool at_break = false;
  std::size_t bi = 0;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (std::abs(x - b[i]) <= kTolerance) {
      at_break = true;
      bi = i;
      break;
    }
  if (at_break) {
    d.left = s[bi];
    d.right = s[bi + 1];
  } else {
    d.left = s[seg];
    d.right = s[seg];
  }
  if (phi.lower() && x <= *phi.lower() + kTolerance) d.left.reset();
  if (phi.upper() && x >= *phi.upper() - kTolerance) d.right.reset();
  return d;
}

namespace {

bool between(const OneSided& d, double v) {
  const bool above_left = !d.left || *d.left <= v + kTolerance;
  const bool below_right = !d.right || v <= *d.right + kTolerance;
  return above_left && below_right;
}

}  // namespace

Attainment attainment_check(const PLConvexFn& phi, double x, double t) {
  const PLConvexFn star = conjugate(phi);
  if (!phi.in_domain(x)) throw InvalidInput("x is outside the domain of φ");
  if (!star.in_domain(t)) throw InvalidInput("t is outside the domain of φ*");
  Attainment a;
  a.equality = std::abs(phi(x) + star(t) - t * x) <= kTolerance;
  a.conjugate_subgradient = between(one_sided_derivs(star, t), x);
  a.subgradient = between(one_sided_derivs(phi, x), t);
  return a;
}

bool approx_equal(const PLConvexFn& a, const PLConvexFn& b, double tol) {
  auto same_bound = [tol](const std::optional<double>& u, const std::optional<double>& v) {
    if (u.has_value() != v.has_value()) return false;
    return !u || std::abs(*u - *v) <= tol;
  };
  if (!same_bound(a.lower(), b.lower()) || !same_bound(a.upper(), b.upper())) return false;
  if (a.breakpoints().size() != b.breakpoints().size()) return false;
  for (std::size_t i = 0; i < a.breakpoints().size(); ++i) {
    if (std::abs(a.breakpoints()[i] - b.breakpoints()[i]) > tol) return false;
    if (std::abs(a.break_values()[i] - b.break_values()[i]) > tol) return false;
  }
  for (std::size_t i = 0; i < a.slopes().size(); ++i)
    if (std::abs(a.slopes()[i] - b.slopes()[i]) > tol) return false;
  return std::abs(a.anchor_value() - b.anchor_value()) <= tol;
}

}  // namespace canonlab
