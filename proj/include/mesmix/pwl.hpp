#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mesmix/error.hpp"

namespace mesmix {

enum class CurveDefect {
  too_few_breakpoints,
  length_mismatch,
  non_increasing_source,
  non_increasing_target,
  non_finite,
};

/// Monotone conversion curve given by breakpoints (source_k, target_k).
///
/// Both series must be strictly increasing. Construction does not enforce
/// this so that malformed instance data can be reported instead of thrown;
/// every operation on a curve checks validity first.
template <typename Scalar>
class PiecewiseLinear {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  PiecewiseLinear() = default;
  PiecewiseLinear(Vector source, Vector target)
      : source_(std::move(source)), target_(std::move(target)) {}
  PiecewiseLinear(std::initializer_list<Scalar> source, std::initializer_list<Scalar> target)
      : source_(static_cast<Eigen::Index>(source.size())),
        target_(static_cast<Eigen::Index>(target.size())) {
    std::copy(source.begin(), source.end(), source_.data());
    std::copy(target.begin(), target.end(), target_.data());
  }

  const Vector& source() const { return source_; }
  const Vector& target() const { return target_; }

  /// Number of breakpoints.
  Eigen::Index size() const { return source_.size(); }
  Eigen::Index segments() const { return size() > 0 ? size() - 1 : 0; }

  Scalar source_min() const { return source_(0); }
  Scalar source_max() const { return source_(size() - 1); }
  Scalar target_min() const { return target_(0); }
  Scalar target_max() const { return target_(size() - 1); }

  Scalar segment_length(Eigen::Index k) const { return source_(k + 1) - source_(k); }
  Scalar slope(Eigen::Index k) const {
    return (target_(k + 1) - target_(k)) / (source_(k + 1) - source_(k));
  }

  std::optional<CurveDefect> defect() const {
    if (source_.size() != target_.size()) return CurveDefect::length_mismatch;
    if (source_.size() < 2) return CurveDefect::too_few_breakpoints;
    if (!source_.allFinite() || !target_.allFinite()) return CurveDefect::non_finite;
    for (Eigen::Index k = 1; k < size(); ++k)
      if (!(source_(k) > source_(k - 1))) return CurveDefect::non_increasing_source;
    for (Eigen::Index k = 1; k < size(); ++k)
      if (!(target_(k) > target_(k - 1))) return CurveDefect::non_increasing_target;
    return std::nullopt;
  }

  bool valid() const { return !defect().has_value(); }

  friend bool operator==(const PiecewiseLinear& a, const PiecewiseLinear& b) {
    return a.source_.size() == b.source_.size() && a.target_.size() == b.target_.size() &&
           a.source_ == b.source_ && a.target_ == b.target_;
  }

 private:
  Vector source_;
  Vector target_;
};

using Curve = PiecewiseLinear<double>;

inline const char* to_string(CurveDefect defect) {
  switch (defect) {
    case CurveDefect::too_few_breakpoints: return "too few breakpoints";
    case CurveDefect::length_mismatch: return "source/target length mismatch";
    case CurveDefect::non_increasing_source: return "source series not strictly increasing";
    case CurveDefect::non_increasing_target: return "target series not strictly increasing";
    case CurveDefect::non_finite: return "non-finite breakpoint";
  }
  return "invalid curve";
}

namespace detail {

template <typename Scalar>
void require_valid(const PiecewiseLinear<Scalar>& f) {
  if (auto d = f.defect()) throw InvalidCurve(to_string(*d));
}

template <typename Scalar>
Scalar domain_slack(Scalar lo, Scalar hi) {
  using std::abs;
  using std::max;
  return Scalar(1e-12) * max({Scalar(1), abs(lo), abs(hi)});
}

}  // namespace detail

/// Linear interpolation between the bracketing breakpoints; exact at breakpoints.
template <typename Scalar>
Scalar evaluate(const PiecewiseLinear<Scalar>& f, Scalar x) {
  detail::require_valid(f);
  const auto& xs = f.source();
  const auto& ys = f.target();
  const Eigen::Index n = f.size();
  const Scalar slack = detail::domain_slack(xs(0), xs(n - 1));
  if (!(x >= xs(0) - slack) || !(x <= xs(n - 1) + slack))
    throw OutOfDomain("x outside curve domain");
  if (x <= xs(0)) return ys(0);
  if (x >= xs(n - 1)) return ys(n - 1);
  const Scalar* first = xs.data();
  const Scalar* hit = std::upper_bound(first, first + n, x);
  const Eigen::Index k = static_cast<Eigen::Index>(hit - first) - 1;  // xs(k) <= x < xs(k+1)
  if (x == xs(k)) return ys(k);
  return ys(k) + (x - xs(k)) * (ys(k + 1) - ys(k)) / (xs(k + 1) - xs(k));
}

/// Curve with source and target swapped.
template <typename Scalar>
PiecewiseLinear<Scalar> inverse(const PiecewiseLinear<Scalar>& f) {
  detail::require_valid(f);
  return PiecewiseLinear<Scalar>(f.target(), f.source());
}

/// The curve equal to applying `phi` first and then `psi`.
///
/// Breakpoints are the images of phi's abscissae under psi together with the
/// preimages of psi's abscissae under phi, sorted by source value. The range
/// of phi must lie inside the domain of psi.
template <typename Scalar>
PiecewiseLinear<Scalar> compose(const PiecewiseLinear<Scalar>& phi, const PiecewiseLinear<Scalar>& psi) {
  detail::require_valid(phi);
  detail::require_valid(psi);
  const Scalar slack = detail::domain_slack(psi.source_min(), psi.source_max());
  if (phi.target_min() < psi.source_min() - slack || phi.target_max() > psi.source_max() + slack)
    throw DomainMismatch("range of the first curve is not contained in the domain of the second");

  std::vector<std::pair<Scalar, Scalar>> points;
  points.reserve(static_cast<std::size_t>(phi.size() + psi.size()));
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    Scalar y = std::clamp(phi.target()(i), psi.source_min(), psi.source_max());
    points.emplace_back(phi.source()(i), evaluate(psi, y));
  }
  const auto phi_inv = inverse(phi);
  for (Eigen::Index j = 0; j < psi.size(); ++j) {
    const Scalar ybar = psi.source()(j);
    if (ybar < phi.target_min() || ybar > phi.target_max()) continue;
    points.emplace_back(evaluate(phi_inv, ybar), psi.target()(j));
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  using std::abs;
  std::vector<std::pair<Scalar, Scalar>> unique;
  unique.reserve(points.size());
  for (const auto& p : points) {
    if (!unique.empty()) {
      const auto& q = unique.back();
      const Scalar dx = abs(p.first - q.first);
      const Scalar dz = abs(p.second - q.second);
      if (dx <= Scalar(1e-12) && dz <= Scalar(1e-12)) continue;
      // Rounding can separate one mathematical breakpoint into two nearby ones.
      if (dx <= Scalar(1e-12) * std::max(Scalar(1), abs(p.first))) continue;
    }
    unique.push_back(p);
  }

  typename PiecewiseLinear<Scalar>::Vector xs(static_cast<Eigen::Index>(unique.size()));
  typename PiecewiseLinear<Scalar>::Vector zs(static_cast<Eigen::Index>(unique.size()));
  for (std::size_t k = 0; k < unique.size(); ++k) {
    xs(static_cast<Eigen::Index>(k)) = unique[k].first;
    zs(static_cast<Eigen::Index>(k)) = unique[k].second;
  }
  return PiecewiseLinear<Scalar>(std::move(xs), std::move(zs));
}

/// Identity curve on [lo, hi].
template <typename Scalar>
PiecewiseLinear<Scalar> identity_curve(Scalar lo, Scalar hi) {
  return PiecewiseLinear<Scalar>({lo, hi}, {lo, hi});
}

/// Largest segment slope.
template <typename Scalar>
Scalar max_slope(const PiecewiseLinear<Scalar>& f) {
  detail::require_valid(f);
  Scalar best = f.slope(0);
  for (Eigen::Index k = 1; k < f.segments(); ++k) best = std::max(best, f.slope(k));
  return best;
}

}  // namespace mesmix
