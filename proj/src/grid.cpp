#include <algorithm>
#include <cmath>

#include "blowup/domain.hpp"
#include "blowup/errors.hpp"

namespace blowup {

void DomainSpec::validate() const {
  if (resolution < 16) throw InvalidParameter("domain: resolution must be >= 16");
  if (is_ball()) {
    if (!(ball().radius > 0.0)) throw GeometryError("domain: ball radius must be positive");
  } else {
    const Box& b = box();
    if (!((b.hi - b.lo).minCoeff() > 0.0))
      throw GeometryError("domain: box hi must strictly dominate lo");
  }
}

double DomainSpec::inside_distance(const Point& x) const {
  if (is_ball()) return ball().radius - (x - ball().center).norm();
  const Box& b = box();
  return std::min((x - b.lo).minCoeff(), (b.hi - x).minCoeff());
}

double DomainSpec::diameter() const {
  if (is_ball()) return 2.0 * ball().radius;
  return (box().hi - box().lo).norm();
}

Grid::Grid(const DomainSpec& dom) : dom_(dom), n_(dom.resolution) {
  dom.validate();
  Point hi;
  if (dom.is_ball()) {
    lo_ = dom.ball().center - Point::Constant(dom.ball().radius);
    hi = dom.ball().center + Point::Constant(dom.ball().radius);
  } else {
    lo_ = dom.box().lo;
    hi = dom.box().hi;
  }
  h_ = (hi - lo_) / static_cast<double>(n_ - 1);

  interior_.assign(size(), 0);
  // a node sitting (numerically) on the sphere is a boundary node
  const double eps = 1e-12 * hmax();
  for (int k = 1; k < n_ - 1; ++k)
    for (int j = 1; j < n_ - 1; ++j)
      for (int i = 1; i < n_ - 1; ++i)
        interior_[index(i, j, k)] = dom.inside_distance(node(i, j, k)) > eps ? 1 : 0;
}

}  // namespace blowup
