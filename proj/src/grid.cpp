#include "fdchk/grid.hpp"

#include <cmath>

#include "fdchk/errors.hpp"

namespace fdchk {

namespace {

void check_axis(double length, int nodes) {
  if (!(length > 0.0) || !std::isfinite(length)) throw PreconditionError("grid: lengths must be positive");
  if (nodes < 8) throw PreconditionError("grid: at least 8 interior nodes per axis required");
}

}  // namespace

GridDomain::GridDomain(double length, int nodes) : dims_(1), lengths_{length, 1.0}, nodes_{nodes, 1} {
  check_axis(length, nodes);
}

GridDomain::GridDomain(double length1, double length2, int nodes1, int nodes2)
    : dims_(2), lengths_{length1, length2}, nodes_{nodes1, nodes2} {
  check_axis(length1, nodes1);
  check_axis(length2, nodes2);
}

std::array<double, 2> GridDomain::coord(std::size_t index) const {
  const auto i = static_cast<int>(index % nodes_[0]);
  const auto j = static_cast<int>(index / nodes_[0]);
  if (dims_ == 1) return {(i + 1) * h(0), 0.0};
  return {(i + 1) * h(0), (j + 1) * h(1)};
}

GridField GridField::zeros(const GridDomain& d) { return {d, std::vector<cplx>(d.size())}; }

GridField GridField::from_function(const GridDomain& d, const std::function<cplx(double, double)>& f) {
  GridField u = zeros(d);
  for (std::size_t k = 0; k < d.size(); ++k) {
    const auto x = d.coord(k);
    u.values[k] = f(x[0], x[1]);
  }
  return u;
}

GridField GridField::from_exprs(const GridDomain& d, const dsl::Expr& re, const dsl::Expr& im) {
  GridField u = zeros(d);
  for (std::size_t k = 0; k < d.size(); ++k) {
    const auto x = d.coord(k);
    const auto b = dsl::Bindings::point(x.data(), static_cast<std::size_t>(d.dims()));
    u.values[k] = {re.eval(b), im.eval(b)};
  }
  return u;
}

double GridField::max_abs() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace fdchk
