#pragma once

#include <array>
#include <functional>
#include <vector>

#include "fdchk/dsl.hpp"
#include "fdchk/linalg.hpp"

namespace fdchk {

/// Rectangle [0, L1] x [0, L2] (or interval [0, L]) with a uniform grid of
/// interior nodes. Values outside the interior are zero (Dirichlet).
class GridDomain {
 public:
  GridDomain(double length, int nodes);                                   // 1D
  GridDomain(double length1, double length2, int nodes1, int nodes2);    // 2D

  static GridDomain unit_square(int nodes) { return {1.0, 1.0, nodes, nodes}; }

  int dims() const { return dims_; }
  double length(int axis) const { return lengths_[axis]; }
  int nodes(int axis) const { return nodes_[axis]; }
  double h(int axis) const { return lengths_[axis] / (nodes_[axis] + 1); }
  std::size_t size() const { return static_cast<std::size_t>(nodes_[0]) * nodes_[1]; }
  double measure() const { return lengths_[0] * lengths_[1]; }

  /// Measure carried by each interior node; the weights sum to the domain measure.
  double node_weight() const { return measure() / static_cast<double>(size()); }
  /// Volume element of one edge/cell quadrature point (h or h1*h2).
  double cell_volume() const { return dims_ == 1 ? h(0) : h(0) * h(1); }

  std::size_t index(int i, int j = 0) const { return static_cast<std::size_t>(j) * nodes_[0] + i; }
  std::array<double, 2> coord(std::size_t index) const;

  bool operator==(const GridDomain& o) const = default;

 private:
  int dims_;
  std::array<double, 2> lengths_;
  std::array<int, 2> nodes_;
};

/// Complex samples at the interior nodes of a GridDomain.
struct GridField {
  GridDomain domain;
  std::vector<cplx> values;

  static GridField zeros(const GridDomain& d);
  static GridField from_function(const GridDomain& d, const std::function<cplx(double, double)>& f);
  static GridField from_exprs(const GridDomain& d, const dsl::Expr& re, const dsl::Expr& im);

  double max_abs() const;
};

}  // namespace fdchk
