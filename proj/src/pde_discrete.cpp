#include <algorithm>
#include <cmath>

#include "fdchk/errors.hpp"
#include "fdchk/pde.hpp"

namespace fdchk {

namespace {

struct Grad {
  cplx g[2];
};

Grad gradient(const QuadPoint& p, const std::vector<cplx>& u) {
  Grad out{};
  for (int c = 0; c < p.count; ++c) {
    if (p.node[c] < 0) continue;
    const cplx v = u[static_cast<std::size_t>(p.node[c])];
    out.g[0] += p.g[0][c] * v;
    out.g[1] += p.g[1][c] * v;
  }
  return out;
}

void check_field(const DiscreteOperatorData& op, const GridField& u) {
  if (!(u.domain == op.domain())) throw PreconditionError("field and operator live on different grids");
}

}  // namespace

namespace {

// Accumulates stencil entries, merging repeated nodes.
struct StencilBuilder {
  QuadPoint p;

  void add(std::int32_t node, double gx, double gy, double av) {
    for (int c = 0; c < p.count; ++c) {
      if (p.node[c] == node) {
        p.g[0][c] += gx;
        p.g[1][c] += gy;
        p.avg[c] += av;
        return;
      }
    }
    const int c = p.count++;
    p.node[c] = node;
    p.g[0][c] = gx;
    p.g[1][c] = gy;
    p.avg[c] = av;
  }
};

// Full index I in [-1, n+2] -> (interior index, sign); boundary nodes are zero
// and the ghost layer beyond them is the odd reflection.
// Midpoint-rule weight of cell k among m, corrected at both ends.
double end_weight(int k, int m) {
  static constexpr double c[3] = {26.0 / 24.0, 21.0 / 24.0, 25.0 / 24.0};
  const int e = std::min(k, m - 1 - k);
  return e < 3 ? c[e] : 1.0;
}

std::pair<int, double> resolve(int I, int n) {
  if (I >= 1 && I <= n) return {I, 1.0};
  if (I == -1) return {1, -1.0};
  if (I == n + 2) return {n, -1.0};
  return {0, 0.0};
}

}  // namespace

DiscreteOperatorData::DiscreteOperatorData(const MatrixField& a, const GridDomain& domain) : domain_(domain) {
  if (a.dimension() != static_cast<std::size_t>(domain.dims()))
    throw PreconditionError("matrix dimension does not match the grid dimension");
  const bool two = domain.dims() == 2;
  const int n1 = domain.nodes(0), n2 = two ? domain.nodes(1) : 1;
  const double h1 = domain.h(0), h2 = two ? domain.h(1) : 1.0;
  auto node = [&](int I, int J) {
    return static_cast<std::int32_t>(two ? domain.index(I - 1, J - 1) : static_cast<std::size_t>(I - 1));
  };
  auto edge = [&](std::array<double, 2> x, int axis, std::array<int, 2> lo, std::array<int, 2> hi) {
    StencilBuilder b;
    b.p.x = x;
    const double h = axis == 0 ? h1 : h2;
    for (auto [IJ, w] : {std::pair{lo, -1.0 / h}, std::pair{hi, 1.0 / h}}) {
      const auto [I, J] = IJ;
      if (I < 1 || I > n1 || (two && (J < 1 || J > n2))) continue;
      b.add(node(I, J), axis == 0 ? w : 0.0, axis == 1 ? w : 0.0, 0.5);
    }
    b.p.npairs = 1;
    b.p.pairs[0] = {static_cast<std::uint8_t>(axis), static_cast<std::uint8_t>(axis)};
    if (b.p.count > 0) points_.push_back(b.p);
  };

  if (!two) {
    for (int I = 0; I <= n1; ++I) edge({(I + 0.5) * h1, 0.0}, 0, {I, 1}, {I + 1, 1});
  } else {
    for (int J = 1; J <= n2; ++J)
      for (int I = 0; I <= n1; ++I) edge({(I + 0.5) * h1, J * h2}, 0, {I, J}, {I + 1, J});
    for (int J = 0; J <= n2; ++J)
      for (int I = 1; I <= n1; ++I) edge({I * h1, (J + 0.5) * h2}, 1, {I, J}, {I, J + 1});

    // Fourth-order staggered derivative and midpoint interpolation on the
    // 4x4 block around each cell centre.
    constexpr std::array<double, 4> d4{1.0 / 24.0, -27.0 / 24.0, 27.0 / 24.0, -1.0 / 24.0};
    constexpr std::array<double, 4> i4{-1.0 / 16.0, 9.0 / 16.0, 9.0 / 16.0, -1.0 / 16.0};
    for (int J = 0; J <= n2; ++J) {
      for (int I = 0; I <= n1; ++I) {
        StencilBuilder b;
        b.p.x = {(I + 0.5) * h1, (J + 0.5) * h2};
        for (int ai = 0; ai < 4; ++ai) {
          const auto [ri, si] = resolve(I - 1 + ai, n1);
          if (si == 0.0) continue;
          for (int bj = 0; bj < 4; ++bj) {
            const auto [rj, sj] = resolve(J - 1 + bj, n2);
            if (sj == 0.0) continue;
            const double sg = si * sj;
            b.add(node(ri, rj), sg * d4[ai] * i4[bj] / h1, sg * i4[ai] * d4[bj] / h2, sg * i4[ai] * i4[bj]);
          }
        }
        b.p.w = end_weight(I, n1 + 1) * end_weight(J, n2 + 1);
        b.p.npairs = 2;
        b.p.pairs[0] = {0, 1};
        b.p.pairs[1] = {1, 0};
        if (b.p.count > 0) points_.push_back(b.p);
      }
    }
  }

  coeff_.assign(2 * points_.size(), cplx{});
  skew_.assign(2 * points_.size(), cplx{});
  const bool constant = a.is_constant();
  const ComplexMatrix a0 = constant ? a.at(std::vector<double>(a.dimension(), 0.0)) : ComplexMatrix{};
  kernels::for_each(points_.size(), [&](std::size_t i) {
    const QuadPoint& p = points_[i];
    const ComplexMatrix A = constant ? a0 : a.at(std::span<const double>(p.x.data(), a.dimension()));
    for (int q = 0; q < p.npairs; ++q) {
      const auto j = p.pairs[q][0], k = p.pairs[q][1];
      coeff_[2 * i + q] = A(j, k);
      skew_[2 * i + q] = A(j, k) - std::conj(A(k, j));
    }
  });
}

cplx sesquilinear(const DiscreteOperatorData& op, const GridField& u, const GridField& w, Exec exec) {
  check_field(op, u);
  check_field(op, w);
  const auto& pts = op.points();
  const cplx s = kernels::sum<cplx>(
      pts.size(),
      [&](std::size_t i) {
        const QuadPoint& p = pts[i];
        const Grad gu = gradient(p, u.values), gw = gradient(p, w.values);
        cplx acc{};
        for (int q = 0; q < p.npairs; ++q)
          acc += op.coeff(i, q) * gu.g[p.pairs[q][1]] * std::conj(gw.g[p.pairs[q][0]]);
        return p.w * acc;
      },
      exec);
  return op.weight() * s;
}

GridField phi_times(const AuxBundle& aux, const GridField& u) {
  GridField w = GridField::zeros(u.domain);
  const double cut = 1e-14 * u.max_abs();
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const double r = std::abs(u.values[i]);
    if (r > cut && r > 0.0) w.values[i] = aux.phi().phi(r) * u.values[i];
  }
  return w;
}

GridField sqrt_phi_times(const AuxBundle& aux, const GridField& u) {
  GridField v = GridField::zeros(u.domain);
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const double r = std::abs(u.values[i]);
    if (r > 0.0) v.values[i] = std::sqrt(aux.phi().phi(r)) * u.values[i];
  }
  return v;
}

double dissipativity_integral(const DiscreteOperatorData& op, const GridField& u, const AuxBundle& aux, Exec exec) {
  return sesquilinear(op, u, phi_times(aux, u), exec).real();
}

double dissipativity_integral(const MatrixField& a, const GridField& u, const AuxBundle& aux, Exec exec) {
  return dissipativity_integral(DiscreteOperatorData(a, u.domain), u, aux, exec);
}

double energy_scale(const DiscreteOperatorData& op, const GridField& u, const AuxBundle& aux) {
  const GridField w = phi_times(aux, u);
  const auto& pts = op.points();
  double acc = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const QuadPoint& p = pts[i];
    const Grad gu = gradient(p, u.values), gw = gradient(p, w.values);
    for (int q = 0; q < p.npairs; ++q)
      acc += p.w * std::abs(op.coeff(i, q)) * std::abs(gu.g[p.pairs[q][1]]) * std::abs(gw.g[p.pairs[q][0]]);
  }
  return op.weight() * acc;
}

double form_integral_v(const DiscreteOperatorData& op, const GridField& v, const AuxBundle& aux, Exec exec) {
  check_field(op, v);
  std::vector<cplx> mod(v.values.size());
  for (std::size_t i = 0; i < v.values.size(); ++i) mod[i] = std::abs(v.values[i]);
  const double cut = 1e-14 * v.max_abs();
  const auto& pts = op.points();
  const double s = kernels::sum<double>(
      pts.size(),
      [&](std::size_t i) {
        const QuadPoint& p = pts[i];
        const Grad gv = gradient(p, v.values), gm = gradient(p, mod);
        cplx avg{};
        for (int c = 0; c < p.count; ++c)
          if (p.node[c] >= 0) avg += p.avg[c] * v.values[static_cast<std::size_t>(p.node[c])];
        const double r = std::abs(avg);
        const bool live = r > cut && r > 0.0;
        const double lam = live ? aux.lambda(r) : 0.0;
        const cplx unit = live ? avg / r : cplx{};
        cplx acc{};
        for (int q = 0; q < p.npairs; ++q) {
          const auto j = p.pairs[q][0], k = p.pairs[q][1];
          acc += op.coeff(i, q) * gv.g[k] * std::conj(gv.g[j]);
          if (live) {
            acc += lam * op.skew(i, q) * gm.g[k] * unit * std::conj(gv.g[j]);
            acc -= lam * lam * op.coeff(i, q) * gm.g[k] * gm.g[j];
          }
        }
        return p.w * acc.real();
      },
      exec);
  return op.weight() * s;
}

double form_integral_v(const MatrixField& a, const GridField& v, const AuxBundle& aux, Exec exec) {
  return form_integral_v(DiscreteOperatorData(a, v.domain), v, aux, exec);
}

kernels::CsrMatrix assemble_operator(const DiscreteOperatorData& op) {
  std::vector<kernels::Triplet> trip;
  const auto& pts = op.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const QuadPoint& p = pts[i];
    for (int q = 0; q < p.npairs; ++q) {
      const auto j = p.pairs[q][0], k = p.pairs[q][1];
      const cplx a = op.coeff(i, q);
      for (int c = 0; c < p.count; ++c) {
        if (p.node[c] < 0 || p.g[j][c] == 0.0) continue;
        for (int d = 0; d < p.count; ++d) {
          if (p.node[d] < 0 || p.g[k][d] == 0.0) continue;
          trip.push_back({static_cast<std::uint32_t>(p.node[c]), static_cast<std::uint32_t>(p.node[d]),
                          -p.w * a * p.g[j][c] * p.g[k][d]});
        }
      }
    }
  }
  return kernels::csr_from_triplets(op.domain().size(), std::move(trip));
}

kernels::CsrMatrix assemble_operator(const MatrixField& a, const GridDomain& domain) {
  return assemble_operator(DiscreteOperatorData(a, domain));
}

SolveStats bicgstab(const kernels::CsrMatrix& m, std::span<const cplx> b, std::span<cplx> x, double tol,
                    std::size_t max_iter, Exec exec) {
  using kernels::dot;
  using kernels::norm2;
  const std::size_t n = m.rows;
  std::vector<cplx> dinv = m.diagonal();
  for (auto& d : dinv) d = d == cplx{} ? cplx{1.0} : 1.0 / d;

  const double bnorm = norm2(b, exec);
  SolveStats st;
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), cplx{});
    return st;
  }
  std::vector<cplx> r(n), rhat(n), p(n, cplx{}), v(n, cplx{}), y(n), s(n), z(n), t(n);
  kernels::spmv(m, x, r, exec);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  rhat = r;
  cplx rho{1.0}, alpha{1.0}, omega{1.0};
  st.residual = norm2(r, exec) / bnorm;
  auto axpy = [&](auto&& body) { kernels::for_each(n, body, exec); };

  for (st.iterations = 0; st.iterations < max_iter && st.residual > tol; ++st.iterations) {
    cplx rho_new = dot(rhat, r, exec);
    if (std::abs(rho_new) < 1e-300) {
      // Breakdown: restart the shadow residual.
      rhat = r;
      rho_new = dot(rhat, r, exec);
      std::fill(p.begin(), p.end(), cplx{});
      std::fill(v.begin(), v.end(), cplx{});
      rho = alpha = omega = 1.0;
    }
    const cplx beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    axpy([&](std::size_t i) {
      p[i] = r[i] + beta * (p[i] - omega * v[i]);
      y[i] = dinv[i] * p[i];
    });
    kernels::spmv(m, y, v, exec);
    alpha = rho / dot(rhat, v, exec);
    axpy([&](std::size_t i) { s[i] = r[i] - alpha * v[i]; });
    const double snorm = norm2(s, exec) / bnorm;
    if (snorm <= tol) {
      axpy([&](std::size_t i) { x[i] += alpha * y[i]; });
      st.residual = snorm;
      ++st.iterations;
      break;
    }
    axpy([&](std::size_t i) { z[i] = dinv[i] * s[i]; });
    kernels::spmv(m, z, t, exec);
    const double tt = std::norm(norm2(t, exec));
    omega = tt > 0.0 ? dot(t, s, exec) / tt : cplx{};
    axpy([&](std::size_t i) {
      x[i] += alpha * y[i] + omega * z[i];
      r[i] = s[i] - omega * t[i];
    });
    st.residual = norm2(r, exec) / bnorm;
    if (!std::isfinite(st.residual)) break;
  }
  if (!(st.residual <= tol))
    throw SolverDivergence("BiCGStab: relative residual " + std::to_string(st.residual) + " after " +
                           std::to_string(st.iterations) + " iterations");
  return st;
}

double l2_norm(const GridField& u, Exec exec) {
  return std::sqrt(u.domain.node_weight() *
                   kernels::sum<double>(u.values.size(), [&](std::size_t i) { return std::norm(u.values[i]); }, exec));
}

Trajectory evolve(const MatrixField& a, const AuxBundle& aux, const GridField& u0, double dt, int steps, double tol,
                  Exec exec) {
  if (steps < 1) throw PreconditionError("evolve: steps must be at least 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("evolve: dt must be positive");
  const kernels::CsrMatrix L = assemble_operator(a, u0.domain);

  // M = I − dt L
  kernels::CsrMatrix M = L;
  for (auto& v : M.val) v *= -dt;
  std::vector<kernels::Triplet> trip;
  trip.reserve(M.nnz() + M.rows);
  for (std::size_t r = 0; r < M.rows; ++r) {
    trip.push_back({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(r), cplx{1.0}});
    for (std::size_t k = M.row_ptr[r]; k < M.row_ptr[r + 1]; ++k)
      trip.push_back({static_cast<std::uint32_t>(r), M.col[k], M.val[k]});
  }
  M = kernels::csr_from_triplets(M.rows, std::move(trip));

  Trajectory tr{{}, {}, {}, {}, {}, u0};
  GridField u = u0;
  auto record = [&](double t, std::size_t its) {
    tr.times.push_back(t);
    tr.orlicz.push_back(orlicz_integral(aux, u, exec));
    tr.luxemburg.push_back(luxemburg_norm(aux, u, exec));
    tr.l2.push_back(l2_norm(u, exec));
    tr.iterations.push_back(its);
  };
  record(0.0, 0);
  std::vector<cplx> next;
  for (int n = 1; n <= steps; ++n) {
    next = u.values;
    const SolveStats st = bicgstab(M, u.values, next, tol, 10000, exec);
    u.values.swap(next);
    record(n * dt, st.iterations);
  }
  tr.final_field = u;
  return tr;
}

}  // namespace fdchk
