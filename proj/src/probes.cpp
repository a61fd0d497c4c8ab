#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fdchk/errors.hpp"
#include "fdchk/pde.hpp"

namespace fdchk {

namespace {

using std::numbers::pi;

constexpr std::size_t kRefineTop = 6;

double bump_value(const Profile& p, double x1, double x2, int dims) {
  const double d1 = x1 - p.center[0];
  const double d2 = dims == 2 ? x2 - p.center[1] : 0.0;
  const double c = std::cos(p.angle), s = std::sin(p.angle);
  const double a = (c * d1 + s * d2) / p.radius;
  const double b = (-s * d1 + c * d2) * p.aspect / p.radius;
  const double r2 = a * a + b * b;
  if (r2 >= 1.0) return 0.0;
  const double q = 1.0 - r2;
  return q * q * q;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// φ with constant elasticity makes the integral homogeneous in the amplitude.
bool homogeneous(const PhiSpec& phi) {
  const double e0 = phi.elasticity(1.0);
  for (double s : {1e-3, 1e-1, 10.0, 1e3}) {
    double e;
    try {
      e = phi.elasticity(s);
    } catch (const EvalError&) {
      return false;
    }
    if (!(std::abs(e - e0) <= 1e-12 * std::max(1.0, std::abs(e0)))) return false;
  }
  return true;
}

struct Scored {
  Probe probe;
  double violation = -std::numeric_limits<double>::infinity();
  double integral = 0.0;
  double scale = 0.0;
  double key = -std::numeric_limits<double>::infinity();  // violation / scale
};

class Searcher {
 public:
  Searcher(const DiscreteOperatorData& op, const AuxBundle& aux, Exec exec) : op_(op), aux_(aux), exec_(exec) {}

  // Evaluates a batch concurrently; order of the output matches the input.
  std::vector<Scored> run(const std::vector<Probe>& batch) {
    std::vector<Scored> out(batch.size());
    kernels::for_each(
        batch.size(),
        [&](std::size_t i) {
          out[i].probe = batch[i];
          const GridField u = batch[i].field(op_.domain());
          if (u.max_abs() == 0.0) return;
          out[i].integral = dissipativity_integral(op_, u, aux_, Exec::serial);
          out[i].violation = -out[i].integral;
          out[i].scale = energy_scale(op_, u, aux_);
          out[i].key = out[i].scale > 0.0 ? out[i].violation / out[i].scale : -std::numeric_limits<double>::infinity();
        },
        exec_);
    evaluations += batch.size();
    return out;
  }

  Scored one(const Probe& p) { return run({p}).front(); }

  std::size_t evaluations = 0;

 private:
  const DiscreteOperatorData& op_;
  const AuxBundle& aux_;
  Exec exec_;
};

bool better(const Scored& a, const Scored& b) { return a.key > b.key; }

// Golden-section maximisation of the key along one probe parameter.
Scored refine_param(Searcher& s, Scored best, double Probe::*field, double lo, double hi, std::size_t evals,
                    bool log_scale) {
  auto to = [&](double v) { return log_scale ? std::log(v) : v; };
  auto from = [&](double v) { return log_scale ? std::exp(v) : v; };
  double a = to(lo), b = to(hi);
  const double ip = (std::sqrt(5.0) - 1.0) / 2.0;
  auto at = [&](double x) {
    Probe p = best.probe;
    p.*field = from(x);
    return s.one(p);
  };
  double c = b - ip * (b - a), d = a + ip * (b - a);
  Scored sc = at(c), sd = at(d);
  for (std::size_t k = 2; k < evals; ++k) {
    if (better(sc, sd) || (sc.key == sd.key)) {
      b = d;
      d = c;
      sd = sc;
      c = b - ip * (b - a);
      sc = at(c);
    } else {
      a = c;
      c = d;
      sc = sd;
      d = a + ip * (b - a);
      sd = at(d);
    }
  }
  if (better(sc, best)) best = sc;
  if (better(sd, best)) best = sd;
  return best;
}

std::vector<double> amplitude_set(bool homog) {
  if (homog) return {1.0};
  return {1e-3, 1e-2, 1e-1, 1.0, 10.0};
}

std::vector<double> linspace(double a, double b, std::size_t m) {
  std::vector<double> v(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = m == 1 ? 0.5 * (a + b) : a + (b - a) * static_cast<double>(i) / (m - 1);
  return v;
}

ProbeResult finish(const Scored& best, std::size_t evals, double ratio) {
  ProbeResult r;
  r.best_value = best.violation;
  r.integral = best.integral;
  r.scale = best.scale;
  r.evaluations = evals;
  r.witness = best.probe;
  r.certified = best.violation > 0.0 && best.violation >= ratio * best.scale;
  return r;
}

Scored search_family(Searcher& s, ProbeKind kind, const GridDomain& d, const AuxBundle& aux, std::size_t budget,
                     std::uint64_t seed) {
  const bool homog = homogeneous(aux.phi());
  const auto amps = amplitude_set(homog);
  const auto profiles = profile_library(d);
  const double lmin = d.dims() == 2 ? std::min(d.length(0), d.length(1)) : d.length(0);
  const std::size_t sweep_budget = budget * 7 / 10;
  std::mt19937_64 rng(splitmix(seed ^ static_cast<std::uint64_t>(kind)));

  Scored best;
  std::vector<Scored> pool;

  if (kind == ProbeKind::random_bumps) {
    std::vector<Probe> batch;
    for (std::size_t k = 0; k < std::max<std::size_t>(1, sweep_budget); ++k) {
      Probe p;
      p.kind = kind;
      p.seed = rng();
      p.count = 1 + static_cast<int>(k % 4);
      p.amplitude = amps[k % amps.size()];
      batch.push_back(p);
    }
    pool = s.run(batch);
  } else {
    const bool plane = kind == ProbeKind::plane_phase;
    const double range = plane ? 24.0 / lmin : 20.0;
    std::vector<double> discrete = plane ? (d.dims() == 2 ? linspace(0.0, 0.75 * pi, 4) : std::vector<double>{0.0})
                                         : std::vector<double>{1e-1, 1e-2, 1e-3};
    std::vector<Probe> combos;
    for (const auto& prof : profiles) {
      for (double a : amps) {
        for (double v : discrete) {
          Probe p;
          p.kind = kind;
          p.profile = prof;
          p.amplitude = a;
          if (plane)
            p.direction = v;
          else
            p.eps = v;
          combos.push_back(p);
        }
      }
    }
    // Simple shapes and unit-scale amplitudes come first, so a small budget
    // still covers them; the seeded shuffle orders combos of equal rank.
    std::shuffle(combos.begin(), combos.end(), rng);
    auto rank = [](const Probe& p) {
      const int shape = p.profile.shape == Profile::Shape::sine ? p.profile.k1 + p.profile.k2 - 2
                                                                : (p.profile.aspect == 1.0 ? 0 : 1);
      return shape + static_cast<int>(std::lround(std::abs(std::log10(p.amplitude))));
    };
    std::stable_sort(combos.begin(), combos.end(), [&](const Probe& x, const Probe& y) { return rank(x) < rank(y); });
    const std::size_t m = std::min<std::size_t>(plane ? 13 : 9, std::max<std::size_t>(1, sweep_budget));
    const auto grid = linspace(-range, range, m);
    std::size_t usable = std::max<std::size_t>(1, sweep_budget / m);
    if (usable < combos.size()) combos.resize(usable);

    std::vector<Probe> batch;
    for (const auto& c : combos) {
      for (double v : grid) {
        Probe p = c;
        p.freq = v;
        batch.push_back(p);
      }
    }
    pool = s.run(batch);

    // Keep the best grid point of each combo and refine the leaders along the
    // continuous parameter, then along the amplitude.
    std::vector<Scored> leaders;
    for (std::size_t c = 0; c < combos.size(); ++c) {
      std::size_t bi = c * m;
      for (std::size_t k = c * m; k < (c + 1) * m && k < pool.size(); ++k)
        if (better(pool[k], pool[bi])) bi = k;
      if (bi < pool.size()) leaders.push_back(pool[bi]);
    }
    std::stable_sort(leaders.begin(), leaders.end(), better);
    const double step = grid.size() > 1 ? grid[1] - grid[0] : range;
    const std::size_t remaining = budget > s.evaluations ? budget - s.evaluations : 0;
    const std::size_t top = std::min(kRefineTop, leaders.size());
    const std::size_t per = top ? remaining / top : 0;
    for (std::size_t i = 0; i < top && per >= 4; ++i) {
      Scored cand = leaders[i];
      const std::size_t along = homog ? per : per * 2 / 3;
      const double f0 = cand.probe.freq;
      cand = refine_param(s, cand, &Probe::freq, f0 - step, f0 + step, along, false);
      if (!homog && per - along >= 4) {
        const double a0 = cand.probe.amplitude;
        cand = refine_param(s, cand, &Probe::amplitude, a0 / 10.0, a0 * 10.0, per - along, true);
      }
      pool.push_back(cand);
    }
  }
  for (const auto& sc : pool)
    if (better(sc, best)) best = sc;
  return best;
}

}  // namespace

std::string_view to_string(ProbeKind k) {
  switch (k) {
    case ProbeKind::plane_phase: return "plane_phase";
    case ProbeKind::log_phase: return "log_phase";
    case ProbeKind::random_bumps: return "random_bumps";
    case ProbeKind::combined: return "combined";
  }
  return "combined";
}

ProbeKind probe_kind_from_string(std::string_view s) {
  for (auto k : {ProbeKind::plane_phase, ProbeKind::log_phase, ProbeKind::random_bumps, ProbeKind::combined})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown probe family '" + std::string(s) + "'");
}

std::string Profile::describe() const {
  std::ostringstream os;
  if (shape == Shape::sine) {
    os << "sine(" << k1 << "," << k2 << ")";
  } else {
    os << "bump(angle=" << std::lround(angle * 180.0 / pi) << ",aspect=" << aspect << ")";
  }
  return os.str();
}

double Profile::eval(const GridDomain& d, double x1, double x2) const {
  if (shape == Shape::sine) {
    const double a = std::sin(k1 * pi * x1 / d.length(0));
    return d.dims() == 2 ? a * std::sin(k2 * pi * x2 / d.length(1)) : a;
  }
  return bump_value(*this, x1, x2, d.dims());
}

std::vector<Profile> profile_library(const GridDomain& d) {
  std::vector<Profile> out;
  const int kmax = 3;
  const double L1 = d.length(0), L2 = d.dims() == 2 ? d.length(1) : 1.0;
  for (int a = 1; a <= kmax; ++a) {
    for (int b = 1; b <= (d.dims() == 2 ? kmax : 1); ++b) {
      Profile p;
      p.k1 = a;
      p.k2 = b;
      out.push_back(p);
    }
  }
  Profile bump;
  bump.shape = Profile::Shape::bump;
  bump.center = {0.5 * L1, 0.5 * L2};
  bump.radius = 0.45 * (d.dims() == 2 ? std::min(L1, L2) : L1);
  out.push_back(bump);
  if (d.dims() == 2) {
    for (double aspect : {3.0, 6.0}) {
      for (int deg : {0, 45, 90, 135}) {
        Profile p = bump;
        p.aspect = aspect;
        p.angle = deg * pi / 180.0;
        out.push_back(p);
      }
    }
  }
  return out;
}

GridField Probe::field(const GridDomain& d) const {
  if (kind == ProbeKind::random_bumps) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double L1 = d.length(0), L2 = d.dims() == 2 ? d.length(1) : 1.0;
    struct Term {
      Profile p;
      cplx c;
      double k1, k2;
    };
    std::vector<Term> terms;
    for (int i = 0; i < std::max(1, count); ++i) {
      Term t;
      t.p.shape = Profile::Shape::bump;
      const double r = (0.1 + 0.15 * uni(rng)) * std::min(L1, L2);
      t.p.radius = r;
      t.p.center = {r + (L1 - 2 * r) * uni(rng), d.dims() == 2 ? r + (L2 - 2 * r) * uni(rng) : 0.0};
      t.p.aspect = 1.0 + 5.0 * uni(rng);
      t.p.angle = pi * uni(rng);
      t.c = std::polar(0.5 + uni(rng), 2 * pi * uni(rng));
      t.k1 = (uni(rng) - 0.5) * 20.0 / L1;
      t.k2 = d.dims() == 2 ? (uni(rng) - 0.5) * 20.0 / L2 : 0.0;
      terms.push_back(t);
    }
    return GridField::from_function(d, [&](double x1, double x2) {
      cplx acc{};
      for (const auto& t : terms)
        acc += t.c * t.p.eval(d, x1, x2) * std::polar(1.0, t.k1 * x1 + t.k2 * x2);
      return amplitude * acc;
    });
  }
  const double c = std::cos(direction), s = std::sin(direction);
  return GridField::from_function(d, [&](double x1, double x2) {
    const double rho = profile.eval(d, x1, x2);
    if (kind == ProbeKind::plane_phase) return amplitude * rho * std::polar(1.0, freq * (c * x1 + s * x2));
    return amplitude * rho * std::polar(1.0, 0.5 * freq * std::log(rho * rho + eps * eps));
  });
}

std::map<std::string, double> Probe::parameters() const {
  std::map<std::string, double> m{{"amplitude", amplitude}};
  switch (kind) {
    case ProbeKind::plane_phase:
      m["direction_deg"] = direction * 180.0 / pi;
      m["lambda"] = freq;
      break;
    case ProbeKind::log_phase:
      m["mu"] = freq;
      m["eps"] = eps;
      break;
    case ProbeKind::random_bumps:
      m["seed"] = static_cast<double>(seed);
      m["count"] = count;
      break;
    case ProbeKind::combined: break;
  }
  return m;
}

std::string Probe::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  if (kind != ProbeKind::random_bumps) os << " rho=" << profile.describe();
  for (const auto& [k, v] : parameters()) os << ' ' << k << '=' << v;
  return os.str();
}

ProbeResult probe_search(const MatrixField& a, const AuxBundle& aux, const GridDomain& domain, const ProbeOptions& opt,
                         Exec exec) {
  if (opt.budget < 1) throw PreconditionError("probe_search: budget must be at least 1");
  const DiscreteOperatorData op(a, domain);
  Searcher s(op, aux, exec);
  Scored best;
  if (opt.family == ProbeKind::combined) {
    const std::size_t b_plane = opt.budget * 2 / 5, b_log = opt.budget * 2 / 5;
    const std::size_t b_rand = opt.budget - b_plane - b_log;
    const std::pair<ProbeKind, std::size_t> plan[] = {
        {ProbeKind::plane_phase, b_plane}, {ProbeKind::log_phase, b_log}, {ProbeKind::random_bumps, b_rand}};
    for (const auto& [kind, b] : plan) {
      if (b == 0) continue;
      const std::size_t before = s.evaluations;
      Searcher sub(op, aux, exec);
      const Scored f = search_family(sub, kind, domain, aux, b, opt.seed);
      s.evaluations = before + sub.evaluations;
      if (better(f, best)) best = f;
    }
  } else {
    best = search_family(s, opt.family, domain, aux, opt.budget, opt.seed);
  }
  return finish(best, s.evaluations, opt.certify_ratio);
}

}  // namespace fdchk
