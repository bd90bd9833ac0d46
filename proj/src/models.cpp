#include "semiflow/models.hpp"

#include <cmath>
#include <stdexcept>

namespace semiflow {

namespace {

[[noreturn]] void reject(const std::string& who,
                         const std::vector<std::string>& violations) {
  std::string msg = who + ": hypothesis violation:";
  for (const auto& v : violations) msg += " " + v;
  throw std::invalid_argument(msg);
}

std::vector<double> grid_of(const SpectralField& f) {
  return f.basis->to_grid(f.coeffs);
}

SpectralField project(const BasisPtr& basis, const std::vector<double>& vals) {
  SpectralField f = field_from_grid(basis, vals);
  dealias(f);
  return f;
}

// g(x,u,v) = sum_l c_l(x) u^{m_l} v^{k_l} evaluated on the grid.
std::vector<double> eval_source(const SourceSpec& g,
                                const std::vector<double>& u,
                                const std::vector<double>& v) {
  std::vector<double> out(u.size(), 0.0);
  for (const auto& term : g) {
    std::vector<double> cvals;
    if (term.coeff_field.basis) {
      cvals = grid_of(term.coeff_field);
    }
    for (size_t i = 0; i < out.size(); ++i) {
      double w = term.coeff_field.basis ? cvals[i] : term.c;
      for (int r = 0; r < term.m; ++r) w *= u[i];
      for (int r = 0; r < term.k; ++r) w *= v[i];
      out[i] += w;
    }
  }
  return out;
}

}  // namespace

SystemState ModelSpec::make_state(std::vector<SpectralField> comps) const {
  if (static_cast<int>(comps.size()) != arity) {
    throw std::invalid_argument(name + ": component count mismatch");
  }
  SystemState s(std::move(comps));
  s.offsets = offsets;
  s.theta_weights = theta_weights;
  s.integrabilities = integrabilities;
  return s;
}

SpectralField div_a_grad_b(const SpectralField& a, const SpectralField& b) {
  if (!a.basis->compatible(*b.basis)) {
    throw std::invalid_argument("div_a_grad_b: basis mismatch");
  }
  const Basis& bas = *a.basis;
  std::vector<double> vals(bas.num_grid(), 0.0);
  for (int ax = 0; ax < bas.dim(); ++ax) {
    const std::vector<double> ga = bas.gradient_grid(a.coeffs, ax);
    const std::vector<double> gb = bas.gradient_grid(b.coeffs, ax);
    for (int i = 0; i < bas.num_grid(); ++i) vals[i] += ga[i] * gb[i];
  }
  std::vector<double> lap(b.coeffs.size());
  for (size_t k = 0; k < lap.size(); ++k) {
    lap[k] = -bas.eigenvalue(static_cast<int>(k)) * b.coeffs[k];
  }
  const std::vector<double> agrid = grid_of(a);
  const std::vector<double> lgrid = bas.to_grid(lap);
  for (int i = 0; i < bas.num_grid(); ++i) vals[i] += agrid[i] * lgrid[i];
  return project(a.basis, vals);
}

double mass(const SpectralField& f) {
  const std::vector<double> g = grid_of(f);
  double acc = 0.0;
  for (double v : g) acc += v;
  return acc * f.basis->quad_weight();
}

SpectralField constant_field(const BasisPtr& basis, double value) {
  return field_from_grid(basis,
                         std::vector<double>(basis->num_grid(), value));
}

SpectralField cosine_field(const BasisPtr& basis, double amplitude, int k) {
  const double L = basis->spec().lengths[0];
  std::vector<double> vals(basis->num_grid());
  const auto& x = basis->grid_coords(0);
  const int n1 = static_cast<int>(x.size());
  const int n2 = basis->num_grid() / n1;
  for (int i = 0; i < n1; ++i) {
    const double v = amplitude * std::cos(k * M_PI * x[i] / L);
    for (int j = 0; j < n2; ++j) vals[i * n2 + j] = v;
  }
  return field_from_grid(basis, vals);
}

SpectralField bump_field(const BasisPtr& basis, double amplitude,
                         double width) {
  const auto& spec = basis->spec();
  const double minL = spec.dim == 2
                          ? std::min(spec.lengths[0], spec.lengths[1])
                          : spec.lengths[0];
  const double w = width * minL;
  std::vector<double> vals(basis->num_grid());
  const auto& x0 = basis->grid_coords(0);
  if (spec.dim == 1) {
    for (size_t i = 0; i < x0.size(); ++i) {
      const double d = x0[i] - 0.5 * spec.lengths[0];
      vals[i] = amplitude * std::exp(-d * d / (2.0 * w * w));
    }
  } else {
    const auto& x1 = basis->grid_coords(1);
    for (size_t i = 0; i < x0.size(); ++i) {
      const double d0 = x0[i] - 0.5 * spec.lengths[0];
      for (size_t j = 0; j < x1.size(); ++j) {
        const double d1 = x1[j] - 0.5 * spec.lengths[1];
        vals[i * x1.size() + j] =
            amplitude * std::exp(-(d0 * d0 + d1 * d1) / (2.0 * w * w));
      }
    }
  }
  return field_from_grid(basis, vals);
}

ModelSpec pp_model(BasisPtr basis, double p, double q, double eps,
                   SourceSpec g, double cross) {
  const double n = basis->dim();
  std::vector<std::string> bad;
  if (!(p > n / 2.0)) bad.push_back("p>n/2");
  if (!(q > n)) bad.push_back("q>n");
  if (!(n / p - n / q < 1.0)) bad.push_back("n/p-n/q<1");
  if (!(eps > 0.0 && eps < 0.5)) bad.push_back("eps-range");
  for (const auto& term : g) {
    if (term.m > 2) bad.push_back("max-power<=2");
  }
  if (!bad.empty()) reject("pp_model", bad);

  ModelSpec m;
  m.name = "pp";
  m.arity = 2;
  m.mode = ProblemMode::Semilinear;
  m.basis = basis;
  m.offsets = {-2.0 * eps, 1.0 - 2.0 * eps};
  m.theta_weights = {2.0, 2.0};
  m.integrabilities = {p, q};
  m.budget.gamma = eps / 3.0;
  m.budget.alpha = eps;
  m.budget.beta = eps;
  m.budget.xi = (1.0 + eps) / 2.0;
  m.budget.q = 2.0;
  m.budget.alpha0 = 0.99 * eps;
  m.budget.gamma0 = eps / 6.0;
  m.budget.mu = (1.0 - 0.95 * eps) / 2.0;
  m.state_dependent_a = false;

  m.a_builder = [basis](const SystemState&) {
    return GeneratorSpec::triangular(basis, {1.0, 1.0},
                                     {0.0, 0.0, 1.0, -1.0});
  };
  m.f_eval = [basis, g, cross](const SystemState& w) {
    const SpectralField& u = w.components[0];
    const SpectralField& v = w.components[1];
    SpectralField f0 = (-cross) * div_a_grad_b(u, v);
    if (!g.empty()) {
      const std::vector<double> gv =
          eval_source(g, grid_of(u), grid_of(v));
      f0 += project(basis, gv);
    }
    SystemState out = w;
    out.components[0] = f0;
    out.components[1] = SpectralField(basis);
    return out;
  };
  return m;
}

ModelSpec degenerate_model(BasisPtr basis, double p, double q, double s,
                           double tau, double a) {
  const double n = basis->dim();
  std::vector<std::string> bad;
  if (!(q > std::max(1.0, n - 1.0))) bad.push_back("q>max{1,n-1}");
  if (!(p > 1.0 && p <= q)) bad.push_back("1<p<=q");
  if (!(n / p - n / q < 1.0)) bad.push_back("n/p-n/q<1");
  if (!bad.empty()) reject("degenerate_model", bad);

  // Admissible window for the base order a of the first component:
  // a > max{-1+n/q, -1+1/p}, a < s, and a+1+n/p-n/q < tau < a+2.
  const double lo = std::max(
      {-1.0 + n / q, -1.0 + 1.0 / p, tau - 2.0});
  const double hi = std::min(s, tau - 1.0 - n / p + n / q);
  if (std::isnan(a)) {
    if (!(lo < hi)) reject("degenerate_model", {"a-window-empty"});
    a = 0.5 * (lo + hi);
  } else {
    if (!(a > std::max(-1.0 + n / q, -1.0 + 1.0 / p))) bad.push_back("a-lower");
    if (!(a < s)) bad.push_back("a-upper");
    if (!(a + 1.0 + n / p - n / q < tau)) bad.push_back("tau-lower");
    if (!(tau < a + 2.0)) bad.push_back("tau-upper");
    if (!bad.empty()) reject("degenerate_model", bad);
  }

  ModelSpec m;
  m.name = "degenerate";
  m.arity = 3;
  m.mode = ProblemMode::Semilinear;
  m.basis = basis;
  m.offsets = {a, tau, a + 1.0};
  m.theta_weights = {2.0, 0.0, 2.0};  // the middle order is theta-independent
  m.integrabilities = {p, q, q};
  const double alpha = 0.5 * (s - a);
  m.budget.gamma = 0.0;
  m.budget.alpha = alpha;
  m.budget.beta = alpha;
  m.budget.xi = 0.5 + alpha / 8.0;
  m.budget.q = 2.0;
  m.budget.alpha0 = 0.8 * alpha;
  m.budget.gamma0 = 0.0;
  m.budget.mu = 0.5 - 0.6 * alpha;
  m.state_dependent_a = false;

  m.a_builder = [basis](const SystemState&) {
    return GeneratorSpec::triangular(
        basis, {1.0, 0.0, 1.0},
        {0.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 1.0, -1.0});
  };
  m.f_eval = [basis](const SystemState& w) {
    SystemState out = w;
    out.components[0] = -1.0 * div_a_grad_b(w.components[0], w.components[2]);
    out.components[1] = SpectralField(basis);
    out.components[2] = SpectralField(basis);
    return out;
  };
  return m;
}

ModelSpec motility_model(BasisPtr basis, double p, double eps, double kappa,
                         double chi0, std::function<double(double)> chi,
                         std::function<double(double)> chi_prime,
                         std::function<double(double)> g) {
  const double n = basis->dim();
  std::vector<std::string> bad;
  if (!(p > 2.0 * n)) bad.push_back("p>2n");
  if (!(eps > 0.0 && eps < 1.0 / p)) bad.push_back("eps-range");
  if (!(2.0 * n / p < 2.0 * kappa)) bad.push_back("kappa-lower");
  if (!(2.0 * kappa < 1.0 - 5.0 * eps)) bad.push_back("kappa-upper");
  if (!(chi0 > 0.0)) bad.push_back("chi0-positive");
  if (!bad.empty()) reject("motility_model", bad);

  if (!chi) {
    chi = [chi0](double v) { return chi0 + 1.0 / (1.0 + v * v); };
    chi_prime = [](double v) {
      const double d = 1.0 + v * v;
      return -2.0 * v / (d * d);
    };
  } else if (!chi_prime) {
    throw std::invalid_argument("motility_model: custom chi needs chi_prime");
  }
  if (!g) {
    g = [](double m) { return m / std::sqrt(1.0 + m * m); };
  }

  ModelSpec m;
  m.name = "motility";
  m.arity = 3;
  m.mode = ProblemMode::Quasilinear;
  m.basis = basis;
  m.offsets = {-1.0 + n / p + eps, 2.0 * kappa, n / p};
  m.theta_weights = {2.0, 2.0, 2.0};
  m.integrabilities = {p, p, p};
  m.budget.gamma = eps;
  m.budget.beta = 1.5 * eps;
  m.budget.alpha = 2.0 * eps;
  m.budget.xi = 0.5 + 9.0 * eps / 8.0;
  m.budget.q = 2.0;
  m.budget.alpha0 = 1.9 * eps;
  m.budget.gamma0 = 0.75 * eps;
  m.budget.mu = 0.5 - 0.7 * eps;
  m.state_dependent_a = true;

  m.a_builder = [basis, chi, chi0](const SystemState& w) {
    const std::vector<double> vg = grid_of(w.components[1]);
    std::vector<double> cg(vg.size());
    double cmin = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < vg.size(); ++i) {
      cg[i] = chi(vg[i]);
      cmin = std::min(cmin, cg[i]);
    }
    if (cmin < 0.5 * chi0) {
      throw std::invalid_argument("motility_model: chi-floor violated");
    }
    const SpectralField chifield = field_from_grid(basis, cg);
    return GeneratorSpec::variable(
        basis, {1.0, 1.0, 1.0},
        {0.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0}, chifield);
  };
  m.f_eval = [basis, chi_prime, g](const SystemState& w) {
    const std::vector<double> ug = grid_of(w.components[0]);
    const std::vector<double> vg = grid_of(w.components[1]);
    const std::vector<double> mg = grid_of(w.components[2]);
    std::vector<double> ucp(ug.size()), ugm(ug.size());
    for (size_t i = 0; i < ug.size(); ++i) {
      ucp[i] = ug[i] * chi_prime(vg[i]);
      ugm[i] = ug[i] * g(mg[i]);
    }
    const SpectralField ucp_field = project(basis, ucp);
    const SpectralField ugm_field = project(basis, ugm);
    SystemState out = w;
    out.components[0] = div_a_grad_b(ucp_field, w.components[1]) + ugm_field;
    out.components[1] = SpectralField(basis);
    out.components[2] = -1.0 * ugm_field;
    return out;
  };
  return m;
}

ModelSpec heat_model(BasisPtr basis, int arity, ExponentBudget budget) {
  ModelSpec m;
  m.name = "heat";
  m.arity = arity;
  m.mode = ProblemMode::Semilinear;
  m.basis = basis;
  m.offsets.assign(arity, 0.0);
  m.theta_weights.assign(arity, 2.0);
  m.integrabilities.assign(arity, 2.0);
  m.budget = budget;
  m.state_dependent_a = false;
  m.a_builder = [basis, arity](const SystemState&) {
    return GeneratorSpec::diagonal(basis, std::vector<double>(arity, 1.0));
  };
  m.f_eval = [basis](const SystemState& w) {
    SystemState out = w;
    for (auto& c : out.components) c = SpectralField(basis);
    return out;
  };
  return m;
}

ModelSpec scalar_relaxation_model(BasisPtr basis) {
  ModelSpec m;
  m.name = "scalar-relaxation";
  m.arity = 1;
  m.mode = ProblemMode::Semilinear;
  m.basis = basis;
  m.offsets = {0.0};
  m.theta_weights = {2.0};
  m.integrabilities = {2.0};
  m.budget.gamma = 0.0;
  m.budget.alpha = 0.0;
  m.budget.beta = 0.0;
  m.budget.xi = 0.0;
  m.budget.q = 1.0;
  m.budget.alpha0 = 0.0;
  m.budget.gamma0 = 0.0;
  m.budget.mu = 1e-9;
  m.state_dependent_a = false;
  m.a_builder = [basis](const SystemState&) {
    return GeneratorSpec::diagonal(basis, {1.0}, {-1.0});
  };
  const SpectralField one = constant_field(basis, 1.0);
  m.f_eval = [one](const SystemState& w) {
    SystemState out = w;
    out.components[0] = one;
    return out;
  };
  return m;
}

SystemState eval_nonlinearity(const ModelSpec& model, const SystemState& w) {
  if (w.arity() != model.arity) {
    throw std::invalid_argument("eval_nonlinearity: arity mismatch");
  }
  SystemState out = model.f_eval(w);
  for (const auto& c : out.components) {
    for (double x : c.coeffs) {
      if (!std::isfinite(x)) {
        throw std::runtime_error(
            "eval_nonlinearity: non-finite value (admissibility violation)");
      }
    }
  }
  return out;
}

}  // namespace semiflow
