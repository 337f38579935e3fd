#include "mmfem/problems.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "mmfem/errors.hpp"

namespace mmfem {

double erf(double x) { return std::erf(x); }
double erfc(double x) { return std::erfc(x); }

void StefanParameters::validate() const {
  if (!(k_solid > 0 && k_liquid > 0 && K_solid > 0 && K_liquid > 0 && latent > 0 && t0 > 0))
    throw ConfigError("Stefan parameters must be positive");
  if (!(u_solid < 0.0 && u_liquid > 0.0))
    throw ConfigError("Stefan data need u_solid < 0 < u_liquid (front temperature is 0)");
}

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

struct PhiTerms {
  double value;
  double derivative;
};

PhiTerms phi_equation(const StefanParameters& p, double phi) {
  const double r = p.kappa_solid() / p.kappa_liquid();
  const double sr = std::sqrt(r);
  const double beta = (p.k_liquid / p.k_solid) * sr * p.u_liquid / p.u_solid;
  const double c = p.latent * kSqrtPi / (p.K_solid * p.u_solid);

  const double e1 = std::exp(-phi * phi), erf1 = std::erf(phi);
  const double a = e1 / erf1;
  const double da = -2.0 * phi * a - (2.0 / kSqrtPi) * e1 * e1 / (erf1 * erf1);

  const double e2 = std::exp(-r * phi * phi), erfc2 = std::erfc(sr * phi);
  const double b = beta * e2 / erfc2;
  const double db = beta * (-2.0 * r * phi * e2 / erfc2 +
                            (2.0 / kSqrtPi) * sr * e2 * e2 / (erfc2 * erfc2));
  return {a + b + c * phi, da + db + c};
}

}  // namespace

double stefan_phi_residual(const StefanParameters& params, double phi) {
  return phi_equation(params, phi).value;
}

double stefan_phi_root(const StefanParameters& params, double lo, double hi) {
  params.validate();
  if (!(lo > 0.0 && lo < hi)) throw ConfigError("stefan_phi_root: need 0 < lo < hi");
  double flo = phi_equation(params, lo).value;
  const double fhi = phi_equation(params, hi).value;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw ConfigError("stefan_phi_root: no sign change in the bracket");

  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const auto [f, df] = phi_equation(params, x);
    if (f == 0.0) return x;
    if ((f > 0.0) == (flo > 0.0)) {
      lo = x;
      flo = f;
    } else {
      hi = x;
    }
    double next = x - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool done = std::abs(next - x) <= 1e-16 * std::abs(x);
    x = next;
    if (done || hi - lo <= 2e-16 * hi) break;
  }
  return x;
}

StefanSolution::StefanSolution(StefanParameters params)
    : params_(params), phi_(stefan_phi_root(params_)) {}

double StefanSolution::interface(double t) const {
  return 2.0 * phi_ * std::sqrt(params_.kappa_solid() * t);
}

double StefanSolution::interface_speed(double t) const {
  return phi_ * std::sqrt(params_.kappa_solid() / t);
}

double StefanSolution::value(double x, double t) const {
  const double ks = params_.kappa_solid(), kl = params_.kappa_liquid();
  if (x <= interface(t))
    return params_.u_solid * (1.0 - std::erf(x / (2.0 * std::sqrt(ks * t))) / std::erf(phi_));
  return params_.u_liquid *
         (1.0 - std::erfc(x / (2.0 * std::sqrt(kl * t))) / std::erfc(phi_ * std::sqrt(ks / kl)));
}

double StefanSolution::gradient(double x, double t, bool solid_side) const {
  const double ks = params_.kappa_solid(), kl = params_.kappa_liquid();
  if (solid_side) {
    const double scale = 2.0 * std::sqrt(ks * t);
    const double xi = x / scale;
    return -params_.u_solid / std::erf(phi_) * (2.0 / kSqrtPi) * std::exp(-xi * xi) / scale;
  }
  const double scale = 2.0 * std::sqrt(kl * t);
  const double eta = x / scale;
  return params_.u_liquid / std::erfc(phi_ * std::sqrt(ks / kl)) * (2.0 / kSqrtPi) *
         std::exp(-eta * eta) / scale;
}

double cg_exact(double x, double t) {
  if (x > 1.0 - t) return 0.0;
  return -x - t + std::exp(x + t - 1.0);
}

double cg_gradient(double x, double t) {
  if (x > 1.0 - t) return 0.0;
  return -1.0 + std::exp(x + t - 1.0);
}

double cg_boundary(double t) { return 1.0 - t; }

double cg_neumann_gradient(double t) { return -1.0 + std::exp(t - 1.0); }

double PmeSimilarity::lambda(double t) const { return std::pow(t / t0(), 1.0 / (2.0 + m)); }

double PmeSimilarity::value(double x, double t) const {
  const double lam = lambda(t);
  const double xi = x / (x0 * lam);
  if (std::abs(xi) >= 1.0) return 0.0;
  const double base = 1.0 - xi * xi;
  return (m == 1 ? base : std::pow(base, 1.0 / m)) / lam;
}

std::string ProblemSpec::name() const {
  switch (kind) {
    case ProblemKind::Stefan: return "stefan";
    case ProblemKind::CrankGupta: return "cg";
    case ProblemKind::PorousMedium: return pme_start == PmeStart::Similarity ? "pme" : "pmecos";
  }
  return "unknown";
}

MonitorRouting ProblemSpec::routing() const {
  return kind == ProblemKind::Stefan ? MonitorRouting::InterfaceAreaMonitor
                                     : MonitorRouting::MassMonitor;
}

bool ProblemSpec::has_exact_solution() const {
  return !(kind == ProblemKind::PorousMedium && pme_start == PmeStart::Cosine);
}

void ProblemSpec::validate() const {
  if (!(t_end > t_start)) throw ConfigError("problem horizon must satisfy t_end > t_start");
  switch (kind) {
    case ProblemKind::Stefan:
      stefan.validate();
      if (t_start <= 0.0) throw ConfigError("Stefan start time must be positive");
      break;
    case ProblemKind::CrankGupta:
      if (t_start < 0.0 || t_end >= 1.0)
        throw ConfigError("Crank-Gupta horizon must lie inside [0, 1)");
      break;
    case ProblemKind::PorousMedium:
      if (pme_exponent < 1) throw ConfigError("PME exponent must be an integer >= 1");
      if (!(pme_x0 > 0.0)) throw ConfigError("PME x0 must be positive");
      if (pme_start == PmeStart::Similarity && t_start <= 0.0)
        throw ConfigError("PME similarity start time must be positive");
      break;
  }
}

std::vector<double> ProblemSpec::initial_breakpoints() const {
  switch (kind) {
    case ProblemKind::Stefan: {
      const StefanSolution exact(stefan);
      return {0.0, exact.interface(t_start), 1.0};
    }
    case ProblemKind::CrankGupta:
      return {0.0, cg_boundary(t_start)};
    case ProblemKind::PorousMedium: {
      if (pme_start == PmeStart::Cosine) return {-0.5, 0.5};
      const PmeSimilarity sim{pme_exponent, pme_x0};
      return {-sim.boundary(t_start), sim.boundary(t_start)};
    }
  }
  return {};
}

double ProblemSpec::initial_value(double x) const {
  if (kind == ProblemKind::PorousMedium && pme_start == PmeStart::Cosine)
    return std::cos(std::numbers::pi * x);
  return exact_solution(*this)->value(x, t_start);
}

ProblemSpec make_stefan(const StefanParameters& params, double duration) {
  ProblemSpec s;
  s.kind = ProblemKind::Stefan;
  s.stefan = params;
  s.t_start = params.t0;
  s.t_end = params.t0 + duration;
  return s;
}

ProblemSpec make_crank_gupta(double t_end) {
  ProblemSpec s;
  s.kind = ProblemKind::CrankGupta;
  s.t_start = 0.0;
  s.t_end = t_end;
  return s;
}

ProblemSpec make_pme_similarity(int m, double x0, double duration) {
  ProblemSpec s;
  s.kind = ProblemKind::PorousMedium;
  s.pme_exponent = m;
  s.pme_x0 = x0;
  s.pme_start = PmeStart::Similarity;
  s.t_start = PmeSimilarity{m, x0}.t0();
  s.t_end = s.t_start + duration;
  return s;
}

ProblemSpec make_pme_cosine(int m, double t_end) {
  ProblemSpec s;
  s.kind = ProblemKind::PorousMedium;
  s.pme_exponent = m;
  s.pme_start = PmeStart::Cosine;
  s.t_start = 0.0;
  s.t_end = t_end;
  return s;
}

std::optional<ExactSolution> exact_solution(const ProblemSpec& spec) {
  switch (spec.kind) {
    case ProblemKind::Stefan: {
      auto sol = std::make_shared<StefanSolution>(spec.stefan);
      return ExactSolution{[sol](double x, double t) { return sol->value(x, t); },
                           [sol](double t) { return std::vector<double>{sol->interface(t)}; },
                           spec.t_start, spec.t_end};
    }
    case ProblemKind::CrankGupta:
      return ExactSolution{cg_exact, [](double t) { return std::vector<double>{cg_boundary(t)}; },
                           0.0, 1.0};
    case ProblemKind::PorousMedium: {
      if (spec.pme_start == PmeStart::Cosine) return std::nullopt;
      const PmeSimilarity sim{spec.pme_exponent, spec.pme_x0};
      return ExactSolution{
          [sim](double x, double t) { return sim.value(x, t); },
          [sim](double t) { return std::vector<double>{-sim.boundary(t), sim.boundary(t)}; },
          sim.t0(), spec.t_end};
    }
  }
  return std::nullopt;
}

double PhaseForm::flux_coefficient(double u) const {
  double d = diffusivity;
  for (int k = 0; k < exponent; ++k) d *= u;
  return d;
}

int PhaseForm::quadrature_points(int degree) const {
  const int linear = degree + 2;
  if (exponent == 0) return linear;
  return std::max(linear, (exponent * degree + 2 * degree + 1) / 2 + 1);
}

std::vector<PhaseForm> problem_weak_forms(const ProblemSpec& spec) {
  switch (spec.kind) {
    case ProblemKind::Stefan: {
      const auto p = spec.stefan;
      auto sol = std::make_shared<StefanSolution>(p);
      PhaseForm solid{p.kappa_solid(), 0, 0.0,
                      {EndpointKind::FixedDirichlet, p.u_solid, {}},
                      {EndpointKind::Interface, 0.0, {}}};
      PhaseForm liquid{p.kappa_liquid(), 0, 0.0,
                       {EndpointKind::Interface, 0.0, {}},
                       {EndpointKind::FixedNeumann, 0.0,
                        [sol](double t) { return sol->gradient(1.0, t, false); }}};
      return {solid, liquid};
    }
    case ProblemKind::CrankGupta:
      return {PhaseForm{1.0, 0, -1.0,
                        {EndpointKind::FixedNeumann, 0.0, cg_neumann_gradient},
                        {EndpointKind::MovingFree, 0.0, {}}}};
    case ProblemKind::PorousMedium:
      return {PhaseForm{1.0, spec.pme_exponent, 0.0,
                        {EndpointKind::MovingFree, 0.0, {}},
                        {EndpointKind::MovingFree, 0.0, {}}}};
  }
  return {};
}

double endpoint_flux(const PhaseForm& form, const TestSpace& space, const ScalarField& u,
                     bool right_end, double t) {
  const EndpointCondition& end = right_end ? form.right : form.left;
  const double normal = right_end ? 1.0 : -1.0;
  const auto& c = u.coefficients;
  const double u_end = right_end ? c.back() : c.front();
  switch (end.kind) {
    case EndpointKind::MovingFree:
      return 0.0;
    case EndpointKind::FixedNeumann:
      return form.flux_coefficient(u_end) * end.gradient(t) * normal;
    case EndpointKind::FixedDirichlet:
    case EndpointKind::Interface: {
      const std::size_t e = right_end ? space.num_elements() - 1 : 0;
      const double x = right_end ? space.vertices().back() : space.vertices().front();
      return form.flux_coefficient(u_end) * element_gradient(space, c, e, x) * normal;
    }
  }
  return 0.0;
}

std::vector<double> operator_functional(const PhaseForm& form, const TestSpace& space,
                                        const ScalarField& u, double t) {
  const int q = form.quadrature_points(space.degree());
  const std::span<const double> c(u.coefficients);
  std::vector<double> v(space.num_dofs(), 0.0);
  for_each_quadrature_point(space, q, [&](const QuadraturePoint& qp) {
    const double uq = qp.value(c);
    const double flux = form.flux_coefficient(uq) * qp.gradient(c) * qp.weight;
    const double src = form.source * qp.weight;
    for (std::size_t j = 0; j < qp.basis.size(); ++j)
      v[qp.first_dof + j] += src * qp.basis[j] - flux * qp.grad[j];
  });
  v.front() += endpoint_flux(form, space, u, false, t);
  v.back() += endpoint_flux(form, space, u, true, t);
  return v;
}

double operator_total(const PhaseForm& form, const TestSpace& space, const ScalarField& u,
                      double t) {
  return endpoint_flux(form, space, u, false, t) + endpoint_flux(form, space, u, true, t) +
         form.source * space.domain_length();
}

}  // namespace mmfem
