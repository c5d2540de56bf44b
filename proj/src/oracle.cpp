#include "ipclab/oracle.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ipclab/errors.hpp"

namespace ipclab {

std::string to_string(Pairing p) { return p == Pairing::paper ? "paper" : "sampler"; }

Pairing pairing_from_string(const std::string& s) {
  if (s == "paper") return Pairing::paper;
  if (s == "sampler") return Pairing::sampler;
  throw ConfigError("unknown pairing '" + s + "' (expected paper or sampler)");
}

OracleConfig OracleConfig::printed(double alpha) {
  OracleConfig c;
  c.alpha = alpha;
  c.forest_factor = 0.5;
  c.conventions = Conventions::printed();
  c.pairing = Pairing::paper;
  return c;
}

OracleConfig OracleConfig::sampler(double alpha, const Conventions& conv) {
  OracleConfig c;
  c.alpha = alpha;
  c.conventions = conv;
  return c;
}

void OracleConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 0.5)) throw std::domain_error("oracle needs alpha in (0, 1/2), got " + std::to_string(alpha));
  if (!(forest_factor > 0.0)) throw std::domain_error("forest_factor must be positive");
}

std::string OracleConfig::describe() const {
  std::ostringstream os;
  os << "alpha=" << alpha << " forest_factor=" << forest_factor << " pairing=" << to_string(pairing) << ' '
     << conventions.describe();
  return os.str();
}

double expected_w_moment(double alpha, double c, int i) {
  const double a = alpha / (1.0 - alpha);
  const double w0 = a / (c + a);
  const double p = alpha + (1.0 - alpha) / (1.0 + c / a);
  return w0 * std::pow(p, i);
}

namespace {

// G_j = int_0^inf g(e^{-b x}) x^j e^{-x} / j! dx for j = 0..k
std::vector<double> gamma_mixture_integrals(double alpha, int k, const std::function<double(double)>& g) {
  const double b = (1.0 - alpha) / alpha;
  boost::math::quadrature::exp_sinh<double> integrator;
  std::vector<double> out(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) {
    const double lg = std::lgamma(j + 1.0);
    auto f = [&](double x) {
      if (x <= 0.0) return j == 0 ? g(1.0) : 0.0;
      const double dens = std::exp(j * std::log(x) - x - lg);
      return dens == 0.0 ? 0.0 : g(std::exp(-b * x)) * dens;
    };
    // split at the mode so the bulk of the mass sits near a finite endpoint
    const double m = static_cast<double>(j);
    double head = 0.0;
    if (m > 0.0) {
      boost::math::quadrature::tanh_sinh<double> ts;
      head = ts.integrate(f, 0.0, m, 1e-14);
    }
    out[static_cast<std::size_t>(j)] = head + integrator.integrate([&](double t) { return f(m + t); }, 0.0,
                                                                   std::numeric_limits<double>::infinity(), 1e-14);
  }
  return out;
}

// P(J = j) for J ~ Binomial(i, 1 - alpha)
double binom_weight(int i, int j, double alpha) {
  const double lc = std::lgamma(i + 1.0) - std::lgamma(j + 1.0) - std::lgamma(i - j + 1.0);
  return std::exp(lc + j * std::log1p(-alpha) + (i - j) * std::log(alpha));
}

double beta_coefficient(const OracleConfig& cfg) {
  if (!cfg.conventions.include_backbone_weights) return 0.0;
  const double a = cfg.alpha;
  return cfg.conventions.beta == BetaConvention::paper ? (1.0 + a) / 2.0 : (2.0 - a) / 2.0;
}

double edges_per_tree(const OracleConfig& cfg) {
  const double a = cfg.alpha;
  return cfg.conventions.edges == TreeEdges::progeny ? 1.0 / (1.0 - a) : (2.0 - a) / (1.0 - a);
}

}  // namespace

std::vector<double> expected_w_function(double alpha, int k, const std::function<double(double)>& g) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0, 1)");
  const auto G = gamma_mixture_integrals(alpha, k, g);
  std::vector<double> out(static_cast<std::size_t>(k) + 1, 0.0);
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j <= i; ++j) out[static_cast<std::size_t>(i)] += binom_weight(i, j, alpha) * G[j];
  return out;
}

double expected_w_function_sum(double alpha, const std::function<double(double)>& g) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double I = ts.integrate([&](double w) { return w <= 0.0 ? 0.0 : g(w) / w; }, 0.0, 1.0, 1e-14);
  return alpha / ((1.0 - alpha) * (1.0 - alpha)) * I;
}

double expected_forest_given_w(const OracleConfig& cfg, double w) {
  if (w <= 0.0) return 0.0;
  const double a = cfg.alpha;
  const double ap = a / (1.0 - a);
  const double lw = std::log(std::min(w, 1.0));
  const double theta = std::exp(ap * lw);
  const double u = w * theta;
  const bool thin_all = cfg.conventions.thin == ThinCount::D;
  // E[thinned count] written without the (1 - u)/u * 1/(1 - u) cancellation
  double kept;
  if (cfg.conventions.retention == Retention::plain) {
    kept = (1.0 - a) * (1.0 - u) / theta + (thin_all ? w : 0.0);
  } else {
    const double eta = -std::expm1(ap * lw);
    kept = (1.0 - a) * eta / theta;
    if (thin_all) {
      const double one_minus_u = -std::expm1((1.0 + ap) * lw);
      kept += one_minus_u > 0.0 ? w * eta / one_minus_u : w * a;
    }
  }
  return cfg.forest_factor * 0.5 * w * edges_per_tree(cfg) * kept;
}

double expected_beta_given_w(const OracleConfig& cfg, double w) { return beta_coefficient(cfg) * w; }

double expected_Bk_given_w(const OracleConfig& cfg, double w) {
  const double f = expected_forest_given_w(cfg, w);
  return cfg.pairing == Pairing::paper ? f + expected_beta_given_w(cfg, w) : f;
}

std::vector<OracleRow> oracle_table(const OracleConfig& cfg, int K) {
  cfg.validate();
  if (K < 0) throw std::domain_error("K must be non-negative");
  const auto forest = expected_w_function(cfg.alpha, K, [&](double w) { return expected_forest_given_w(cfg, w); });
  const double cb = beta_coefficient(cfg);
  std::vector<OracleRow> rows;
  double C = 0.0;
  for (int k = 0; k <= K; ++k) {
    const double beta_here = cb * expected_w_moment(cfg.alpha, 1.0, k);
    OracleRow r;
    r.k = k;
    r.Bk = forest[static_cast<std::size_t>(k)] + (cfg.pairing == Pairing::paper ? beta_here : 0.0);
    C += r.Bk;
    // under the sampler pairing beta_k belongs to C_k, paired with W_{k-1}
    if (cfg.pairing == Pairing::sampler && k > 0) C += cb * expected_w_moment(cfg.alpha, 1.0, k - 1);
    r.Ck = C;
    rows.push_back(r);
  }
  return rows;
}

double expected_Bk(const OracleConfig& cfg, int k) { return oracle_table(cfg, k).back().Bk; }

double expected_Ck(const OracleConfig& cfg, int k) { return oracle_table(cfg, k).back().Ck; }

double expected_Ck_limit(const OracleConfig& cfg) {
  cfg.validate();
  return expected_w_function_sum(cfg.alpha, [&](double w) {
    return expected_forest_given_w(cfg, w) + expected_beta_given_w(cfg, w);
  });
}

double expected_Ck_tail_bound(const OracleConfig& cfg, int k) {
  cfg.validate();
  const double a = cfg.alpha;
  // every level term is at most G W^{(1-2a)/(1-a)}, and E[W_i^{(1-2a)/(1-a)}] = a/(1-a) (2a)^i
  const double eT = edges_per_tree(cfg);
  const double forest_g =
      cfg.forest_factor * 0.5 * (eT * (1.0 - a) + (cfg.conventions.thin == ThinCount::D ? eT : 0.0));
  const double cb = beta_coefficient(cfg);
  const double scale = a / (1.0 - a);
  double bound = (forest_g + cb) * scale * std::pow(2.0 * a, k + 1) / (1.0 - 2.0 * a);
  if (cfg.pairing == Pairing::sampler) bound += cb * scale * std::pow(2.0 * a, k);
  return bound;
}

double printed_limit(double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw std::domain_error("printed limit needs alpha in (0, 1/2)");
  const double a = alpha;
  return a * (2.0 - 5.0 * a * a) / (4.0 * (1.0 - a) * (1.0 - a) * (1.0 - 2.0 * a));
}

double uniform_laplace(double s) {
  if (s < 1e-4) return 1.0 - s / 2.0 + s * s / 6.0;
  return -std::expm1(-s) / s;
}

double special_case_theta(double alpha, double p) {
  if (p <= 0.0) return 0.0;
  return std::pow(p, alpha / (1.0 - alpha));
}

SpecialTransitions special_case_transitions(double alpha) { return {alpha, alpha / (1.0 - alpha)}; }

}  // namespace ipclab
