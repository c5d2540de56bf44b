#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "ipclab/conventions.hpp"

namespace ipclab {

/// How backbone weights are attached to levels when forming C_k.
///   sampler: C_k = sum_{i<=k} forest_i + beta_1 + ... + beta_k
///   paper:   B_k carries beta_{k+1}, so C_k = sum_{i<=k} (forest_i + beta_{i+1})
enum class Pairing { sampler, paper };

std::string to_string(Pairing p);
Pairing pairing_from_string(const std::string& s);

/// Closed-form expectations for offspring pgf 1 - (1 - s)^alpha, alpha in (0, 1/2).
struct OracleConfig {
  double alpha = 0.25;
  /// Scales the forest term. 1 is plain thinning; 1/2 reproduces the printed
  /// E[D_hat] = W E[D] / 2.
  double forest_factor = 1.0;
  Conventions conventions;
  Pairing pairing = Pairing::sampler;

  /// The flags behind the printed worked example: forest_factor 1/2, paper pairing.
  static OracleConfig printed(double alpha);
  /// The structural sampler's defaults.
  static OracleConfig sampler(double alpha, const Conventions& c = {});

  /// Throws std::domain_error unless alpha is in (0, 1/2) and forest_factor > 0.
  void validate() const;
  std::string describe() const;
};

/// E[W_i^c] = E[W_0^c] E[P^c]^i.
double expected_w_moment(double alpha, double c, int i);

/// E[g(W_i)] for i = 0..k by quadrature over the law -log W_i = b Gamma(1 + J),
/// b = (1 - alpha)/alpha, J ~ Binomial(i, 1 - alpha). Valid for alpha in (0, 1).
std::vector<double> expected_w_function(double alpha, int k, const std::function<double(double)>& g);

/// sum_{i>=0} E[g(W_i)] = alpha/(1-alpha)^2 int_0^1 g(w)/w dw.
double expected_w_function_sum(double alpha, const std::function<double(double)>& g);

/// Expected forest edge weight at a level with W_k = w.
double expected_forest_given_w(const OracleConfig& cfg, double w);
/// E[beta_{k+1} | W_k = w]: (1 + alpha)w/2 (paper) or (2 - alpha)w/2 (complement).
double expected_beta_given_w(const OracleConfig& cfg, double w);
/// E[B_k | W_k = w]; includes beta_{k+1} under the paper pairing.
double expected_Bk_given_w(const OracleConfig& cfg, double w);

double expected_Bk(const OracleConfig& cfg, int k);
double expected_Ck(const OracleConfig& cfg, int k);
double expected_Ck_limit(const OracleConfig& cfg);

/// Bound on expected_Ck_limit - expected_Ck(k), of the form G (2 alpha)^{k+1} / (1 - 2 alpha).
double expected_Ck_tail_bound(const OracleConfig& cfg, int k);

/// alpha (2 - 5 alpha^2) / (4 (1 - alpha)^2 (1 - 2 alpha)).
double printed_limit(double alpha);

struct OracleRow {
  int k = 0;
  double Bk = 0.0;
  double Ck = 0.0;
};

/// Rows k = 0..K computed in one pass.
std::vector<OracleRow> oracle_table(const OracleConfig& cfg, int K);

/// Laplace transform of Unif[0, 1]: (1 - e^{-s}) / s.
double uniform_laplace(double s);

/// theta(p) = p^{alpha/(1-alpha)}.
double special_case_theta(double alpha, double p);

struct SpecialTransitions {
  double p_stay = 0.0;
  /// The jump factor W_{k+1}/W_k has CDF x^exponent.
  double jump_cdf_exponent = 0.0;
};
SpecialTransitions special_case_transitions(double alpha);

}  // namespace ipclab
