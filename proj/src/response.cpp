#include "cqnc/response.hpp"

#include <string>

#include "cqnc/errors.hpp"

namespace cqnc {

std::string_view to_string(ResponseLabel label) {
  switch (label) {
    case ResponseLabel::chi_m: return "chi_m";
    case ResponseLabel::chi_a: return "chi_a";
    case ResponseLabel::chi_M: return "chi_M";
    case ResponseLabel::xi_M: return "xi_M";
    case ResponseLabel::chi_M_prime: return "chi_M_prime";
    case ResponseLabel::lambda_plus: return "lambda_plus";
    case ResponseLabel::lambda_minus: return "lambda_minus";
  }
  return "unknown";
}

ResponseLabel response_label_from_string(std::string_view name) {
  for (auto label : {ResponseLabel::chi_m, ResponseLabel::chi_a, ResponseLabel::chi_M,
                     ResponseLabel::xi_M, ResponseLabel::chi_M_prime, ResponseLabel::lambda_plus,
                     ResponseLabel::lambda_minus}) {
    if (to_string(label) == name) return label;
  }
  throw ParameterError("unknown response label: " + std::string(name));
}

ComplexResponse make_response(ResponseLabel label, const SystemParams& p) {
  const double Omega = p.Omega(), gamma_m = p.gamma_m(), kappa = p.kappa();
  const double gamma_M = p.gamma_M(), Delta_M = p.Delta_M(), gain = p.gain();
  switch (label) {
    case ResponseLabel::chi_m:
      return {label, [=](double w) { return chi_m(w, Omega, gamma_m); }};
    case ResponseLabel::chi_a:
      return {label, [=](double w) { return chi_a(w, kappa); }};
    case ResponseLabel::chi_M:
      return {label, [=](double w) { return chi_M(w, gamma_M); }};
    case ResponseLabel::xi_M:
      return {label, [=](double w) { return xi_M(w, gamma_M, Delta_M); }};
    case ResponseLabel::chi_M_prime:
      return {label, [=](double w) { return chi_M_prime(w, gamma_M, Delta_M); }};
    case ResponseLabel::lambda_plus:
      return {label, [=](double w) { return lambda_pm(w, kappa, gain, Branch::plus); }};
    case ResponseLabel::lambda_minus:
      return {label, [=](double w) { return lambda_pm(w, kappa, gain, Branch::minus); }};
  }
  throw ParameterError("unknown response label");
}

} // namespace cqnc
