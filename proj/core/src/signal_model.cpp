#include "radnet/signal_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "radnet/marcum.hpp"

namespace radnet {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double SlowTimeCode::energy() const {
  double acc = 0.0;
  for (int i = 0; i < entries.size(); ++i) acc += std::norm(entries[i]);
  return acc;
}

bool is_unit_energy(const SlowTimeCode& code, double tol) {
  return std::abs(code.energy() - 1.0) <= tol;
}

double RadarNodeModel::b0() const { return -std::log(pfa); }

void RadarNodeModel::validate() const {
  auto fail = [](const char* msg) { throw std::invalid_argument(msg); };
  if (pulse_count < 3) fail("pulse_count must be >= 3");
  if (element_count < 1) fail("element_count must be >= 1");
  if (pulse_samples < 1) fail("pulse_samples must be >= 1");
  if (!(wavelength_m > 0.0)) fail("wavelength_m must be positive");
  if (!(element_spacing_m > 0.0)) fail("element_spacing_m must be positive");
  if (!(pri_s > 0.0)) fail("pri_s must be positive");
  if (!(bandwidth_hz > 0.0)) fail("bandwidth_hz must be positive");
  if (!(std::abs(rho_time) < 1.0)) fail("rho_time must lie in (-1, 1)");
  if (!(std::abs(rho_space) < 1.0)) fail("rho_space must lie in (-1, 1)");
  if (!(alpha_sq > 0.0)) fail("alpha_sq must be positive");
  if (!(pfa > 0.0 && pfa < 1.0)) fail("pfa must lie in (0, 1)");
}

ComplexVector temporal_steering(double doppler_hz, double pri_s, int pulses) {
  if (!std::isfinite(doppler_hz) || !std::isfinite(pri_s))
    throw std::invalid_argument("temporal_steering: non-finite input");
  ComplexVector a(pulses);
  for (int m = 0; m < pulses; ++m) a[m] = std::polar(1.0, kTwoPi * doppler_hz * m * pri_s);
  return a;
}

ComplexVector spatial_steering(double theta_rad, double spacing_m, double wavelength_m,
                               int elements) {
  if (!(std::abs(theta_rad) < std::numbers::pi / 2.0))
    throw std::invalid_argument("spatial_steering: |theta| must be < pi/2");
  ComplexVector a(elements);
  const double phase_step = kTwoPi * spacing_m * std::sin(theta_rad) / wavelength_m;
  for (int m = 0; m < elements; ++m) a[m] = std::polar(1.0, phase_step * m);
  return a;
}

SymmetricMatrix exp_correlation_matrix(double rho, int order) {
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("exp_correlation_matrix: |rho| must be < 1");
  SymmetricMatrix m(order);
  for (int i = 0; i < order; ++i)
    for (int j = 0; j <= i; ++j) m.set(i, j, std::pow(rho, i - j));
  return m;
}

double doppler_shift(double radial_velocity_mps, double wavelength_m) {
  return 2.0 * radial_velocity_mps / wavelength_m;
}

CodeMatrices build_code_matrices(const RadarNodeModel& node, double doppler_hz,
                                 double theta_rad) {
  const int m = node.pulse_count;
  const int nr = node.element_count;

  const SymmetricMatrix sigma_t = exp_correlation_matrix(node.rho_time, m);
  const SymmetricMatrix sigma_s = exp_correlation_matrix(node.rho_space, nr);
  const SymmetricMatrix sigma_t_inv = SpdSolver(sigma_t, "slow-time covariance").inverse();
  const SpdSolver sigma_s_solver(sigma_s, "spatial covariance");

  const ComplexVector a_t = temporal_steering(doppler_hz, node.pri_s, m);
  const ComplexVector a_s = spatial_steering(theta_rad, node.element_spacing_m,
                                             node.wavelength_m, nr);

  CodeMatrices cm;
  cm.m0 = ComplexMatrix(m, m);
  cm.m1 = ComplexMatrix(m, m);
  cm.m2 = ComplexMatrix(m, m);
  for (int i = 0; i < m; ++i) {
    const cplx b_i(0.0, kTwoPi * node.pri_s * i);
    for (int j = 0; j < m; ++j) {
      const cplx b_j(0.0, kTwoPi * node.pri_s * j);
      const cplx m0ij = sigma_t_inv(i, j) * a_t[i] * std::conj(a_t[j]);
      cm.m0(i, j) = m0ij;
      cm.m1(i, j) = std::conj(b_i) * m0ij;
      cm.m2(i, j) = m0ij * b_i * std::conj(b_j);
    }
  }

  // Spatial quadratic forms through one factorization of Sigma_s.
  const ComplexVector w_a = sigma_s_solver.solve(a_s);
  cplx q_s(0.0, 0.0);
  for (int i = 0; i < nr; ++i) q_s += std::conj(a_s[i]) * w_a[i];
  const double a_sigma_a = q_s.real();

  ComplexVector u(nr);  // a_s .* b_s with b_s(m) = i 2 pi d cos(theta) m / lambda
  const double kappa = kTwoPi * node.element_spacing_m * std::cos(theta_rad) / node.wavelength_m;
  for (int i = 0; i < nr; ++i) u[i] = a_s[i] * cplx(0.0, kappa * i);
  const ComplexVector w_u = sigma_s_solver.solve(u);
  cplx u_sigma_u(0.0, 0.0), u_sigma_a(0.0, 0.0);
  for (int i = 0; i < nr; ++i) {
    u_sigma_u += std::conj(u[i]) * w_u[i];
    u_sigma_a += std::conj(u[i]) * w_a[i];
  }

  const double np_alpha = node.pulse_samples * node.alpha_sq;
  const double pi_b = std::numbers::pi * node.bandwidth_hz;
  cm.eps_alpha = np_alpha * a_sigma_a;
  cm.eps_tau = 2.0 * np_alpha * pi_b * pi_b / 3.0 * a_sigma_a;
  cm.eps_f = 2.0 * np_alpha * a_sigma_a;
  cm.eps_theta = 2.0 * np_alpha * (u_sigma_u.real() - std::norm(u_sigma_a) / a_sigma_a);
  return cm;
}

double sinr(const SlowTimeCode& code, const CodeMatrices& cm) {
  return cm.eps_alpha * cm.m0.sesquilinear_form(code.entries).real();
}

double detection_probability(double sinr_value, double pfa) {
  if (!(sinr_value >= 0.0) || !std::isfinite(sinr_value))
    throw std::invalid_argument("detection_probability: sinr must be finite and >= 0");
  const double b0 = -std::log(pfa);
  return marcum_q(1, std::sqrt(2.0 * sinr_value), std::sqrt(2.0 * b0));
}

double phi(const SlowTimeCode& code, const CodeMatrices& cm) {
  const double w0 = cm.m0.sesquilinear_form(code.entries).real();
  const double w2 = cm.m2.sesquilinear_form(code.entries).real();
  const cplx w1 = cm.m1.sesquilinear_form(code.entries);
  return w0 * w2 - std::norm(w1);
}

std::array<double, 3> crlb_diagonal(const SlowTimeCode& code, const CodeMatrices& cm) {
  const double w0 = cm.m0.sesquilinear_form(code.entries).real();
  const double w2 = cm.m2.sesquilinear_form(code.entries).real();
  const cplx w1 = cm.m1.sesquilinear_form(code.entries);
  const double phi_val = w0 * w2 - std::norm(w1);
  // Scale-aware guard for the Doppler division.
  if (phi_val <= 1e-14 * w0 * w2)
    throw DegeneracyError("crlb_diagonal: code makes Doppler unidentifiable (phi ~ 0)");
  return {1.0 / (cm.eps_tau * w0), w0 / (cm.eps_f * phi_val), 1.0 / (cm.eps_theta * w0)};
}

std::array<double, 3> measurement_covariance(const SlowTimeCode& code, const CodeMatrices& cm,
                                             double wavelength_m) {
  const auto crlb = crlb_diagonal(code, cm);
  const double tr = 0.5 * kSpeedOfLight;
  const double tf = 0.5 * wavelength_m;
  return {tr * tr * crlb[0], tf * tf * crlb[1], crlb[2]};
}

}  // namespace radnet
