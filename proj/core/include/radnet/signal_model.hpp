#pragma once

#include <array>

#include "radnet/linalg.hpp"

namespace radnet {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Slow-time code: one complex weight per pulse, unit total energy.
struct SlowTimeCode {
  ComplexVector entries;

  int length() const { return entries.size(); }
  double energy() const;
};

bool is_unit_energy(const SlowTimeCode& code, double tol = 1e-12);

/// Per-node constants of one radar sensor. Everything required to build the
/// code-independent matrices and SINR/CRLB scale factors for a frame.
struct RadarNodeModel {
  double position_x_m = 0.0;
  double position_y_m = 0.0;
  double wavelength_m = 0.0;       // lambda_n
  double element_spacing_m = 0.0;  // d_n
  int element_count = 0;           // N_r
  int pulse_count = 0;             // M
  double pri_s = 0.0;              // T_r
  double bandwidth_hz = 0.0;       // B
  int pulse_samples = 0;           // N_p
  double rho_time = 0.0;           // slow-time one-lag correlation
  double rho_space = 0.0;          // spatial one-lag correlation
  double alpha_sq = 0.0;           // |alpha|^2 target power
  double pfa = 1e-6;

  double b0() const;  // -ln(P_fa)
  /// Throws std::invalid_argument on the first violated invariant.
  void validate() const;
};

/// Code-independent quadratic kernels of one node at one frame.
///   m0 = Sigma_t^{-1} .* (a_t a_t^H)           (Hermitian PD)
///   m1 = Diag(conj(b_t)) m0                    (general complex)
///   m2 = m0 .* (b_t b_t^H)                     (Hermitian PSD)
/// with b_t(m) = i 2 pi T_r m, plus the spatial/fast-time scale factors.
struct CodeMatrices {
  ComplexMatrix m0;
  ComplexMatrix m1;
  ComplexMatrix m2;
  double eps_alpha = 0.0;  // SINR scale
  double eps_tau = 0.0;    // delay-CRLB scale, s^-2
  double eps_f = 0.0;      // Doppler-CRLB scale
  double eps_theta = 0.0;  // angle-CRLB scale, rad^-2
};

/// Temporal steering vector: entry m = exp(i 2 pi f_d m T_r), m = 0..M-1.
ComplexVector temporal_steering(double doppler_hz, double pri_s, int pulses);

/// Spatial steering vector: entry m = exp(i 2 pi m d sin(theta) / lambda).
ComplexVector spatial_steering(double theta_rad, double spacing_m, double wavelength_m,
                               int elements);

/// Exponentially correlated covariance: entry(i,j) = rho^|i-j|, positive
/// definite for |rho| < 1. Throws std::invalid_argument otherwise.
SymmetricMatrix exp_correlation_matrix(double rho, int order);

double doppler_shift(double radial_velocity_mps, double wavelength_m);

CodeMatrices build_code_matrices(const RadarNodeModel& node, double doppler_hz,
                                 double theta_rad);

/// Output SINR eps_alpha * c^H m0 c for a unit-energy code.
double sinr(const SlowTimeCode& code, const CodeMatrices& cm);

/// Q_1(sqrt(2 sinr), sqrt(2 b0)) with b0 = -ln(P_fa). Strictly increasing in
/// sinr; equals P_fa at sinr = 0.
double detection_probability(double sinr_value, double pfa);

/// phi(c) = (c^H m0 c)(c^H m2 c) - |c^H m1 c|^2, nonnegative by the
/// Cauchy-Schwarz inequality in the m0 inner product.
double phi(const SlowTimeCode& code, const CodeMatrices& cm);

/// Diagonal of the delay/Doppler/angle CRLB (units s^2, Hz^-2-equivalent, rad^2).
/// Throws DegeneracyError when phi(c) <= 1e-14 (c^H m0 c)(c^H m2 c).
std::array<double, 3> crlb_diagonal(const SlowTimeCode& code, const CodeMatrices& cm);

/// Diagonal of R = T CRLB T with T = Diag(c_light/2, lambda/2, 1):
/// range m^2, radial velocity (m/s)^2, angle rad^2.
std::array<double, 3> measurement_covariance(const SlowTimeCode& code, const CodeMatrices& cm,
                                             double wavelength_m);

}  // namespace radnet
