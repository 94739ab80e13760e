#pragma once

namespace radnet {

/// Generalized Marcum Q function Q_v(a, b) for integer order v >= 1:
/// the survival function at b^2 of a noncentral chi-square variate with
/// 2v degrees of freedom and noncentrality a^2, evaluated in its
/// canonical Poisson-weighted incomplete-gamma series. All terms are
/// nonnegative, so the result carries absolute accuracy ~1e-14 over
/// a, b in [0, 60].
///
/// Throws std::invalid_argument on non-finite or negative inputs or v < 1.
double marcum_q(int order, double a, double b);

/// Q_{v+1}(a, b) - Q_v(a, b), the derivative of Q_v(sqrt(2x), b) with respect
/// to x at x = a^2/2. Evaluated as a sum of nonnegative terms, so it keeps
/// full relative accuracy even where both Q values round to 1.
double marcum_q_increment(int order, double a, double b);

/// Q_{v+2}(a, b) - 2 Q_{v+1}(a, b) + Q_v(a, b), the second derivative in the
/// same sense, evaluated term by term without forming the near-cancelling
/// Q differences.
double marcum_q_second_difference(int order, double a, double b);

}  // namespace radnet
