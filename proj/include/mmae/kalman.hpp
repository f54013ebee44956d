#pragma once

#include <functional>
#include <utility>

#include "mmae/types.hpp"

namespace mmae {

/// Forces exact symmetry: (M + M^T) / 2.
Mat4 symmetrize(const Mat4& m);

/// Checks symmetry within 1e-9 relative tolerance and eigenvalues
/// >= -1e-9 * trace.
bool is_valid_covariance(const Mat4& cov);

/// Linear time update: mean' = A*mean, cov' = A*cov*A^T + Q.
GaussianBelief kf_predict(const GaussianBelief& belief, const Mat4& transition,
                          const Mat4& process_noise);

/// Extended time update: mean' = f(mean), cov' = J*cov*J^T + Q with
/// J the Jacobian evaluated at the prior mean.
GaussianBelief ekf_predict(
    const GaussianBelief& belief,
    const std::function<StateVector(const StateVector&)>& propagate,
    const std::function<Mat4(const StateVector&)>& jacobian,
    const Mat4& process_noise);

/// Measurement update in Joseph stabilized form. Returns the posterior
/// belief and the innovation (residual, H*P*H^T + R).
/// Throws NumericalError if the innovation covariance is not positive
/// definite.
std::pair<GaussianBelief, Innovation> kf_update(const GaussianBelief& belief,
                                                const Vec2& measurement,
                                                const Mat24& measurement_matrix,
                                                const Mat2& measurement_noise);

/// Bivariate normal density of the residual under the innovation
/// covariance, det(2*pi*E)^(-1/2) * exp(-e^T E^-1 e / 2), evaluated via
/// Cholesky. Throws NumericalError if E is not positive definite.
double gaussian_likelihood(const Innovation& innovation);

/// Densities below this are clamped before weight multiplication so a
/// single outlier cannot extinguish a model permanently.
inline constexpr double kLikelihoodFloor = 1e-300;

}  // namespace mmae
