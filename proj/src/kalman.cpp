#include "mmae/kalman.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace mmae {

Mat4 symmetrize(const Mat4& m) { return 0.5 * (m + m.transpose()); }

bool is_valid_covariance(const Mat4& cov) {
  const double scale = std::max(cov.norm(), 1.0);
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    return false;
  }
  Eigen::SelfAdjointEigenSolver<Mat4> es(cov, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -1e-9 * std::abs(cov.trace()) - 1e-30;
}

namespace {

void check_finite(const GaussianBelief& b, const char* where) {
  if (!b.mean.allFinite() || !b.cov.allFinite()) {
    throw NumericalError(std::string("non-finite belief after ") + where);
  }
}

}  // namespace

GaussianBelief kf_predict(const GaussianBelief& belief, const Mat4& transition,
                          const Mat4& process_noise) {
  GaussianBelief out;
  out.mean = transition * belief.mean;
  out.cov = symmetrize(transition * belief.cov * transition.transpose() +
                       process_noise);
  check_finite(out, "kf_predict");
  return out;
}

GaussianBelief ekf_predict(
    const GaussianBelief& belief,
    const std::function<StateVector(const StateVector&)>& propagate,
    const std::function<Mat4(const StateVector&)>& jacobian,
    const Mat4& process_noise) {
  const Mat4 jac = jacobian(belief.mean);
  GaussianBelief out;
  out.mean = propagate(belief.mean);
  out.cov = symmetrize(jac * belief.cov * jac.transpose() + process_noise);
  check_finite(out, "ekf_predict");
  return out;
}

std::pair<GaussianBelief, Innovation> kf_update(
    const GaussianBelief& belief, const Vec2& measurement,
    const Mat24& measurement_matrix, const Mat2& measurement_noise) {
  const Mat24& h = measurement_matrix;
  Innovation inn;
  inn.residual = measurement - h * belief.mean;
  inn.cov = h * belief.cov * h.transpose() + measurement_noise;
  inn.cov = 0.5 * (inn.cov + inn.cov.transpose());

  Eigen::LLT<Mat2> llt(inn.cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("singular innovation covariance in kf_update");
  }
  // K = P H^T E^-1 via the Cholesky factor.
  const Eigen::Matrix<double, 4, 2> gain =
      llt.solve(h * belief.cov).transpose();

  GaussianBelief out;
  out.mean = belief.mean + gain * inn.residual;
  const Mat4 i_kh = Mat4::Identity() - gain * h;
  out.cov = symmetrize(i_kh * belief.cov * i_kh.transpose() +
                       gain * measurement_noise * gain.transpose());
  check_finite(out, "kf_update");
  return {out, inn};
}

double gaussian_likelihood(const Innovation& innovation) {
  Eigen::LLT<Mat2> llt(innovation.cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("singular innovation covariance in likelihood");
  }
  const Mat2 l = llt.matrixL();
  // det(2*pi*E) = (2*pi)^2 * (l00*l11)^2
  const double log_det = 2.0 * (std::log(l(0, 0)) + std::log(l(1, 1)));
  const Vec2 whitened = l.triangularView<Eigen::Lower>().solve(
      innovation.residual);
  const double log_density = -std::log(2.0 * M_PI) - 0.5 * log_det -
                             0.5 * whitened.squaredNorm();
  const double density = std::exp(log_density);
  if (!std::isfinite(density)) {
    throw NumericalError("non-finite measurement likelihood");
  }
  return density;
}

}  // namespace mmae
