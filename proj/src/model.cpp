#include "msnm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "msnm/error.hpp"

namespace msnm {

namespace {

void normalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  }
  if (v(best) < 0.0) v = -v;
}

std::string range_text(double upper) {
  std::ostringstream os;
  os.precision(17);
  os << "[0, " << upper << ")";
  return os.str();
}

}  // namespace

EigenDecomposition eig_symmetric(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols() || s.rows() == 0) {
    throw ValidationError("eigendecomposition needs a non-empty square matrix");
  }
  if (!s.allFinite()) throw ValidationError("matrix has non-finite entries");

  // Tridiagonalization followed by implicit symmetric QR; only the lower
  // triangle is read.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");

  const Eigen::Index m = s.rows();
  // solver output is ascending; reversed it is non-increasing, and the
  // stable sort only reorders values the solver left out of order
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.rbegin(), order.rend(), Eigen::Index{0});
  const auto& values = solver.eigenvalues();
  std::ranges::stable_sort(order, [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });

  EigenDecomposition out;
  out.eigenvalues.resize(m);
  out.eigenvectors.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto src = order[static_cast<std::size_t>(i)];
    double value = values(src);
    if (value < 0.0) {
      if (value < -kEigenvalueClamp) {
        std::ostringstream os;
        os << "matrix is not positive semi-definite: eigenvalue " << value;
        throw ValidationError(os.str());
      }
      value = 0.0;
    }
    out.eigenvalues(i) = value;
    out.eigenvectors.col(i) = solver.eigenvectors().col(src);
    normalize_sign(out.eigenvectors.col(i));
  }
  return out;
}

EigenDecomposition eig_covariance(const Dataset& scaled) {
  scaled.validate_for_fitting();
  const auto n = static_cast<double>(scaled.rows());
  Eigen::MatrixXd s = (scaled.values.transpose() * scaled.values) / n;
  // symmetrize away round-off from the product
  s = 0.5 * (s + s.transpose()).eval();
  return eig_symmetric(s);
}

double ml_noise_variance(const Eigen::VectorXd& eigenvalues, Eigen::Index p) {
  const Eigen::Index m = eigenvalues.size();
  if (p < 1) throw ValidationError("P must be >= 1");
  if (p >= m) {
    throw ValidationError("P must be < M (P=" + std::to_string(p) + ", M=" + std::to_string(m) + ")");
  }
  return eigenvalues.tail(m - p).sum() / static_cast<double>(m - p);
}

FittedModel FittedModel::from_decomposition(const EigenDecomposition& eig, Eigen::Index p) {
  const double sigma2 = ml_noise_variance(eig.eigenvalues, p);
  return from_parts(eig.eigenvectors.leftCols(p), eig.eigenvalues, sigma2);
}

FittedModel FittedModel::from_parts(Eigen::MatrixXd u, Eigen::VectorXd eigenvalues,
                                    double sigma2_ml) {
  FittedModel model;
  model.u_ = std::move(u);
  model.eigenvalues_ = std::move(eigenvalues);
  model.sigma2_ml_ = sigma2_ml;
  model.validate();
  return model;
}

void FittedModel::validate() const {
  const Eigen::Index m = u_.rows();
  const Eigen::Index p = u_.cols();
  if (p < 1) throw ValidationError("P must be >= 1");
  if (p >= m) {
    throw ValidationError("P must be < M (P=" + std::to_string(p) + ", M=" + std::to_string(m) + ")");
  }
  if (eigenvalues_.size() != m) {
    throw ValidationError("model has " + std::to_string(eigenvalues_.size()) +
                          " eigenvalues for M=" + std::to_string(m));
  }
  if (!u_.allFinite() || !eigenvalues_.allFinite() || !std::isfinite(sigma2_ml_)) {
    throw ValidationError("model has non-finite parameters");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (eigenvalues_(i) < 0.0) throw ValidationError("model has a negative eigenvalue");
    if (i > 0 && eigenvalues_(i) > eigenvalues_(i - 1)) {
      throw ValidationError("model eigenvalues are not sorted in non-increasing order");
    }
  }
  const Eigen::MatrixXd gram = u_.transpose() * u_;
  const double err = (gram - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff();
  if (err > 1e-8) throw ValidationError("model loadings are not orthonormal");
  if (sigma2_ml_ < 0.0) throw ValidationError("sigma2_ml must be >= 0");
  const double expected = ml_noise_variance(eigenvalues_, p);
  if (std::abs(sigma2_ml_ - expected) > 1e-12 * std::max(1.0, std::abs(expected))) {
    throw ValidationError("sigma2_ml does not equal the mean of the trailing eigenvalues");
  }
}

FittedModel fit_model(const Dataset& scaled, Eigen::Index p) {
  const Eigen::Index m = scaled.cols();
  if (p < 1) throw ValidationError("P must be >= 1");
  if (p >= m) {
    throw ValidationError("P must be < M (P=" + std::to_string(p) + ", M=" + std::to_string(m) + ")");
  }
  return FittedModel::from_decomposition(eig_covariance(scaled), p);
}

ProjectionOperators projection_operators(const FittedModel& model, double delta) {
  const double lambda_p = model.lambda_p();
  if (!(delta >= 0.0) || !(delta < lambda_p)) {
    throw ValidationError("delta outside " + range_text(lambda_p) + ": got " +
                          std::to_string(delta));
  }
  const Eigen::VectorXd l = model.leading();
  const Eigen::VectorXd shrunk = (l.array() - delta).sqrt().matrix();

  ProjectionOperators ops;
  ops.delta = delta;
  ops.W = model.U() * shrunk.asDiagonal();
  ops.gram = l.asDiagonal();
  ops.z_map = (shrunk.array() / l.array()).matrix().asDiagonal() * model.U().transpose();
  return ops;
}

Eigen::VectorXd latent_mode(const ProjectionOperators& ops, const Eigen::VectorXd& x) {
  if (x.size() != ops.z_map.cols()) {
    throw ValidationError("sample has " + std::to_string(x.size()) + " features, model expects " +
                          std::to_string(ops.z_map.cols()));
  }
  return ops.z_map * x;
}

}  // namespace msnm
