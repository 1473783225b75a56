#include <Eigen/Dense>

#include "homog/elliptic.hpp"

namespace homog {

std::vector<double> dense_solve(const EllipticOperator& op,
                                const std::vector<double>& rhs) {
  const std::size_t n = op.grid().cells();
  if (rhs.size() != n) throw Error("dense_solve: rhs size mismatch");
  if (n > 4096) throw Error("dense_solve is limited to 4096 unknowns");

  std::vector<double> b = rhs;
  if (op.bc().data != nullptr) {
    std::vector<double> zero(n, 0.0), lift;
    op.apply(zero, lift, true);
    for (std::size_t i = 0; i < n; ++i) b[i] -= lift[i];
  }

  const bool sing = op.singular();
  const std::size_t m = n + (sing ? 1 : 0);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(Eigen::Index(m), Eigen::Index(m));
  std::vector<double> e(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    op.apply(e, col, false);
    e[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) A(Eigen::Index(i), Eigen::Index(j)) = col[i];
  }
  Eigen::VectorXd bv = Eigen::VectorXd::Zero(Eigen::Index(m));
  for (std::size_t i = 0; i < n; ++i) bv(Eigen::Index(i)) = b[i];
  if (sing) {
    for (std::size_t i = 0; i < n; ++i) {
      A(Eigen::Index(n), Eigen::Index(i)) = 1.0;
      A(Eigen::Index(i), Eigen::Index(n)) = 1.0;
    }
    bv(Eigen::Index(n)) = 0.0;
  }

  Eigen::VectorXd x = A.partialPivLu().solve(bv);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x(Eigen::Index(i));
  return out;
}

}  // namespace homog
