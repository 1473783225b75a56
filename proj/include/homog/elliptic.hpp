#pragma once

#include <functional>
#include <vector>

#include "homog/ensemble.hpp"
#include "homog/grid.hpp"

namespace homog {

struct SolveOptions {
  double tol = 1e-10;  // relative residual target, must lie in (0, 1e-2]
  int max_iter = 0;    // 0 = derive from problem size
  void validate() const;
};

struct SolveStats {
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

// Cell-centered finite-difference form of  -div(a grad u) + massive * u.
// Diagonal entries a_kk enter through harmonic face means, off-diagonal
// entries through a symmetric cell-based mixed form built from averaged
// face gradients. Boundary conditions come from the BcTable; Dirichlet
// faces use one-sided differences over h/2.
class EllipticOperator {
 public:
  EllipticOperator(const CoefficientField& a, const BcTable& bc,
                   double massive = 0.0);

  const Grid& grid() const { return a_->grid; }
  const BcTable& bc() const { return bc_; }
  double massive() const { return massive_; }
  const CoefficientField& coefficients() const { return *a_; }
  // harmonic-mean diagonal coefficient attached to each face
  const VecField& face_coefficients() const { return face_coef_; }

  // out = A u. with_bc_data folds the inhomogeneous boundary values in
  // (used to lift them onto the right-hand side); the homogeneous apply is
  // the linear operator handed to the solver.
  void apply(const std::vector<double>& u, std::vector<double>& out,
             bool with_bc_data = false) const;
  std::vector<double> diagonal() const;  // second-order part + massive
  bool singular() const;                 // pure torus with massive == 0
  bool has_offdiagonal() const { return has_offdiag_; }

 private:
  const CoefficientField* a_;
  BcTable bc_;
  double massive_ = 0.0;
  VecField face_coef_;
  bool has_offdiag_ = false;
};

// Jacobi-preconditioned conjugate gradients over a caller-supplied apply.
// Serial and deterministic: identical inputs give identical iterates.
using ApplyFn = std::function<void(const std::vector<double>&, std::vector<double>&)>;
SolveStats cg_solve(const ApplyFn& apply, const std::vector<double>& diag,
                    const std::vector<double>& rhs, std::vector<double>& x,
                    const SolveOptions& opts, bool project_mean_zero = false);

// Solve A u = f. Inhomogeneous Dirichlet data is lifted onto the right-hand
// side. A singular operator requires a mean-zero f (relative tolerance
// 1e-10) and returns the mean-zero solution.
ScalarField solve(const EllipticOperator& op, const std::vector<double>& rhs,
                  const SolveOptions& opts, SolveStats* stats = nullptr);

// Direct dense factorization of the same operator, for cross-checking the
// iterative path on small problems. Singular torus operators are handled
// through a bordered system enforcing the mean-zero gauge.
std::vector<double> dense_solve(const EllipticOperator& op,
                                const std::vector<double>& rhs);

// Face flux q = a (e_dir + grad u); dir = -1 drops the unit field. Diagonal
// coefficients use the harmonic face means, off-diagonal couplings use
// arithmetic means of the adjacent cell gradients.
VecField coefficient_flux(const EllipticOperator& op, const ScalarField& u,
                          int dir);

}  // namespace homog
