#pragma once

// Linear-Gaussian causal spaces in closed form. Laws and kernels are
// described by their parameters; two Gaussians are equal when their
// parameters agree within a Tolerance. Dirac components are exact zero
// covariance blocks.

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "causalkit/check_report.hpp"
#include "causalkit/causal_space.hpp"

namespace causalkit::gaussian {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Tolerance {
  double absolute = 1e-9;
  double relative = 1e-9;
};

/// |a - b| <= absolute + relative * max(|a|, |b|) for every entry.
bool approx_equal(const Matrix& a, const Matrix& b, const Tolerance& tol = {});

struct GaussianLaw {
  Vector mean;
  Matrix cov;

  /// Throws InvalidArgument unless cov is square, matches mean, is
  /// symmetric within 1e-12 and has no eigenvalue below -1e-10.
  void validate() const;
};

/// omega_S -> N(M omega_S + b, cov), a kernel into the full space. For a
/// causal kernel the rows of the inputs are the identity with zero
/// covariance.
struct AffineGaussianKernel {
  std::vector<std::size_t> inputs;  // positions of S, increasing
  Matrix map;                       // outputs x |inputs|
  Vector offset;
  Matrix cov;

  GaussianLaw at(const Vector& input_values) const;
  /// The mean map as a function of a full source outcome (zero columns off
  /// the inputs).
  Matrix full_map(std::size_t source_dimension) const;
};

/// omega -> N(F omega + b, cov): pushes laws and kernels forward.
GaussianLaw linear_pushforward(const GaussianLaw& law, const Matrix& f);
AffineGaussianKernel linear_pushforward(const AffineGaussianKernel& kernel, const Matrix& f);

/// k2 after k1: x -> N(M2 (M1 x + b1) + b2, M2 C1 M2^T + C2). k2 must take
/// every output of k1 as input.
AffineGaussianKernel compose(const AffineGaussianKernel& k1, const AffineGaussianKernel& k2);

/// Law of the remaining coordinates given `given`, as a kernel from
/// Omega_given into the full space (identity on the given block). Throws
/// SingularConditioning unless the given block is positive definite.
AffineGaussianKernel conditional_kernel(const GaussianLaw& law, CoordSet given);

/// X = B X + N with independent N_i ~ N(noise_mean_i, noise_variance_i).
/// coefficients(i, j) is the coefficient of X_j in the equation of X_i.
class LinearGaussianSCM {
 public:
  /// `order` lists variable positions in a topological order; B must be
  /// strictly lower triangular in it. Empty order = declaration order.
  LinearGaussianSCM(std::vector<std::string> names, Matrix coefficients, Vector noise_variances,
                    Vector noise_means = {}, std::vector<std::size_t> order = {});

  const std::vector<std::string>& names() const { return names_; }
  std::size_t dimension() const { return names_.size(); }
  const Matrix& coefficients() const { return b_; }
  const Vector& noise_variances() const { return d_; }
  const Vector& noise_means() const { return mu_; }
  const std::vector<std::size_t>& order() const { return order_; }
  CoordSet subset(const std::vector<std::string>& names) const;

 private:
  std::vector<std::string> names_;
  Matrix b_;
  Vector d_;
  Vector mu_;
  std::vector<std::size_t> order_;
};

/// mean = (I - B)^-1 mu, cov = (I - B)^-1 D (I - B)^-T.
GaussianLaw observational_law(const LinearGaussianSCM& scm);
/// Law of the SCM with the variables in S pinned to the kernel input.
AffineGaussianKernel interventional_kernel(const LinearGaussianSCM& scm, CoordSet pinned);

class GaussianCausalSpace {
 public:
  using Generator = std::function<AffineGaussianKernel(CoordSet)>;

  GaussianCausalSpace(std::vector<std::string> names, GaussianLaw law, Generator kernels);
  static GaussianCausalSpace from_scm(const LinearGaussianSCM& scm);
  /// K_S(omega, .) = delta_{omega_S} x (marginal of the law off S).
  static GaussianCausalSpace independent(std::vector<std::string> names, GaussianLaw law);

  const std::vector<std::string>& names() const { return names_; }
  std::size_t dimension() const { return names_.size(); }
  const GaussianLaw& law() const { return law_; }
  AffineGaussianKernel kernel(CoordSet subset) const;
  CoordSet all() const { return CoordSet::first_n(names_.size()); }
  CoordSet subset(const std::vector<std::string>& names) const;
  std::vector<std::string> names_of(CoordSet subset) const;

 private:
  std::vector<std::string> names_;
  GaussianLaw law_;
  Generator kernels_;
};

/// Sub-system on `visible` with marginalized kernels.
GaussianCausalSpace marginalize(const GaussianCausalSpace& space, const std::vector<std::string>& visible);

/// Axiom (i) and the Dirac-identity shape of every K_S.
CheckReport validate(const GaussianCausalSpace& space, const Tolerance& tol = {});

/// (kappa, rho) with kappa(omega, .) = N(map omega + offset, cov).
struct GaussianTransformation {
  GaussianCausalSpace source;
  GaussianCausalSpace target;
  Matrix map;
  Vector offset;
  Matrix cov;
  std::vector<std::size_t> rho;  // target position of each source coordinate

  /// Deterministic linear map F.
  static GaussianTransformation linear(GaussianCausalSpace source, GaussianCausalSpace target, Matrix f,
                                       std::vector<std::size_t> rho);
};

/// rho given by coordinate names.
std::vector<std::size_t> index_map(const std::vector<std::string>& source, const std::vector<std::string>& target,
                                   const std::map<std::string, std::string>& rho);

CheckReport check_admissible(const GaussianTransformation& t, const Tolerance& tol = {});
CheckReport check_distributional(const GaussianTransformation& t, const Tolerance& tol = {});
CheckReport check_interventional(const GaussianTransformation& t, const Tolerance& tol = {});
CheckReport check_transformation(const GaussianTransformation& t, const Tolerance& tol = {});

/// All three checks for the deterministic map F between the spaces of two SCMs.
CheckReport check_linear_transform(const LinearGaussianSCM& scm1, const LinearGaussianSCM& scm2, const Matrix& f,
                                   const std::vector<std::size_t>& rho, const Tolerance& tol = {});

/// Composite kernel of two transformations (second after first).
GaussianTransformation compose(const GaussianTransformation& first, const GaussianTransformation& second);

/// Effect of H_U on H_V, judged on parameters.
EffectClass classify_effect(const GaussianCausalSpace& space, CoordSet intervened, CoordSet target,
                            const Tolerance& tol = {});

struct FaithfulnessReports {
  CheckReport full_system;
  CheckReport subsystem;
};

/// X = L, M = L + N_M, Y = M - X + N_Y with L, N_M, N_Y standard normal
/// (L carries the noise shared by X and M). The full system shows an
/// active effect of X on Y; the (X, Y) subsystem with the independence
/// kernel shows none, since X and Y are uncorrelated.
FaithfulnessReports faithfulness_demo(const Tolerance& tol = {});
LinearGaussianSCM faithfulness_scm();

}  // namespace causalkit::gaussian
