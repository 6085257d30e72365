#include "causalkit/gaussian_catalog.hpp"

namespace causalkit::gaussian::catalog {

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace

LinearGaussianSCM abstraction_source() {
  Matrix b = Matrix::Zero(4, 4);
  b(2, 0) = 3.0;
  b(2, 1) = 1.0;
  b(3, 1) = 1.0;
  return LinearGaussianSCM({"X1", "X2", "Y1", "Y2"}, b, vec({1, 1, 1, 1}));
}

LinearGaussianSCM abstraction_target() {
  Matrix b = Matrix::Zero(2, 2);
  b(1, 0) = 3.0;
  return LinearGaussianSCM({"X", "Y"}, b, vec({2, 5}));
}

Matrix abstraction_matrix() {
  Matrix f(2, 4);
  f << 1, 1, 0, 0, 0, 0, 1, 2;
  return f;
}

std::vector<std::size_t> abstraction_rho() { return {0, 0, 1, 1}; }

LinearGaussianSCM chain_scm() {
  Matrix b = Matrix::Zero(3, 3);
  b(1, 0) = 1.0;
  b(2, 1) = 1.0;
  return LinearGaussianSCM({"X", "M", "Y"}, b, vec({1, 1, 1}));
}

LinearGaussianSCM fork_scm() {
  Matrix b = Matrix::Zero(3, 3);
  b(1, 0) = 1.0;
  b(2, 0) = 1.0;
  return LinearGaussianSCM({"X", "Y1", "Y2"}, b, vec({1, 1, 1}));
}

LinearGaussianSCM composition_source() {
  Matrix b = Matrix::Zero(3, 3);
  b(2, 0) = 1.0;
  b(2, 1) = 1.0;
  return LinearGaussianSCM({"X1", "X2", "Y"}, b, vec({1, 1, 1}));
}

LinearGaussianSCM composition_target() {
  Matrix b = Matrix::Zero(2, 2);
  b(1, 0) = 1.0;
  return LinearGaussianSCM({"X", "Y"}, b, vec({2, 1}));
}

LinearGaussianSCM composition_subsystem() {
  Matrix b = Matrix::Zero(2, 2);
  b(1, 0) = 1.0;
  return LinearGaussianSCM({"X1", "Y"}, b, vec({1, 2}));
}

CompositionCase composition_case() {
  const auto full = GaussianCausalSpace::from_scm(composition_source());
  const auto sub = marginalize(full, {"X1", "Y"});
  const auto target = GaussianCausalSpace::from_scm(composition_target());

  // kappa1 takes (x1, y) to the conditional law of (X1, X2, Y) given them.
  const auto cond = conditional_kernel(full.law(), full.subset({"X1", "Y"}));
  GaussianTransformation inclusion{sub, full, cond.map, cond.offset, cond.cov, {0, 2}};

  Matrix f(2, 3);
  f << 1, 1, 0, 0, 0, 1;
  auto sum = GaussianTransformation::linear(full, target, f, {0, 0, 1});
  auto composite = compose(inclusion, sum);
  return {std::move(inclusion), std::move(sum), std::move(composite)};
}

}  // namespace causalkit::gaussian::catalog
