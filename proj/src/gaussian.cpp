#include "causalkit/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "causalkit/error.hpp"

namespace causalkit::gaussian {

namespace {

std::string fmt(double v) {
  if (std::abs(v) < 1e-13) v = 0.0;
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::vector<std::size_t> positions_of(CoordSet s) { return s.positions(); }

Matrix select_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

Matrix select_cols(const Matrix& m, const std::vector<std::size_t>& cols) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(static_cast<Eigen::Index>(cols[j]));
  return out;
}

Matrix select_block(const Matrix& m, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  return select_cols(select_rows(m, rows), cols);
}

Vector select(const Vector& v, const std::vector<std::size_t>& idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(idx[i]));
  return out;
}

// Names space used only for canonical subset ordering.
CoordinateSpace name_space(const std::vector<std::string>& names) {
  std::vector<Coordinate> coords;
  for (const auto& n : names) coords.push_back({n, 1});
  return CoordinateSpace(std::move(coords));
}

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::string braces(const std::vector<std::string>& names) {
  std::string out = "{";
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
  return out + "}";
}

// First entry where two parameter blocks disagree, as (label, lhs, rhs).
struct Mismatch {
  std::string label;
  double lhs;
  double rhs;
};

std::optional<Mismatch> first_mismatch(const std::string& what, const Matrix& a, const Matrix& b,
                                       const std::vector<std::string>& row_names,
                                       const std::vector<std::string>& col_names, const Tolerance& tol) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double x = a(i, j);
      const double y = b(i, j);
      if (std::abs(x - y) > tol.absolute + tol.relative * std::max(std::abs(x), std::abs(y))) {
        std::string label = what + "[" + row_names[static_cast<std::size_t>(i)];
        if (!col_names.empty()) label += "," + col_names[static_cast<std::size_t>(j)];
        return Mismatch{label + "]", x, y};
      }
    }
  }
  return std::nullopt;
}

// Kernel parameters as functions of a full outcome, restricted to `rows`.
struct KernelParams {
  Matrix map;  // rows x source dimension
  Vector offset;
  Matrix cov;
};

std::optional<Mismatch> compare(const KernelParams& a, const KernelParams& b,
                                const std::vector<std::string>& row_names,
                                const std::vector<std::string>& col_names, const Tolerance& tol) {
  if (auto m = first_mismatch("mean map", a.map, b.map, row_names, col_names, tol)) return m;
  if (auto m = first_mismatch("mean offset", a.offset, b.offset, row_names, {}, tol)) return m;
  return first_mismatch("cov", a.cov, b.cov, row_names, row_names, tol);
}

KernelParams restrict_rows(const AffineGaussianKernel& k, std::size_t source_dim,
                           const std::vector<std::size_t>& rows) {
  return {select_rows(k.full_map(source_dim), rows), select(k.offset, rows), select_block(k.cov, rows, rows)};
}

std::vector<std::string> pick(const std::vector<std::string>& names, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (std::size_t i : idx) out.push_back(names[i]);
  return out;
}

// Rows of (I - B)^-1 with the equations of `pinned` replaced by identity,
// computed by forward substitution so pinned rows are exact unit vectors.
Matrix solve_structure(const LinearGaussianSCM& scm, CoordSet pinned) {
  const auto n = static_cast<Eigen::Index>(scm.dimension());
  Matrix a = Matrix::Zero(n, n);
  for (std::size_t i : scm.order()) {
    const auto ii = static_cast<Eigen::Index>(i);
    a(ii, ii) = 1.0;
    if (pinned.contains(i)) continue;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double c = scm.coefficients()(ii, j);
      if (c != 0.0) a.row(ii) += c * a.row(j);
    }
  }
  return a;
}

}  // namespace

bool approx_equal(const Matrix& a, const Matrix& b, const Tolerance& tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double x = a(i, j);
      const double y = b(i, j);
      if (std::abs(x - y) > tol.absolute + tol.relative * std::max(std::abs(x), std::abs(y))) return false;
    }
  }
  return true;
}

void GaussianLaw::validate() const {
  if (cov.rows() != cov.cols() || cov.rows() != mean.size()) {
    throw InvalidArgument("Gaussian law: covariance must be square and match the mean");
  }
  if (!approx_equal(cov, cov.transpose(), {1e-12, 0.0})) {
    throw InvalidArgument("Gaussian law: covariance is not symmetric");
  }
  if (cov.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10) {
      throw InvalidArgument("Gaussian law: covariance is not positive semidefinite");
    }
  }
}

GaussianLaw AffineGaussianKernel::at(const Vector& input_values) const {
  if (input_values.size() != static_cast<Eigen::Index>(inputs.size())) {
    throw InvalidArgument("kernel input has the wrong dimension");
  }
  return {map * input_values + offset, cov};
}

Matrix AffineGaussianKernel::full_map(std::size_t source_dimension) const {
  Matrix out = Matrix::Zero(map.rows(), static_cast<Eigen::Index>(source_dimension));
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    out.col(static_cast<Eigen::Index>(inputs[j])) = map.col(static_cast<Eigen::Index>(j));
  }
  return out;
}

GaussianLaw linear_pushforward(const GaussianLaw& law, const Matrix& f) {
  if (f.cols() != law.mean.size()) {
    throw InvalidArgument("linear_pushforward: matrix has " + std::to_string(f.cols()) +
                          " columns, law has dimension " + std::to_string(law.mean.size()));
  }
  return {f * law.mean, f * law.cov * f.transpose()};
}

AffineGaussianKernel linear_pushforward(const AffineGaussianKernel& kernel, const Matrix& f) {
  if (f.cols() != kernel.offset.size()) {
    throw InvalidArgument("linear_pushforward: matrix does not match the kernel output dimension");
  }
  return {kernel.inputs, f * kernel.map, f * kernel.offset, f * kernel.cov * f.transpose()};
}

AffineGaussianKernel compose(const AffineGaussianKernel& k1, const AffineGaussianKernel& k2) {
  const auto out1 = static_cast<std::size_t>(k1.offset.size());
  const Matrix m2 = k2.full_map(out1);
  return {k1.inputs, m2 * k1.map, m2 * k1.offset + k2.offset, m2 * k1.cov * m2.transpose() + k2.cov};
}

AffineGaussianKernel conditional_kernel(const GaussianLaw& law, CoordSet given) {
  law.validate();
  const auto n = static_cast<std::size_t>(law.mean.size());
  if (!given.is_subset_of(CoordSet::first_n(n))) {
    throw InvalidArgument("conditioning coordinates outside the law");
  }
  const auto g = positions_of(given);
  const auto r = positions_of(CoordSet::first_n(n) - given);
  AffineGaussianKernel k;
  k.inputs = g;
  k.map = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(g.size()));
  k.offset = Vector::Zero(static_cast<Eigen::Index>(n));
  k.cov = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < g.size(); ++j) k.map(static_cast<Eigen::Index>(g[j]), static_cast<Eigen::Index>(j)) = 1.0;
  if (g.empty()) {
    k.offset = law.mean;
    k.cov = law.cov;
    return k;
  }
  const Matrix sgg = select_block(law.cov, g, g);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sgg, Eigen::EigenvaluesOnly);
  const double largest = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() <= 1e-12 * largest) {
    throw SingularConditioning("conditioning block of the covariance is not positive definite");
  }
  if (r.empty()) return k;
  const Matrix srg = select_block(law.cov, r, g);
  const Matrix gain = sgg.llt().solve(srg.transpose()).transpose();
  const Vector rest_offset = select(law.mean, r) - gain * select(law.mean, g);
  Matrix rest_cov = select_block(law.cov, r, r) - gain * srg.transpose();
  rest_cov = (0.5 * (rest_cov + rest_cov.transpose())).eval();
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto ri = static_cast<Eigen::Index>(r[i]);
    k.map.row(ri) = gain.row(static_cast<Eigen::Index>(i));
    k.offset(ri) = rest_offset(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < r.size(); ++j) {
      k.cov(ri, static_cast<Eigen::Index>(r[j])) = rest_cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return k;
}

// ---------------------------------------------------------------------------

LinearGaussianSCM::LinearGaussianSCM(std::vector<std::string> names, Matrix coefficients, Vector noise_variances,
                                     Vector noise_means, std::vector<std::size_t> order)
    : names_(std::move(names)), b_(std::move(coefficients)), d_(std::move(noise_variances)),
      mu_(std::move(noise_means)), order_(std::move(order)) {
  const auto n = static_cast<Eigen::Index>(names_.size());
  (void)name_space(names_);  // rejects duplicate or empty names
  if (b_.rows() != n || b_.cols() != n) {
    throw InvalidArgument("coefficient matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (d_.size() != n) throw InvalidArgument("one noise variance per variable is required");
  if (mu_.size() == 0) mu_ = Vector::Zero(n);
  if (mu_.size() != n) throw InvalidArgument("one noise mean per variable is required");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(d_(i) >= 0.0) || !std::isfinite(d_(i))) {
      throw InvalidArgument("noise variance of " + names_[static_cast<std::size_t>(i)] + " must be finite and >= 0");
    }
  }
  if (order_.empty()) {
    for (std::size_t i = 0; i < names_.size(); ++i) order_.push_back(i);
  }
  std::vector<std::size_t> rank(names_.size(), names_.size());
  if (order_.size() != names_.size()) throw InvalidArgument("topological order must list every variable once");
  for (std::size_t k = 0; k < order_.size(); ++k) {
    if (order_[k] >= names_.size() || rank[order_[k]] != names_.size()) {
      throw InvalidArgument("topological order must list every variable once");
    }
    rank[order_[k]] = k;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (b_(i, j) != 0.0 && rank[static_cast<std::size_t>(j)] >= rank[static_cast<std::size_t>(i)]) {
        throw CyclicGraph("coefficient of " + names_[static_cast<std::size_t>(j)] + " in the equation of " +
                          names_[static_cast<std::size_t>(i)] + " violates the declared topological order");
      }
    }
  }
}

CoordSet LinearGaussianSCM::subset(const std::vector<std::string>& names) const {
  return name_space(names_).subset(names);
}

GaussianLaw observational_law(const LinearGaussianSCM& scm) {
  const Matrix a = solve_structure(scm, CoordSet{});
  return {a * scm.noise_means(), a * scm.noise_variances().asDiagonal() * a.transpose()};
}

AffineGaussianKernel interventional_kernel(const LinearGaussianSCM& scm, CoordSet pinned) {
  const auto n = scm.dimension();
  if (!pinned.is_subset_of(CoordSet::first_n(n))) throw InvalidArgument("pinned coordinates outside the SCM");
  const Matrix a = solve_structure(scm, pinned);
  Vector mu = scm.noise_means();
  Vector d = scm.noise_variances();
  for (std::size_t i : pinned.positions()) {
    mu(static_cast<Eigen::Index>(i)) = 0.0;
    d(static_cast<Eigen::Index>(i)) = 0.0;
  }
  const auto s = pinned.positions();
  return {s, select_cols(a, s), a * mu, a * d.asDiagonal() * a.transpose()};
}

// ---------------------------------------------------------------------------

GaussianCausalSpace::GaussianCausalSpace(std::vector<std::string> names, GaussianLaw law, Generator kernels)
    : names_(std::move(names)), law_(std::move(law)), kernels_(std::move(kernels)) {
  (void)name_space(names_);
  if (names_.size() > kMaxCausalCoordinates) throw CapExceeded("too many Gaussian coordinates");
  if (law_.mean.size() != static_cast<Eigen::Index>(names_.size())) {
    throw InvalidArgument("law dimension does not match the coordinate names");
  }
  law_.validate();
}

GaussianCausalSpace GaussianCausalSpace::from_scm(const LinearGaussianSCM& scm) {
  return GaussianCausalSpace(scm.names(), observational_law(scm),
                             [scm](CoordSet s) { return interventional_kernel(scm, s); });
}

GaussianCausalSpace GaussianCausalSpace::independent(std::vector<std::string> names, GaussianLaw law) {
  const GaussianLaw copy = law;
  return GaussianCausalSpace(std::move(names), std::move(law), [copy](CoordSet s) {
    const auto n = copy.mean.size();
    AffineGaussianKernel k{s.positions(), Matrix::Zero(n, static_cast<Eigen::Index>(s.size())), copy.mean, copy.cov};
    for (std::size_t j = 0; j < k.inputs.size(); ++j) {
      const auto p = static_cast<Eigen::Index>(k.inputs[j]);
      k.map(p, static_cast<Eigen::Index>(j)) = 1.0;
      k.offset(p) = 0.0;
      k.cov.row(p).setZero();
      k.cov.col(p).setZero();
    }
    return k;
  });
}

AffineGaussianKernel GaussianCausalSpace::kernel(CoordSet subset) const {
  if (!subset.is_subset_of(all())) throw InvalidArgument("subset outside the Gaussian space");
  return kernels_(subset);
}

CoordSet GaussianCausalSpace::subset(const std::vector<std::string>& names) const {
  return name_space(names_).subset(names);
}

std::vector<std::string> GaussianCausalSpace::names_of(CoordSet subset) const {
  return pick(names_, subset.positions());
}

GaussianCausalSpace marginalize(const GaussianCausalSpace& space, const std::vector<std::string>& visible) {
  const CoordSet frame = space.subset(visible);
  const auto keep = frame.positions();
  GaussianLaw law{select(space.law().mean, keep), select_block(space.law().cov, keep, keep)};
  return GaussianCausalSpace(space.names_of(frame), std::move(law), [space, frame, keep](CoordSet local) {
    const auto k = space.kernel(expand(local, frame));
    return AffineGaussianKernel{local.positions(), select_rows(k.map, keep), select(k.offset, keep),
                                select_block(k.cov, keep, keep)};
  });
}

CheckReport validate(const GaussianCausalSpace& space, const Tolerance& tol) {
  const auto n = space.dimension();
  const auto names = space.names();
  std::vector<CheckReport> parts;
  {
    const auto k0 = space.kernel(CoordSet{});
    const KernelParams lhs{k0.full_map(n), k0.offset, k0.cov};
    const KernelParams rhs{Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)), space.law().mean,
                           space.law().cov};
    if (auto m = compare(lhs, rhs, names, names, tol)) {
      parts.push_back(CheckReport::fail("axiom (i): K_empty = P", "K_empty differs from P in " + m->label,
                                        Witness{{}, {}, {}, m->label, fmt(m->lhs), fmt(m->rhs)}));
    } else {
      parts.push_back(CheckReport::pass("axiom (i): K_empty = P"));
    }
  }
  std::optional<CheckReport> failure;
  for (CoordSet s : canonical_subsets(name_space(names))) {
    const auto k = space.kernel(s);
    const auto rows = s.positions();
    Matrix ident = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < rows.size(); ++i) ident(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(rows[i])) = 1.0;
    const Matrix cov_rows = select_rows(k.cov, rows);
    const KernelParams lhs{select_rows(k.full_map(n), rows), select(k.offset, rows), cov_rows};
    const KernelParams rhs{ident, Vector::Zero(static_cast<Eigen::Index>(rows.size())),
                           Matrix::Zero(cov_rows.rows(), cov_rows.cols())};
    auto m = first_mismatch("mean map", lhs.map, rhs.map, pick(names, rows), names, tol);
    if (!m) m = first_mismatch("mean offset", lhs.offset, rhs.offset, pick(names, rows), {}, tol);
    if (!m) m = first_mismatch("cov", lhs.cov, rhs.cov, pick(names, rows), names, tol);
    if (m) {
      failure = CheckReport::fail("axiom (ii): interventional determinism",
                                  "K_S is not the identity with zero variance on S",
                                  Witness{sorted(pick(names, rows)), {}, {}, m->label, fmt(m->lhs), fmt(m->rhs)});
      break;
    }
  }
  parts.push_back(failure ? *failure : CheckReport::pass("axiom (ii): interventional determinism"));
  return CheckReport::all_of("validate_causal_space", std::move(parts));
}

// ---------------------------------------------------------------------------

GaussianTransformation GaussianTransformation::linear(GaussianCausalSpace source, GaussianCausalSpace target,
                                                      Matrix f, std::vector<std::size_t> rho) {
  const auto n2 = static_cast<Eigen::Index>(target.dimension());
  GaussianTransformation t{std::move(source), std::move(target), std::move(f), Vector::Zero(n2), Matrix::Zero(n2, n2),
                           std::move(rho)};
  if (t.map.rows() != n2 || t.map.cols() != static_cast<Eigen::Index>(t.source.dimension())) {
    throw InvalidArgument("linear map must be " + std::to_string(n2) + "x" + std::to_string(t.source.dimension()));
  }
  if (t.rho.size() != t.source.dimension()) throw InvalidArgument("rho must be defined on every source coordinate");
  for (std::size_t p : t.rho) {
    if (p >= t.target.dimension()) throw InvalidArgument("rho maps outside the target coordinates");
  }
  return t;
}

std::vector<std::size_t> index_map(const std::vector<std::string>& source, const std::vector<std::string>& target,
                                   const std::map<std::string, std::string>& rho) {
  const auto s1 = name_space(source);
  const auto s2 = name_space(target);
  for (const auto& [from, to] : rho) {
    if (!s1.has_coordinate(from)) throw InvalidArgument("rho maps unknown source coordinate '" + from + "'");
    if (!s2.has_coordinate(to)) throw InvalidArgument("rho maps to unknown target coordinate '" + to + "'");
  }
  std::vector<std::size_t> out;
  for (const auto& n : source) {
    auto it = rho.find(n);
    if (it == rho.end()) throw InvalidArgument("rho is not defined on source coordinate '" + n + "'");
    out.push_back(s2.position_of(it->second));
  }
  return out;
}

namespace {

CoordSet rho_image(const GaussianTransformation& t) {
  std::uint64_t bits = 0;
  for (std::size_t p : t.rho) bits |= std::uint64_t{1} << p;
  return CoordSet(bits);
}

CoordSet rho_preimage(const GaussianTransformation& t, CoordSet s) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < t.rho.size(); ++i) {
    if (s.contains(t.rho[i])) bits |= std::uint64_t{1} << i;
  }
  return CoordSet(bits);
}

void require_shapes(const GaussianTransformation& t) {
  const auto n1 = static_cast<Eigen::Index>(t.source.dimension());
  const auto n2 = static_cast<Eigen::Index>(t.target.dimension());
  if (t.map.rows() != n2 || t.map.cols() != n1 || t.offset.size() != n2 || t.cov.rows() != n2 || t.cov.cols() != n2 ||
      t.rho.size() != t.source.dimension()) {
    throw InvalidArgument("Gaussian transformation parameters do not match the spaces");
  }
}

}  // namespace

CheckReport check_admissible(const GaussianTransformation& t, const Tolerance& tol) {
  require_shapes(t);
  const auto& n1 = t.source.names();
  const auto& n2 = t.target.names();
  // The S-marginal of kappa(omega, .) has a constant covariance, so it is
  // H1_{rho^-1(S)}-measurable iff the mean-map rows of S vanish off
  // rho^-1(S); checking single target coordinates is enough.
  for (CoordSet s : canonical_subsets(name_space(n2), rho_image(t))) {
    if (s.size() != 1) continue;
    const std::size_t row = s.positions()[0];
    const CoordSet pre = rho_preimage(t, s);
    for (std::size_t j = 0; j < n1.size(); ++j) {
      if (pre.contains(j)) continue;
      const double c = t.map(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j));
      if (std::abs(c) > tol.absolute) {
        return CheckReport::fail(
            "admissible",
            "output coordinates {" + n2[row] + "} depend on source coordinate " + n1[j] + ", outside rho^-1(S) = " +
                braces(sorted(pick(n1, pre.positions()))),
            Witness{{n2[row]}, {}, {}, "mean map[" + n2[row] + "," + n1[j] + "]", fmt(c), "0"});
      }
    }
  }
  return CheckReport::pass("admissible");
}

CheckReport check_distributional(const GaussianTransformation& t, const Tolerance& tol) {
  require_shapes(t);
  const Vector mean = t.map * t.source.law().mean + t.offset;
  const Matrix cov = t.map * t.source.law().cov * t.map.transpose() + t.cov;
  const auto& names = t.target.names();
  auto m = first_mismatch("mean", mean, t.target.law().mean, names, {}, tol);
  if (!m) m = first_mismatch("cov", cov, t.target.law().cov, names, names, tol);
  if (m) {
    return CheckReport::fail("distributional", "the image of P1 under kappa differs from P2 in " + m->label,
                             Witness{{}, {}, {}, m->label, fmt(m->lhs), fmt(m->rhs)});
  }
  return CheckReport::pass("distributional");
}

CheckReport check_interventional(const GaussianTransformation& t, const Tolerance& tol) {
  require_shapes(t);
  const auto n1 = t.source.dimension();
  const auto& names1 = t.source.names();
  const auto& names2 = t.target.names();
  const auto frame = rho_image(t).positions();
  for (CoordSet s : canonical_subsets(name_space(names2), rho_image(t))) {
    const CoordSet pre = rho_preimage(t, s);
    const auto k1 = t.source.kernel(pre);
    const Matrix k1_full = k1.full_map(n1);
    const KernelParams lhs{t.map * k1_full, t.map * k1.offset + t.offset,
                           t.map * k1.cov * t.map.transpose() + t.cov};

    const auto k2 = t.target.kernel(s);
    const auto sp = s.positions();
    const Matrix rows_s = select_rows(t.map, sp);
    const KernelParams rhs{k2.map * rows_s, k2.map * select(t.offset, sp) + k2.offset,
                           k2.map * select_block(t.cov, sp, sp) * k2.map.transpose() + k2.cov};

    const KernelParams a{select_rows(lhs.map, frame), select(lhs.offset, frame), select_block(lhs.cov, frame, frame)};
    const KernelParams b{select_rows(rhs.map, frame), select(rhs.offset, frame), select_block(rhs.cov, frame, frame)};
    if (auto m = compare(a, b, pick(names2, frame), names1, tol)) {
      auto report = CheckReport::fail(
          "interventional",
          "intervening on " + braces(sorted(pick(names1, pre.positions()))) +
              " then transforming differs from transforming then intervening on " +
              braces(sorted(pick(names2, sp))) + " in " + m->label,
          Witness{sorted(pick(names2, sp)), {}, {}, m->label, fmt(m->lhs), fmt(m->rhs)});
      report.notes.push_back("lhs = K1_{rho^-1(S)} then kappa, rhs = kappa then K2_S, as affine-Gaussian kernels");
      return report;
    }
  }
  return CheckReport::pass("interventional");
}

CheckReport check_transformation(const GaussianTransformation& t, const Tolerance& tol) {
  return CheckReport::all_of("causal_transformation",
                             {check_admissible(t, tol), check_distributional(t, tol), check_interventional(t, tol)});
}

CheckReport check_linear_transform(const LinearGaussianSCM& scm1, const LinearGaussianSCM& scm2, const Matrix& f,
                                   const std::vector<std::size_t>& rho, const Tolerance& tol) {
  const auto t = GaussianTransformation::linear(GaussianCausalSpace::from_scm(scm1),
                                                GaussianCausalSpace::from_scm(scm2), f, rho);
  return check_transformation(t, tol);
}

GaussianTransformation compose(const GaussianTransformation& first, const GaussianTransformation& second) {
  require_shapes(first);
  require_shapes(second);
  if (first.target.names() != second.source.names()) {
    throw SpaceMismatch("compose: target of the first transformation is not the source of the second");
  }
  std::vector<std::size_t> rho(first.rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = second.rho[first.rho[i]];
  return {first.source,
          second.target,
          second.map * first.map,
          second.map * first.offset + second.offset,
          second.map * first.cov * second.map.transpose() + second.cov,
          std::move(rho)};
}

EffectClass classify_effect(const GaussianCausalSpace& space, CoordSet intervened, CoordSet target,
                            const Tolerance& tol) {
  const auto n = space.dimension();
  const auto& names = space.names();
  if (!intervened.is_subset_of(space.all()) || !target.is_subset_of(space.all())) {
    throw InvalidArgument("subset outside the Gaussian space");
  }
  const auto v = target.positions();
  const auto u = intervened.positions();
  const auto vnames = pick(names, v);

  const auto ku = space.kernel(intervened);
  const Matrix map_v = select_rows(ku.map, v);
  const Vector offset_v = select(ku.offset, v);
  const Matrix cov_v = select_block(ku.cov, v, v);
  // Evaluate at omega_U = (1, ..., 1) so a non-zero mean map shows up.
  const Vector probe = Vector::Ones(static_cast<Eigen::Index>(u.size()));
  const Vector mean_at = map_v * probe + offset_v;
  const Vector p_mean = select(space.law().mean, v);
  const Matrix p_cov = select_block(space.law().cov, v, v);
  auto describe = [&](const Vector& mean, const Matrix& cov) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      out += (i ? "; " : "") + vnames[i] + " ~ N(" + fmt(mean(ii)) + ", " + fmt(cov(ii, ii)) + ")";
    }
    return out;
  };
  if (!approx_equal(mean_at, p_mean, tol) || !approx_equal(cov_v, p_cov, tol)) {
    std::string omega = "(";
    for (std::size_t i = 0; i < u.size(); ++i) omega += (i ? ", " : "") + names[u[i]] + "=1";
    omega += ")";
    return {Effect::kActive, Witness{sorted(pick(names, u)), omega, {}, "law of " + braces(vnames),
                                     describe(mean_at, cov_v), describe(p_mean, p_cov)}};
  }
  for (CoordSet s : canonical_subsets(name_space(names))) {
    const CoordSet reduced = s - intervened;
    if (reduced == s) continue;
    const auto a = restrict_rows(space.kernel(s), n, v);
    const auto b = restrict_rows(space.kernel(reduced), n, v);
    if (auto m = compare(a, b, vnames, names, tol)) {
      return {Effect::kDormant, Witness{sorted(pick(names, s.positions())), {}, {}, m->label, fmt(m->lhs), fmt(m->rhs)}};
    }
  }
  return {Effect::kNone, std::nullopt};
}

// ---------------------------------------------------------------------------

LinearGaussianSCM faithfulness_scm() {
  Matrix b = Matrix::Zero(4, 4);  // order L, X, M, Y
  b(1, 0) = 1.0;                  // X = L
  b(2, 0) = 1.0;                  // M = L + N_M
  b(3, 2) = 1.0;                  // Y = M - X + N_Y
  b(3, 1) = -1.0;
  Vector d(4);
  d << 1.0, 0.0, 1.0, 1.0;
  return LinearGaussianSCM({"L", "X", "M", "Y"}, b, d);
}

FaithfulnessReports faithfulness_demo(const Tolerance& tol) {
  const auto scm = faithfulness_scm();
  const auto full = GaussianCausalSpace::from_scm(scm);
  const CoordSet x = full.subset({"X"});
  const CoordSet y = full.subset({"Y"});
  const auto ix = static_cast<Eigen::Index>(x.positions()[0]);
  const auto iy = static_cast<Eigen::Index>(y.positions()[0]);

  std::vector<CheckReport> a;
  {
    Vector one(1);
    one << 1.0;
    const auto law = full.kernel(x).at(one);
    const double mean = law.mean(iy);
    const double var = law.cov(iy, iy);
    const bool ok = approx_equal(Vector::Constant(1, mean), Vector::Constant(1, -1.0), tol) &&
                    approx_equal(Vector::Constant(1, var), Vector::Constant(1, 3.0), tol);
    auto r = ok ? CheckReport::pass("do(X=1) law of Y", "Y ~ N(" + fmt(mean) + ", " + fmt(var) + ")")
                : CheckReport::fail("do(X=1) law of Y", "expected Y ~ N(-1, 3)",
                                    Witness{{"X"}, "(X=1)", {}, "law of {Y}", "N(" + fmt(mean) + ", " + fmt(var) + ")",
                                            "N(-1, 3)"});
    a.push_back(std::move(r));
  }
  const double cov_xy = full.law().cov(ix, iy);
  {
    const bool ok = std::abs(cov_xy) <= tol.absolute;
    a.push_back(ok ? CheckReport::pass("observational Cov(X,Y)", "Cov(X,Y) = " + fmt(cov_xy))
                   : CheckReport::fail("observational Cov(X,Y)", "expected 0",
                                       Witness{{}, {}, {}, "Cov(X,Y)", fmt(cov_xy), "0"}));
  }
  {
    const auto e = classify_effect(full, x, y, tol);
    auto r = e.tag == Effect::kActive
                 ? CheckReport::pass("effect of X on Y in the full system", "Active")
                 : CheckReport::fail("effect of X on Y in the full system", "expected Active, got " + to_string(e.tag),
                                     e.witness.value_or(Witness{}));
    if (e.witness) r.notes.push_back("witness: K_X" + e.witness->omega + " gives " + e.witness->lhs + ", P gives " + e.witness->rhs);
    a.push_back(std::move(r));
  }

  const auto visible = marginalize(full, {"X", "Y"});
  const auto sub = GaussianCausalSpace::independent(visible.names(), visible.law());
  std::vector<CheckReport> b;
  {
    const double c = visible.law().cov(0, 1);
    b.push_back(std::abs(c) <= tol.absolute
                    ? CheckReport::pass("uncorrelated", "Cov(X,Y) = " + fmt(c) + ", so X and Y are independent")
                    : CheckReport::fail("uncorrelated", "expected Cov(X,Y) = 0",
                                        Witness{{}, {}, {}, "Cov(X,Y)", fmt(c), "0"}));
  }
  {
    const auto e = classify_effect(sub, sub.subset({"X"}), sub.subset({"Y"}), tol);
    b.push_back(e.tag == Effect::kNone
                    ? CheckReport::pass("effect of X on Y with the independence kernel", "NoEffect")
                    : CheckReport::fail("effect of X on Y with the independence kernel",
                                        "expected NoEffect, got " + to_string(e.tag), e.witness.value_or(Witness{})));
  }
  auto sub_report = CheckReport::all_of("faithfulness: (X,Y) subsystem", std::move(b));
  const auto marginal_effect = classify_effect(visible, visible.subset({"X"}), visible.subset({"Y"}), tol);
  sub_report.notes.push_back("with the kernels marginalized from the full system the effect is " +
                             to_string(marginal_effect.tag));
  return {CheckReport::all_of("faithfulness: full system", std::move(a)), std::move(sub_report)};
}

}  // namespace causalkit::gaussian
