#include "cventropic/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cventropic/errors.hpp"
#include "cventropic/fft.hpp"
#include "cventropic/frft.hpp"

namespace cventropic {

namespace {

using std::numbers::pi;

void require_same_modes(const QuadratureOp& a, const QuadratureOp& b) {
  if (a.modes() != b.modes()) throw DomainError("operators act on different mode counts");
}

// Shift every line along `axis` by an amount proportional to the coordinate of
// the other axis: line(y) <- line(y - rate * other).
void shear_lines(std::vector<Complex>& amps, const GridSpec& grid, std::size_t axis, double rate) {
  const std::size_t n = grid.points_per_axis;
  const double dx = grid.spacing();
  std::vector<Complex> line(n);
  for (std::size_t o = 0; o < n; ++o) {
    const double shift = rate * grid.coordinate(o);
    for (std::size_t k = 0; k < n; ++k) line[k] = axis == 1 ? amps[o * n + k] : amps[k * n + o];
    fft::forward(line);
    for (std::size_t m = 0; m < n; ++m) {
      line[m] *= std::polar(1.0 / static_cast<double>(n), -fft::angular_frequency(m, n, dx) * shift);
    }
    fft::backward(line);
    for (std::size_t k = 0; k < n; ++k) (axis == 1 ? amps[o * n + k] : amps[k * n + o]) = line[k];
  }
}

// result(x1, x2) = in(x2, -x1): active rotation by +pi/2.
std::vector<Complex> quarter_turn(const std::vector<Complex>& in, std::size_t n) {
  std::vector<Complex> out(in.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = in[j * n + (n - 1 - i)];
  return out;
}

}  // namespace

QuadratureOp::QuadratureOp(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty() || coeffs_.size() % 2 != 0) {
    throw DomainError("quadrature coefficient list must have even, nonzero length");
  }
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw DomainError("non-finite quadrature coefficient");
  }
}

QuadratureOp QuadratureOp::position(std::size_t mode, std::size_t n) {
  std::vector<double> c(2 * n, 0.0);
  c.at(2 * mode) = 1.0;
  return QuadratureOp(std::move(c));
}

QuadratureOp QuadratureOp::momentum(std::size_t mode, std::size_t n) {
  std::vector<double> c(2 * n, 0.0);
  c.at(2 * mode + 1) = 1.0;
  return QuadratureOp(std::move(c));
}

bool QuadratureOp::is_zero() const {
  for (double c : coeffs_)
    if (c != 0.0) return false;
  return true;
}

Eigen::VectorXd QuadratureOp::vector() const {
  return Eigen::Map<const Eigen::VectorXd>(coeffs_.data(), static_cast<Eigen::Index>(coeffs_.size()));
}

std::string QuadratureOp::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) os << (i ? " " : "") << coeffs_[i];
  return os.str();
}

QuadratureOp operator*(double c, const QuadratureOp& a) {
  std::vector<double> v(a.coeffs().begin(), a.coeffs().end());
  for (auto& x : v) x *= c;
  return QuadratureOp(std::move(v));
}

QuadratureOp operator+(const QuadratureOp& a, const QuadratureOp& b) {
  require_same_modes(a, b);
  std::vector<double> v(a.coeffs().begin(), a.coeffs().end());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += b.coeffs()[i];
  return QuadratureOp(std::move(v));
}

Eigen::MatrixXd symplectic_form(std::size_t n) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    omega(2 * i, 2 * i + 1) = 1.0;
    omega(2 * i + 1, 2 * i) = -1.0;
  }
  return omega;
}

double commutator_value(const QuadratureOp& a, const QuadratureOp& b) {
  require_same_modes(a, b);
  double c = 0.0;
  for (std::size_t i = 0; i < a.modes(); ++i) c += a.x(i) * b.p(i) - a.p(i) * b.x(i);
  return c;
}

Eigen::Matrix2d rotation_matrix(double theta) {
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

QuadratureOp local_rotate(const QuadratureOp& a, std::span<const double> angles) {
  if (angles.size() != a.modes()) throw DomainError("one local rotation angle per mode required");
  std::vector<double> v(a.coeffs().begin(), a.coeffs().end());
  for (std::size_t i = 0; i < a.modes(); ++i) {
    const double c = std::cos(angles[i]), s = std::sin(angles[i]);
    const double x = v[2 * i], p = v[2 * i + 1];
    v[2 * i] = x * c + p * s;
    v[2 * i + 1] = -x * s + p * c;
  }
  return QuadratureOp(std::move(v));
}

QuadratureOp global_rotate(const QuadratureOp& a, const Eigen::MatrixXd& rotation) {
  const auto n = static_cast<Eigen::Index>(a.modes());
  if (rotation.rows() != n || rotation.cols() != n) throw DomainError("rotation size does not match mode count");
  const Eigen::MatrixXd gram = rotation.transpose() * rotation - Eigen::MatrixXd::Identity(n, n);
  if (gram.cwiseAbs().maxCoeff() > 1e-10) throw DomainError("rotation matrix is not orthogonal");
  Eigen::VectorXd xs(n), ps(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    xs(i) = a.x(static_cast<std::size_t>(i));
    ps(i) = a.p(static_cast<std::size_t>(i));
  }
  const Eigen::VectorXd rx = rotation * xs, rp = rotation * ps;
  std::vector<double> v(a.coeffs().size());
  for (Eigen::Index i = 0; i < n; ++i) {
    v[2 * static_cast<std::size_t>(i)] = rx(i);
    v[2 * static_cast<std::size_t>(i) + 1] = rp(i);
  }
  return QuadratureOp(std::move(v));
}

QuadratureOp PairReduction::canonical_a() const {
  std::vector<double> v(2 * modes, 0.0);
  v[0] = scale_a * std::cos(theta);
  v[1] = scale_a * std::sin(theta);
  if (modes == 2) v[2] = scale_a * mu;
  return QuadratureOp(std::move(v));
}

QuadratureOp PairReduction::canonical_b() const {
  std::vector<double> v(2 * modes, 0.0);
  v[0] = scale_b;
  return QuadratureOp(std::move(v));
}

std::pair<QuadratureOp, QuadratureOp> PairReduction::recover(const QuadratureOp& a,
                                                             const QuadratureOp& b) const {
  std::vector<double> undo_last(last_angles.size()), undo_first(first_angles.size());
  for (std::size_t i = 0; i < modes; ++i) {
    undo_last[i] = -last_angles[i];
    undo_first[i] = -first_angles[i];
  }
  auto back = [&](const QuadratureOp& op) {
    return local_rotate(global_rotate(local_rotate(op, undo_last), rotation.transpose()), undo_first);
  };
  return {back(a), back(b)};
}

WaveFunction PairReduction::recover_state(const WaveFunction& reduced) const {
  if (reduced.axes() != modes) throw DomainError("state mode count does not match reduction");
  WaveFunction s = reduced;
  for (std::size_t i = 0; i < modes; ++i) s = frft_apply(s, i, -last_angles[i]);
  if (modes == 2) s = rotate_state(s, -std::atan2(rotation(1, 0), rotation(0, 0)));
  for (std::size_t i = 0; i < modes; ++i) s = frft_apply(s, i, -first_angles[i]);
  return s;
}

PairReduction reduce_pair(const QuadratureOp& a, const QuadratureOp& b) {
  require_same_modes(a, b);
  const std::size_t n = a.modes();
  if (n > 2) throw DomainError("pair reduction supports at most two modes");
  if (b.is_zero()) throw DomainError("cannot reduce against a zero operator");

  PairReduction r;
  r.modes = n;
  r.first_angles.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.first_angles[i] = std::atan2(b.p(i), b.x(i));
  const auto a1 = local_rotate(a, r.first_angles);
  const auto b1 = local_rotate(b, r.first_angles);

  double align = 0.0;
  if (n == 2) align = -std::atan2(b1.x(1), b1.x(0));
  r.rotation = n == 2 ? Eigen::MatrixXd(rotation_matrix(align)) : Eigen::MatrixXd::Identity(1, 1);
  const auto a2 = global_rotate(a1, r.rotation);
  const auto b2 = global_rotate(b1, r.rotation);

  r.last_angles.assign(n, 0.0);
  if (n == 2) r.last_angles[1] = std::atan2(a2.p(1), a2.x(1));
  r.reduced_a = local_rotate(a2, r.last_angles);
  r.reduced_b = local_rotate(b2, r.last_angles);

  r.scale_b = r.reduced_b.x(0);
  const double amp = std::hypot(r.reduced_a.x(0), r.reduced_a.p(0));
  const double size = r.reduced_a.vector().norm();
  r.degenerate = !(amp > 1e-14 * std::max(size, 1.0));
  if (!r.degenerate) {
    r.theta = std::atan2(r.reduced_a.p(0), r.reduced_a.x(0));
    r.scale_a = amp;
    r.mu = n == 2 ? r.reduced_a.x(1) / amp : 0.0;
  }
  return r;
}

WaveFunction rotate_state(const WaveFunction& state, double angle) {
  const auto& grid = state.grid();
  if (grid.axes != 2) throw DomainError("global rotation needs a two-mode state");
  const std::size_t n = grid.points_per_axis;
  // For |residual| <= pi/4 every intermediate shear image of a point at radius r
  // has coordinates bounded by r * sqrt(1 + tan^2(pi/8)) < 1.09 r.
  const double safe_radius = grid.half_extent / 1.09;
  const double dv = grid.spacing() * grid.spacing();
  double outside = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (std::hypot(grid.coordinate(i), grid.coordinate(j)) > safe_radius) outside += std::norm(state.at(i, j)) * dv;
  if (outside > 1e-8) {
    std::ostringstream os;
    os << "rotation would push " << outside << " probability past the grid corners";
    throw ResolutionError(os.str());
  }

  const double quarters = std::round(angle / (0.5 * pi));
  const double residual = angle - quarters * 0.5 * pi;
  std::vector<Complex> amps(state.amplitudes().begin(), state.amplitudes().end());
  const int turns = ((static_cast<int>(std::fmod(quarters, 4.0)) % 4) + 4) % 4;
  for (int q = 0; q < turns; ++q) amps = quarter_turn(amps, n);
  if (residual != 0.0) {
    const double t = std::tan(0.5 * residual), s = std::sin(residual);
    shear_lines(amps, grid, 0, -t);
    shear_lines(amps, grid, 1, s);
    shear_lines(amps, grid, 0, -t);
  }
  std::vector<double> rep(state.representation().begin(), state.representation().end());
  return state.with_amplitudes(std::move(amps), std::move(rep), "rotate_state");
}

GriddedDensity distribution_of(const WaveFunction& state, const QuadratureOp& a) {
  if (a.modes() != state.axes()) throw DomainError("operator mode count does not match state");
  if (a.is_zero()) throw DomainError("distribution of the zero operator is undefined");
  const std::size_t n = a.modes();
  std::vector<double> scale(n), angle(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    scale[i] = std::hypot(a.x(i), a.p(i));
    angle[i] = std::atan2(a.p(i), a.x(i));
    total = std::hypot(total, scale[i]);
  }
  WaveFunction s = state;
  std::vector<bool> active(n);
  for (std::size_t i = 0; i < n; ++i) {
    active[i] = scale[i] > 1e-14 * total;
    if (active[i]) s = frft_apply(s, i, angle[i]);
  }
  if (n == 1) return position_density(s, 0).scaled(scale[0]);
  if (!active[1]) return position_density(s, 0).scaled(scale[0]);
  if (!active[0]) return position_density(s, 1).scaled(scale[1]);
  s = rotate_state(s, -std::atan2(scale[1], scale[0]));
  return position_density(s, 0).scaled(total);
}

GriddedDensity distribution_of(const PureEnsemble& ensemble, const QuadratureOp& a) {
  GriddedDensity out;
  bool first = true;
  for (const auto& m : ensemble.members()) {
    auto d = distribution_of(m.state, a);
    if (first) {
      out = std::move(d);
      for (auto& v : out.mass) v *= m.weight;
      first = false;
    } else {
      for (std::size_t i = 0; i < d.mass.size(); ++i) out.mass[i] += m.weight * d.mass[i];
    }
  }
  return out;
}

}  // namespace cventropic
