#include "invrig/solvers.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <utility>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "invrig/errors.hpp"
#include "invrig/metrics.hpp"

namespace invrig {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 5> kMethodNames{{
    {Method::CdQuartic, "cd-quartic"},
    {Method::CdLinear, "cd-linear"},
    {Method::Seol, "seol"},
    {Method::Joshi, "joshi"},
    {Method::Cetinaslan, "cetinaslan"},
}};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

WeightVector clip_unit(const WeightVector& w) {
  return w.unaryExpr([](double x) { return project_unit_interval(x); });
}

}  // namespace

std::string_view to_string(Method method) {
  for (const auto& [m, name] : kMethodNames) {
    if (m == method) return name;
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (const auto& [m, n] : kMethodNames) {
    if (n == name) return m;
  }
  return std::nullopt;
}

bool uses_alpha(Method method) {
  return method == Method::CdQuartic || method == Method::CdLinear ||
         method == Method::Cetinaslan;
}

RigKind fitting_rig(Method method) {
  return method == Method::CdQuartic ? RigKind::Quartic : RigKind::Linear;
}

void SolverConfig::validate() const {
  if (!std::isfinite(alpha) || alpha < 0.0) {
    throw ContractError(fmt::format("alpha must be finite and >= 0, got {}", alpha));
  }
  if (passes < 1) {
    throw ContractError(fmt::format("passes must be >= 1, got {}", passes));
  }
}

double objective_value(const BlendshapeRig& rig, const WeightVector& w,
                       const Mesh& target, double alpha, RigKind kind) {
  detail::check_target(rig, target);
  const Mesh fitted = evaluate(rig, w, kind);
  return 0.5 * (fitted.coords() - target.coords()).squaredNorm() +
         alpha * w.sum();
}

SolveReport fit_coordinate_descent(const BlendshapeRig& rig, const Mesh& target,
                                   const SolverConfig& config) {
  config.validate();
  if (config.method != Method::CdQuartic && config.method != Method::CdLinear) {
    throw ContractError(fmt::format("fit_coordinate_descent cannot run method '{}'",
                                    to_string(config.method)));
  }
  detail::check_target(rig, target);
  const Stopwatch clock;
  const RigKind kind = fitting_rig(config.method);
  const Index m = rig.blendshape_count();
  const double alpha = config.alpha;

  SolveReport report;
  WeightVector& w = report.weights;
  if (config.init) {
    w = *config.init;
    detail::check_weights(rig, w);
    if ((w.array() < 0.0).any() || (w.array() > 1.0).any()) {
      throw ContractError("initial weights must lie in [0, 1]");
    }
  } else {
    w = WeightVector::Zero(m);
  }

  // residual = f(w) - target, kept current after every update
  Vector residual(rig.dimension());
  detail::accumulate_rig(rig, w, kind, residual);
  residual -= target.coords();
  Vector p(rig.dimension());

  auto visit = [&](Index i, int pass) {
    detail::compute_phi(rig, w, i, kind, p);
    const double norm_sq = p.squaredNorm();
    const double phi_dot_r = p.dot(residual);
    // psi_i = residual - w_i phi_i
    const auto update =
        solve_coordinate(phi_dot_r - w[i] * norm_sq, norm_sq, alpha, w[i]);
    ++report.coordinate_visits;
    if (update.degenerate) ++report.degenerate_visits;
    const double old_value = w[i];
    const double step = update.value - old_value;
    if (step != 0.0) residual.noalias() += step * p;
    w[i] = update.value;
    if (config.observer) {
      config.observer({pass, i, old_value, update.value, &w});
    }
  };

  std::vector<Index> order;
  if (config.ordering.is_static()) {
    order = static_order(rig, config.ordering, &target);
  }
  VisitState visits(m);

  for (int pass = 1; pass <= config.passes; ++pass) {
    if (config.ordering.is_static()) {
      for (Index i : order) visit(i, pass);
    } else {
      visits.reset();
      while (const auto next = next_coordinate_dynamic(
                 rig, w, residual, config.ordering, alpha, kind, visits)) {
        visits.mark(*next);
        visit(*next, pass);
      }
    }
    report.objective_trace.push_back(0.5 * residual.squaredNorm() +
                                     alpha * w.sum());
  }
  report.wall_time_s = clock.seconds();
  return report;
}

SolveReport fit_seol(const BlendshapeRig& rig, const Mesh& target,
                     const OrderingStrategy& ordering, bool clip_in_loop) {
  detail::check_target(rig, target);
  if (!ordering.is_static()) {
    throw ContractError(fmt::format("seol needs a static ordering, got '{}'",
                                    to_string(ordering.kind)));
  }
  const Stopwatch clock;
  const Index m = rig.blendshape_count();
  SolveReport report;
  WeightVector w = WeightVector::Zero(m);

  Vector residual = target.coords() - rig.neutral().coords();
  Vector p(rig.dimension());
  for (Index i : static_order(rig, ordering, &target)) {
    ++report.coordinate_visits;
    p = rig.blendshape(i);
    const double norm_sq = p.squaredNorm();
    if (norm_sq < kDegenerateNormSq) {
      ++report.degenerate_visits;
      continue;
    }
    double wi = std::max(0.0, p.dot(residual) / norm_sq);
    if (clip_in_loop) wi = std::min(wi, 1.0);
    if (wi != 0.0) residual.noalias() -= wi * p;
    w[i] = wi;
  }
  report.weights = clip_unit(w);
  report.objective_trace.push_back(
      objective_value(rig, report.weights, target, 0.0, RigKind::Linear));
  report.wall_time_s = clock.seconds();
  return report;
}

LinearBaseline::LinearBaseline(const BlendshapeRig& rig, Method method, double alpha)
    : rig_(&rig), alpha_(alpha) {
  if (method != Method::Joshi && method != Method::Cetinaslan) {
    throw ContractError(fmt::format("'{}' is not a linear baseline", to_string(method)));
  }
  if (!std::isfinite(alpha) || alpha < 0.0) {
    throw ContractError(fmt::format("alpha must be finite and >= 0, got {}", alpha));
  }
  if (method == Method::Joshi) alpha_ = 0.0;
  const auto& basis = rig.blendshapes();
  if (method == Method::Cetinaslan) {
    Eigen::MatrixXd gram = basis.transpose() * basis;
    gram.diagonal().array() += 2.0 * alpha_;
    ridge_.compute(gram);
    use_ridge_ = ridge_.info() == Eigen::Success && ridge_.rcond() > kRidgeMinRcond;
    // Only reachable at alpha == 0 with a rank-deficient basis.
    if (use_ridge_) return;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(basis, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const double cutoff = sigma.size() > 0 ? kPinvRelativeCutoff * sigma[0] : 0.0;
  Vector inv = Vector::Zero(sigma.size());
  for (Index k = 0; k < sigma.size(); ++k) {
    if (sigma[k] > cutoff) inv[k] = 1.0 / sigma[k];
  }
  pinv_ = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

WeightVector LinearBaseline::solve_raw(const Mesh& target) const {
  detail::check_target(*rig_, target);
  const Vector delta = target.coords() - rig_->neutral().coords();
  if (use_ridge_) return ridge_.solve(rig_->blendshapes().transpose() * delta);
  return pinv_ * delta;
}

SolveReport LinearBaseline::solve(const Mesh& target) const {
  const Stopwatch clock;
  SolveReport report;
  const WeightVector raw = solve_raw(target);
  report.weights = clip_unit(raw);
  report.wall_time_s = clock.seconds();
  report.preclip_cardinality = cardinality(raw);
  report.objective_trace.push_back(objective_value(
      *rig_, report.weights, target, alpha_, RigKind::Linear));
  return report;
}

SolveReport fit_joshi(const BlendshapeRig& rig, const Mesh& target) {
  const Stopwatch clock;
  auto report = LinearBaseline(rig, Method::Joshi).solve(target);
  report.wall_time_s = clock.seconds();
  return report;
}

SolveReport fit_cetinaslan(const BlendshapeRig& rig, const Mesh& target,
                           double alpha) {
  const Stopwatch clock;
  auto report = LinearBaseline(rig, Method::Cetinaslan, alpha).solve(target);
  report.wall_time_s = clock.seconds();
  return report;
}

FrameSolver::FrameSolver(const BlendshapeRig& rig, SolverConfig config)
    : rig_(&rig), config_(std::move(config)) {
  config_.validate();
  switch (config_.method) {
    case Method::Joshi:
      baseline_.emplace(rig, Method::Joshi);
      break;
    case Method::Cetinaslan:
      baseline_.emplace(rig, Method::Cetinaslan, config_.alpha);
      break;
    case Method::Seol:
      if (!config_.ordering.is_static()) {
        throw ContractError("seol needs a static ordering");
      }
      break;
    default:
      break;
  }
}

SolveReport FrameSolver::solve(const Mesh& target,
                               std::optional<std::uint64_t> ordering_seed) const {
  OrderingStrategy ordering = config_.ordering;
  if (ordering_seed) ordering.seed = *ordering_seed;
  switch (config_.method) {
    case Method::CdQuartic:
    case Method::CdLinear: {
      if (!ordering_seed) return fit_coordinate_descent(*rig_, target, config_);
      SolverConfig cfg = config_;
      cfg.ordering = ordering;
      return fit_coordinate_descent(*rig_, target, cfg);
    }
    case Method::Seol:
      return fit_seol(*rig_, target, ordering, config_.seol_clip_in_loop);
    case Method::Joshi:
    case Method::Cetinaslan:
      return baseline_->solve(target);
  }
  throw ContractError("unknown method");
}

}  // namespace invrig
