#include "csqpt/reconstruct.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace csqpt {

namespace {

constexpr double kArmijoDecrease = 1e-4;
constexpr double kBacktrackFactor = 0.5;
constexpr int kMaxBacktracks = 60;
constexpr double kMinTrialStep = 1e-14;
constexpr double kMaxTrialStep = 1e6;

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Real coordinates of a Hermitian matrix: diagonal first, then sqrt2 Re and
// sqrt2 Im of the strict upper triangle (column-major over a < b).
void hermitian_coordinates(const CMatrix& x, Eigen::Ref<RVector> out) {
  const Index d = x.rows();
  for (Index a = 0; a < d; ++a) out(a) = x(a, a).real();
  Index pos = d;
  for (Index b = 1; b < d; ++b)
    for (Index a = 0; a < b; ++a) {
      out(pos++) = M_SQRT2 * x(a, b).real();
      out(pos++) = M_SQRT2 * x(a, b).imag();
    }
}

CMatrix hermitian_from_coordinates(const Eigen::Ref<const RVector>& h, Index d) {
  CMatrix x(d, d);
  for (Index a = 0; a < d; ++a) x(a, a) = h(a);
  Index pos = d;
  for (Index b = 1; b < d; ++b)
    for (Index a = 0; a < b; ++a) {
      const cplx v = cplx(h(pos), h(pos + 1)) * M_SQRT1_2;
      pos += 2;
      x(a, b) = v;
      x(b, a) = std::conj(v);
    }
  return x;
}

// h(sum_k psi_k psi_k^dagger) without forming the outer products.
void output_coordinates(const std::vector<CVector>& psis, Eigen::Ref<RVector> out) {
  const Index d = psis.front().size();
  out.setZero();
  for (const auto& psi : psis) {
    for (Index a = 0; a < d; ++a) out(a) += std::norm(psi(a));
    Index pos = d;
    for (Index b = 1; b < d; ++b) {
      const cplx pb = std::conj(psi(b));
      for (Index a = 0; a < b; ++a) {
        const cplx v = psi(a) * pb;
        out(pos++) += M_SQRT2 * v.real();
        out(pos++) += M_SQRT2 * v.imag();
      }
    }
  }
}

std::vector<CVector> probe_images(const CMatrix& stacked, int rank, const CMatrix& probes, Index probe) {
  const Index d = stacked.cols();
  std::vector<CVector> psis;
  psis.reserve(static_cast<std::size_t>(rank));
  for (int k = 0; k < rank; ++k) psis.emplace_back(stacked.middleRows(k * d, d) * probes.col(probe));
  return psis;
}

double real_inner(const CMatrix& a, const CMatrix& b) { return hs_inner(a, b).real(); }

void require_stack(const CMatrix& stacked, int rank, int dim) {
  if (rank < 1 || stacked.cols() != dim || stacked.rows() != static_cast<Index>(rank) * dim) {
    throw DimensionError("Kraus stack shape does not match rank and dimension");
  }
}

// Everything the optimizer needs about one point.
struct Evaluation {
  RMatrix predicted;
  double l2 = 0.0;
  double l1 = 0.0;
  double total = 0.0;
};

Evaluation evaluate(const WignerModel& model, const CMatrix& stacked, int rank, const RMatrix& data, double gamma) {
  Evaluation e;
  e.predicted = model.predict(stacked, rank);
  e.l2 = (data - e.predicted).squaredNorm();
  e.l1 = l1_norm(stacked);
  e.total = e.l2 + gamma * e.l1;
  return e;
}

CMatrix total_gradient(const WignerModel& model, const CMatrix& stacked, int rank, const Evaluation& e,
                       const RMatrix& data, double gamma) {
  CMatrix g = model.weighted_gradient(stacked, rank, 2.0 * (e.predicted - data));
  if (gamma != 0.0) {
    for (Index c = 0; c < stacked.cols(); ++c)
      for (Index r = 0; r < stacked.rows(); ++r)
        g(r, c) += gamma * cplx(sgn(stacked(r, c).real()), sgn(stacked(r, c).imag()));
  }
  return g;
}

// Elementwise soft-thresholding of real and imaginary parts.
CMatrix soft_threshold(const CMatrix& x, double tau) {
  auto shrink = [tau](double a) { return a > tau ? a - tau : (a < -tau ? a + tau : 0.0); };
  CMatrix out(x.rows(), x.cols());
  for (Index c = 0; c < x.cols(); ++c)
    for (Index r = 0; r < x.rows(); ++r) out(r, c) = cplx(shrink(x(r, c).real()), shrink(x(r, c).imag()));
  return out;
}

void require_ready(const TomographyDataset& ds) {
  ds.validate();
  if (!ds.normalized) throw DataError("reconstruction needs a normalized dataset (run normalize_dataset first)");
}

}  // namespace

void ReconstructionConfig::validate() const {
  if (rank < 1) throw ValidationError("rank must be >= 1");
  if (dim < 2) throw ValidationError("dimension must be >= 2");
  if (static_cast<long>(rank) > static_cast<long>(dim) * dim) throw ValidationError("rank must not exceed d^2");
  if (!(gamma >= 0.0)) throw ValidationError("gamma must be >= 0");
  if (max_iters < 0) throw ValidationError("max_iters must be >= 0");
  if (!(step_size > 0.0)) throw ValidationError("step_size must be > 0");
  if (!(grad_tol >= 0.0) || !(loss_tol >= 0.0)) throw ValidationError("tolerances must be >= 0");
  if (!(init_noise >= 0.0)) throw ValidationError("init_noise must be >= 0");
}

IsometryPoint IsometryPoint::checked(CMatrix v, int rank) {
  if (rank < 1 || v.rows() != static_cast<Index>(rank) * v.cols()) {
    throw DimensionError("IsometryPoint: expected a (rank*d) x d matrix");
  }
  const double defect = (v.adjoint() * v - CMatrix::Identity(v.cols(), v.cols())).norm();
  if (defect > 1e-8) {
    std::ostringstream os;
    os << "IsometryPoint: V^dagger V differs from I by " << defect;
    throw ValidationError(os.str());
  }
  return IsometryPoint(std::move(v), rank);
}

IsometryPoint retract(const CMatrix& v, int rank) {
  if (rank < 1 || v.rows() != static_cast<Index>(rank) * v.cols()) {
    throw DimensionError("retract: expected a (rank*d) x d matrix");
  }
  return IsometryPoint(v * inverse_sqrt_gram(v), rank);
}

WignerModel::WignerModel(const ProbeGrid& probes, const WignerGrid& grid, FockDim dim) : dim_(dim.value()) {
  if (probes.alphas.empty() || grid.betas.empty()) throw ValidationError("WignerModel: empty grid");
  probes_.resize(dim.size(), probes.size());
  for (Index i = 0; i < probes.size(); ++i) probes_.col(i) = coherent_state(probes.alphas[static_cast<std::size_t>(i)], dim);
  const auto obs = displaced_parity_observables(grid, dim);
  observables_.resize(grid.size(), dim.size() * dim.size());
  RVector h(dim.size() * dim.size());
  for (Index j = 0; j < grid.size(); ++j) {
    hermitian_coordinates(obs[static_cast<std::size_t>(j)], h);
    observables_.row(j) = h.transpose();
  }
}

RMatrix WignerModel::predict(const CMatrix& stacked, int rank) const {
  require_stack(stacked, rank, dim_);
  const Index n = probe_count();
  RMatrix outputs(static_cast<Index>(dim_) * dim_, n);
  for (Index i = 0; i < n; ++i) output_coordinates(probe_images(stacked, rank, probes_, i), outputs.col(i));
  return (observables_ * outputs).transpose();
}

CMatrix WignerModel::weighted_gradient(const CMatrix& stacked, int rank, const RMatrix& weights) const {
  require_stack(stacked, rank, dim_);
  if (weights.rows() != probe_count() || weights.cols() != beta_count()) {
    throw DimensionError("weighted_gradient: weight matrix shape");
  }
  const Index d = dim_;
  // h(G_i) for G_i = sum_j w_ij M_j.
  const RMatrix combined = observables_.transpose() * weights.transpose();
  CMatrix grad = CMatrix::Zero(stacked.rows(), stacked.cols());
  for (Index i = 0; i < probe_count(); ++i) {
    const CMatrix g = hermitian_from_coordinates(combined.col(i), d);
    const auto psis = probe_images(stacked, rank, probes_, i);
    const auto alpha_adj = probes_.col(i).adjoint();
    for (int k = 0; k < rank; ++k) grad.middleRows(k * d, d).noalias() += 2.0 * (g * psis[k]) * alpha_adj;
  }
  return grad;
}

RMatrix predict_wigner(const IsometryPoint& v, const ProbeGrid& probes, const WignerGrid& grid) {
  const WignerModel model(probes, grid, FockDim(v.dim()));
  return model.predict(v.matrix(), v.rank());
}

double l1_norm(const CMatrix& stacked) {
  return stacked.real().cwiseAbs().sum() + stacked.imag().cwiseAbs().sum();
}

LossReport loss(const IsometryPoint& v, const TomographyDataset& ds, double gamma) {
  ds.validate();
  const WignerModel model(ds.probes, ds.grid, FockDim(v.dim()));
  const Evaluation e = evaluate(model, v.matrix(), v.rank(), ds.values, gamma);
  LossReport r;
  r.l2 = e.l2;
  r.l1 = e.l1;
  r.total = e.total;
  return r;
}

CMatrix euclidean_gradient(const IsometryPoint& v, const TomographyDataset& ds, double gamma) {
  ds.validate();
  const WignerModel model(ds.probes, ds.grid, FockDim(v.dim()));
  const Evaluation e = evaluate(model, v.matrix(), v.rank(), ds.values, gamma);
  return total_gradient(model, v.matrix(), v.rank(), e, ds.values, gamma);
}

CMatrix project_tangent(const CMatrix& v, const CMatrix& g) {
  const CMatrix vg = v.adjoint() * g;
  return g - v * (0.5 * (vg + vg.adjoint()));
}

IsometryPoint initial_point(const ReconstructionConfig& cfg) {
  cfg.validate();
  const Index d = cfg.dim;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix v(static_cast<Index>(cfg.rank) * d, d);
  for (Index c = 0; c < v.cols(); ++c)
    for (Index r = 0; r < v.rows(); ++r) v(r, c) = cplx(normal(rng), normal(rng));
  if (cfg.init == InitKind::kIdentityPerturbed) {
    v *= cfg.init_noise;
    v.topRows(d) += CMatrix::Identity(d, d);
  }
  return retract(v, cfg.rank);
}

ReconstructionResult reconstruct(const TomographyDataset& ds, const ReconstructionConfig& cfg) {
  return reconstruct_from(ds, cfg, initial_point(cfg));
}

ReconstructionResult reconstruct_from(const TomographyDataset& ds, const ReconstructionConfig& cfg,
                                      IsometryPoint start) {
  cfg.validate();
  require_ready(ds);
  if (start.dim() != cfg.dim || start.rank() != cfg.rank) throw DimensionError("start point does not match config");

  const WignerModel model(ds.probes, ds.grid, FockDim(cfg.dim));
  const RMatrix& data = ds.values;
  const int rank = cfg.rank;
  const bool proximal = cfg.step_rule == StepRule::kProximal && cfg.gamma > 0.0;

  // Search direction: the Riemannian gradient of the smooth part only when the
  // L1 term is handled by its proximal map, of the full loss otherwise.
  auto direction = [&](const CMatrix& v, const Evaluation& e) {
    return project_tangent(v, total_gradient(model, v, rank, e, data, proximal ? 0.0 : cfg.gamma));
  };
  auto trial_point = [&](const CMatrix& v, const CMatrix& xi, double t) {
    if (!proximal) return retract(v - t * xi, rank).matrix();
    return retract(soft_threshold(v - t * xi, t * cfg.gamma), rank).matrix();
  };

  CMatrix v = start.matrix();
  Evaluation current = evaluate(model, v, rank, data, cfg.gamma);
  CMatrix xi = direction(v, current);

  LossReport report;
  report.history.push_back(current.total);
  double trial = cfg.step_size;
  double measure = proximal ? std::numeric_limits<double>::infinity() : xi.norm();
  CMatrix prev_v, prev_xi;
  int iter = 0;
  bool stalled = false;

  for (; iter < cfg.max_iters; ++iter) {
    if (measure <= cfg.grad_tol) {
      report.converged = true;
      break;
    }
    if (iter > 0) {
      // Alternating Barzilai-Borwein trial steps.
      const CMatrix s = v - prev_v;
      const CMatrix y = xi - prev_xi;
      const double sy = std::abs(real_inner(s, y));
      const double candidate = (iter % 2 == 1) ? s.squaredNorm() / sy : sy / y.squaredNorm();
      if (sy > 0.0 && std::isfinite(candidate)) trial = std::clamp(candidate, kMinTrialStep, kMaxTrialStep);
    }

    const double gn2 = xi.squaredNorm();
    double t = trial;
    bool accepted = false;
    CMatrix next;
    Evaluation next_eval;
    for (int bt = 0; bt < kMaxBacktracks; ++bt, t *= kBacktrackFactor) {
      try {
        next = trial_point(v, xi, t);
      } catch (const NumericalError&) {
        continue;  // thresholding collapsed the stack; shorten the step
      }
      next_eval = evaluate(model, next, rank, data, cfg.gamma);
      // Armijo condition; for proximal steps in its gradient-mapping form.
      const double decrease = proximal ? (next - v).squaredNorm() / t : t * gn2;
      if (next_eval.total <= current.total - kArmijoDecrease * decrease && next_eval.total < current.total) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      stalled = true;
      break;
    }

    const double improvement = current.total - next_eval.total;
    if (proximal) measure = (next - v).norm() / t;
    prev_v = std::move(v);
    prev_xi = std::move(xi);
    v = std::move(next);
    current = std::move(next_eval);
    xi = direction(v, current);
    if (!proximal) measure = xi.norm();
    report.history.push_back(current.total);

    if (cfg.loss_tol > 0.0 && improvement <= cfg.loss_tol * current.total) {
      report.converged = true;
      ++iter;
      break;
    }
  }
  if (!report.converged && measure <= cfg.grad_tol) report.converged = true;

  report.iters_used = iter;
  report.l2 = current.l2;
  report.l1 = current.l1;
  report.total = current.total;
  report.grad_norm = std::isfinite(measure) ? measure : xi.norm();
  if (!report.converged) {
    std::ostringstream os;
    if (stalled) {
      os << "line search could not decrease the loss after " << iter << " iterations (stationarity measure "
         << report.grad_norm << ")";
    } else {
      os << "reached max_iters=" << cfg.max_iters << " with stationarity measure " << report.grad_norm;
    }
    report.warning = os.str();
  }

  // Re-retract to remove accumulated round-off before certifying.
  KrausSet channel = retract(v, rank).kraus();
  channel.certify();
  return {std::move(channel), std::move(report)};
}

}  // namespace csqpt
