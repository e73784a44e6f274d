#include "causalabs/learn.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "causalabs/errors.hpp"
#include "causalabs/rng.hpp"

namespace causalabs {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

Eigen::MatrixXd cayley(const Eigen::MatrixXd& skew) {
  const auto n = skew.rows();
  if (skew.cols() != n) throw DimensionMismatch("skew matrix must be square");
  if ((skew + skew.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw RangeError("matrix is not skew-symmetric");
  }
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  // (I + K) is invertible for every skew K.
  return (eye - skew) * (eye + skew).partialPivLu().solve(eye);
}

double acyclicity_penalty(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  if (a.cols() != n) throw DimensionMismatch("matrix must be square");
  const Eigen::MatrixXd squared = a.cwiseProduct(a);
  return squared.exp().trace() - static_cast<double>(n);
}

Eigen::MatrixXd acyclicity_penalty_gradient(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd squared = a.cwiseProduct(a);
  const Eigen::MatrixXd expm = squared.exp();
  return 2.0 * a.cwiseProduct(expm.transpose());
}

std::vector<VertexSet> default_candidate_family(int n) {
  if (n < 1) throw ConfigError("dimension must be >= 1");
  if (n > 10) {
    throw ConfigError(
        "default candidate family is all nonempty subsets; n > 10 needs an "
        "explicit candidate list");
  }
  std::vector<VertexSet> out;
  out.reserve((std::size_t{1} << n) - 1);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    out.push_back(VertexSet::from_bitmask(mask));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct Workspace {
  std::vector<std::uint64_t> masks;
  std::vector<int> sizes;
  std::vector<double> constants;  // per-candidate sigma-dependent constant
};

Workspace make_workspace(const std::vector<VertexSet>& candidates, int n,
                         double slack) {
  if (candidates.empty()) throw ConfigError("candidate family is empty");
  if (!(slack > 0.0)) throw ConfigError("slack must be positive");
  Workspace ws;
  ws.masks.reserve(candidates.size());
  ws.sizes.reserve(candidates.size());
  ws.constants.reserve(candidates.size());
  const double log_slack_var = std::log(slack * slack);
  for (const VertexSet& s : candidates) {
    if (s.empty() || s.nodes().back() > n) {
      throw ConfigError("candidate target outside 1..n");
    }
    ws.masks.push_back(s.bitmask());
    const int size = static_cast<int>(s.size());
    ws.sizes.push_back(size);
    // log N(z~_S; 0, I) and log N(r_{S^c}; 0, s^2 I) normalizers.
    ws.constants.push_back(-0.5 * size * kLog2Pi -
                           0.5 * (n - size) * (kLog2Pi + log_slack_var));
  }
  return ws;
}

double logsumexp(const Eigen::VectorXd& t) {
  const double m = t.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((t.array() - m).exp().sum());
}

// Shared forward/backward pass over the whole batch at once; the per-row
// work is expressed as a handful of GEMMs against the candidate mask matrix.
// When grad == nullptr only the value is computed.
double loglik_impl(const FitParams& params,
                   const std::vector<VertexSet>& candidates,
                   const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_tilde,
                   double slack, FitGradient* grad) {
  const int n = static_cast<int>(x.cols());
  const auto rows = x.rows();
  if (rows == 0) throw EmptyDataset("batch is empty");
  if (x_tilde.rows() != rows || x_tilde.cols() != n) {
    throw DimensionMismatch("paired batch shapes differ");
  }
  if (params.skew.rows() != n || params.coefficients.rows() != n) {
    throw DimensionMismatch("parameter dimension differs from data");
  }
  if (params.logits.size() != static_cast<Eigen::Index>(candidates.size())) {
    throw DimensionMismatch("one logit per candidate required");
  }
  if (n > 64) throw SizeError("latent dimension above 64 unsupported");

  const Workspace ws = make_workspace(candidates, n, slack);
  const auto n_cand = static_cast<Eigen::Index>(candidates.size());
  const double inv_var = 1.0 / (slack * slack);

  const auto fail = [&] {
    if (grad) {
      grad->skew = Eigen::MatrixXd::Zero(n, n);
      grad->coefficients = Eigen::MatrixXd::Zero(n, n);
      grad->logits = Eigen::VectorXd::Zero(n_cand);
    }
    return -std::numeric_limits<double>::infinity();
  };

  const Eigen::MatrixXd q = cayley(params.skew);
  const Eigen::MatrixXd b =
      Eigen::MatrixXd::Identity(n, n) - params.coefficients;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
  const double det = lu.determinant();
  if (!(std::abs(det) > 0.0) || !std::isfinite(det)) return fail();
  const double logabsdet = std::log(std::abs(det));
  const double base = -0.5 * n * kLog2Pi + logabsdet;

  // log softmax of the logits
  Eigen::VectorXd logw = params.logits;
  logw.array() -= logsumexp(params.logits);

  // membership mask, n x candidates
  Eigen::MatrixXd mask = Eigen::MatrixXd::Zero(n, n_cand);
  for (Eigen::Index s = 0; s < n_cand; ++s) {
    for (std::uint64_t m = ws.masks[static_cast<std::size_t>(s)]; m != 0;
         m &= m - 1) {
      mask(std::countr_zero(m), s) = 1.0;
    }
  }

  // Row-wise latents and residuals (rows hold transposed vectors):
  //   z = Q^T x, eps = (I-A) z, r = (I-A)(z~ - z)
  const Eigen::MatrixXd z = x * q;
  const Eigen::MatrixXd zt = x_tilde * q;
  const Eigen::MatrixXd eps = z * b.transpose();
  const Eigen::MatrixXd diff = zt - z;
  const Eigen::MatrixXd resid = diff * b.transpose();

  const Eigen::ArrayXXd resid_sq = resid.array().square();
  const Eigen::VectorXd eps_row_sq = eps.array().square().rowwise().sum();
  const Eigen::VectorXd resid_row_sq = resid_sq.rowwise().sum();

  // t(r, s) = logw_s + base - eps^2/2 + c_s - zt_S^2/2 - r_{S^c}^2/(2 s^2);
  // the two per-candidate sums share one GEMM against the mask.
  const Eigen::MatrixXd per_coord =
      ((0.5 * inv_var) * resid_sq - 0.5 * zt.array().square()).matrix();
  Eigen::MatrixXd t = per_coord * mask;
  t.colwise() += Eigen::VectorXd::Constant(rows, base) -
                 0.5 * (eps_row_sq + inv_var * resid_row_sq);
  Eigen::RowVectorXd column_shift(n_cand);
  for (Eigen::Index s = 0; s < n_cand; ++s) {
    column_shift(s) = logw(s) + ws.constants[static_cast<std::size_t>(s)];
  }
  t.rowwise() += column_shift;

  const Eigen::VectorXd row_max = t.rowwise().maxCoeff();
  if (!row_max.allFinite()) return fail();
  const Eigen::ArrayXXd shifted = (t.colwise() - row_max).array().exp();
  const Eigen::VectorXd row_sum = shifted.rowwise().sum();
  const Eigen::VectorXd row_loglik = row_max.array() + row_sum.array().log();
  const double value = row_loglik.mean();
  if (!std::isfinite(value)) return fail();
  if (!grad) return value;

  // posteriors p(r, s) and per-coordinate intervention probabilities
  const Eigen::MatrixXd posterior =
      (shifted.colwise() / row_sum.array()).matrix();
  const Eigen::MatrixXd intervened = posterior * mask.transpose();  // rows x n

  const Eigen::MatrixXd weighted_resid =
      inv_var *
      (resid.array() * (1.0 - intervened.array()).cwiseMax(0.0)).matrix();

  // per-row gradients wrt z and z~, as rows
  Eigen::MatrixXd g_z = weighted_resid * b;
  g_z.noalias() -= eps * b;
  Eigen::MatrixXd g_zt = -(zt.array() * intervened.array()).matrix();
  g_zt.noalias() -= weighted_resid * b;

  const double inv_rows = 1.0 / static_cast<double>(rows);
  Eigen::MatrixXd grad_q = x.transpose() * g_z;
  grad_q.noalias() += x_tilde.transpose() * g_zt;
  grad_q *= inv_rows;

  Eigen::MatrixXd grad_a = eps.transpose() * z;
  grad_a.noalias() += weighted_resid.transpose() * diff;
  grad_a *= inv_rows;
  grad_a -= lu.inverse().transpose();  // d log|det(I-A)| / dA

  // Chain rule through the Cayley chart:
  //   dQ = -(I + Q) dK (I + K)^-1
  // so the Frobenius gradient wrt K is -(I+Q)^T grad_Q (I+K)^-T; the free
  // parameters are the strict upper triangle, giving raw_uv - raw_vu.
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd ik_inv_t =
      (eye + params.skew).transpose().partialPivLu().solve(eye);
  const Eigen::MatrixXd raw = -(eye + q).transpose() * grad_q * ik_inv_t;
  grad->skew = raw - raw.transpose();
  grad->coefficients = grad_a;
  grad->logits = posterior.colwise().mean();
  grad->logits -= logw.array().exp().matrix();
  return value;
}

}  // namespace

double relaxed_loglik(const FitParams& params,
                      const std::vector<VertexSet>& candidates,
                      const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_tilde,
                      double slack) {
  return loglik_impl(params, candidates, x, x_tilde, slack, nullptr);
}

double relaxed_loglik_grad(const FitParams& params,
                           const std::vector<VertexSet>& candidates,
                           const Eigen::MatrixXd& x,
                           const Eigen::MatrixXd& x_tilde, double slack,
                           FitGradient* grad) {
  if (!grad) throw ConfigError("grad output must not be null");
  return loglik_impl(params, candidates, x, x_tilde, slack, grad);
}

namespace {

struct StageSchedule {
  double slack;
  double lambda;
};

StageSchedule schedule_at(const FitConfig& config, int stage) {
  if (config.stages == 1) {
    return {config.slack_final, config.acyclicity_weight_final};
  }
  const double frac =
      static_cast<double>(stage) / static_cast<double>(config.stages - 1);
  const double slack =
      config.slack_initial *
      std::pow(config.slack_final / config.slack_initial, frac);
  return {slack, config.acyclicity_weight_final * frac};
}

struct RestartOutcome {
  FitParams params;
  std::vector<double> stage_objectives;
  double final_objective = -std::numeric_limits<double>::infinity();
  bool diverged = false;
};

double objective_value(const FitParams& params,
                       const std::vector<VertexSet>& candidates,
                       const Eigen::MatrixXd& x, const Eigen::MatrixXd& xt,
                       const StageSchedule& sched) {
  const double ll = relaxed_loglik(params, candidates, x, xt, sched.slack);
  if (!std::isfinite(ll)) return ll;
  return ll - sched.lambda * acyclicity_penalty(params.coefficients);
}

RestartOutcome run_restart(const Eigen::MatrixXd& x, const Eigen::MatrixXd& xt,
                           const FitConfig& config,
                           const std::vector<VertexSet>& candidates,
                           int restart) {
  const int n = static_cast<int>(x.cols());
  const auto rows = x.rows();

  RestartOutcome out;
  out.params.skew = Eigen::MatrixXd::Zero(n, n);
  {
    RngStream rng(config.seed, static_cast<std::uint64_t>(restart),
                  stream_id::kFitInit);
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        const double k = 0.1 * rng.next_normal();
        out.params.skew(u, v) = k;
        out.params.skew(v, u) = -k;
      }
    }
  }
  out.params.coefficients = Eigen::MatrixXd::Zero(n, n);
  out.params.logits =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(candidates.size()));

  const int per_stage = std::max(1, config.steps / config.stages);
  const std::int64_t batch =
      config.batch_size > 0 ? std::min<std::int64_t>(config.batch_size, rows)
                            : rows;
  std::int64_t cursor = 0;

  FitGradient grad;
  for (int stage = 0; stage < config.stages; ++stage) {
    const StageSchedule sched = schedule_at(config, stage);
    double current = -std::numeric_limits<double>::infinity();
    Eigen::MatrixXd bx, bxt;
    for (int step = 0; step < per_stage; ++step) {
      const Eigen::MatrixXd* px = &x;
      const Eigen::MatrixXd* pxt = &xt;
      if (batch < rows) {
        bx.resize(batch, n);
        bxt.resize(batch, n);
        for (std::int64_t i = 0; i < batch; ++i) {
          const auto r = (cursor + i) % rows;
          bx.row(i) = x.row(r);
          bxt.row(i) = xt.row(r);
        }
        cursor = (cursor + batch) % rows;
        px = &bx;
        pxt = &bxt;
      }

      const double ll = relaxed_loglik_grad(out.params, candidates, *px, *pxt,
                                            sched.slack, &grad);
      if (!std::isfinite(ll)) {
        out.diverged = true;
        return out;
      }
      double value = ll;
      if (sched.lambda > 0.0) {
        value -= sched.lambda * acyclicity_penalty(out.params.coefficients);
        grad.coefficients -=
            sched.lambda * acyclicity_penalty_gradient(out.params.coefficients);
      }
      current = value;

      // Fixed step with halving backtracking: never accept a decrease.
      double step_size = config.step_size;
      bool accepted = false;
      FitParams trial;
      while (step_size > 1e-12) {
        trial.skew = out.params.skew + step_size * grad.skew;
        trial.coefficients =
            out.params.coefficients + step_size * grad.coefficients;
        trial.logits = out.params.logits + step_size * grad.logits;
        const double trial_value =
            objective_value(trial, candidates, *px, *pxt, sched);
        if (std::isfinite(trial_value) && trial_value >= value) {
          out.params = std::move(trial);
          current = trial_value;
          accepted = true;
          break;
        }
        step_size *= 0.5;
      }
      if (!accepted) break;  // local optimum at this slack level
      if (std::abs(current - value) <=
          config.convergence_tol * std::max(1.0, std::abs(value))) {
        break;
      }
    }
    out.stage_objectives.push_back(
        objective_value(out.params, candidates, x, xt, sched));
  }

  out.final_objective = objective_value(
      out.params, candidates, x, xt, schedule_at(config, config.stages - 1));
  if (!std::isfinite(out.final_objective)) out.diverged = true;
  return out;
}

}  // namespace

FitResult fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_tilde,
              const FitConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const int n = static_cast<int>(x.cols());
  if (x.rows() == 0) throw EmptyDataset("dataset is empty");
  if (x_tilde.rows() != x.rows() || x_tilde.cols() != n) {
    throw DimensionMismatch("paired data shapes differ");
  }
  if (config.restarts < 1) throw ConfigError("restarts must be >= 1");
  if (config.steps < 1) throw ConfigError("steps must be >= 1");
  if (config.stages < 1) throw ConfigError("stages must be >= 1");
  if (!(config.step_size > 0.0)) throw ConfigError("step size must be > 0");
  if (!(config.slack_initial >= config.slack_final &&
        config.slack_final > 0.0)) {
    throw ConfigError("slack schedule must decrease to a positive value");
  }
  if (config.acyclicity_weight_final < 0.0) {
    throw ConfigError("acyclicity weight must be >= 0");
  }
  if (config.batch_size < 0) throw ConfigError("batch size must be >= 0");

  const std::vector<VertexSet> candidates =
      config.candidates.empty() ? default_candidate_family(n)
                                : config.candidates;

  std::vector<RestartOutcome> outcomes(config.restarts);
  {
    std::vector<std::future<RestartOutcome>> futures;
    futures.reserve(config.restarts);
    for (int r = 0; r < config.restarts; ++r) {
      futures.push_back(std::async(std::launch::async, [&, r] {
        return run_restart(x, x_tilde, config, candidates, r);
      }));
    }
    for (int r = 0; r < config.restarts; ++r) outcomes[r] = futures[r].get();
  }

  int best = -1;
  std::vector<int> diverged;
  for (int r = 0; r < config.restarts; ++r) {
    if (outcomes[r].diverged) {
      diverged.push_back(r);
      continue;
    }
    if (best == -1 ||
        outcomes[r].final_objective > outcomes[best].final_objective) {
      best = r;
    }
  }
  if (best == -1) {
    throw NumericalOverflow("all restarts diverged");
  }

  const RestartOutcome& winner = outcomes[best];
  FitResult result;
  result.rotation = cayley(winner.params.skew);
  result.coefficients = winner.params.coefficients;
  Eigen::VectorXd logw = winner.params.logits;
  logw.array() -= logsumexp(winner.params.logits);
  result.mixture_weights = logw.array().exp();
  result.candidates = candidates;
  result.stage_objectives = winner.stage_objectives;
  result.final_objective = winner.final_objective;
  result.best_restart = best;
  result.diverged_restarts = std::move(diverged);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

FitResult fit(const CounterfactualDataset& dataset, const FitConfig& config) {
  // Only the paired observations are consumed; ground-truth metadata and
  // labels never reach the optimizer.
  return fit(dataset.x, dataset.x_tilde, config);
}

}  // namespace causalabs
