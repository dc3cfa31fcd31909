#include "simplex.hpp"

#include <algorithm>
#include <cmath>

namespace ttw::detail {

namespace {

constexpr double kPivotTolerance = 1e-9;
constexpr double kDualTolerance = 1e-9;
constexpr int kRefactorInterval = 64;

}  // namespace

DualSimplex::DualSimplex(const LpProblem* problem, std::span<const double> lower,
                         std::span<const double> upper)
    : problem_(problem), n_(problem->num_cols), m_(problem->num_rows) {
  lower_.assign(total(), 0.0);
  upper_.assign(total(), 0.0);
  for (int j = 0; j < n_; ++j) {
    lower_[j] = lower[j];
    upper_[j] = upper[j];
  }
  for (int i = 0; i < m_; ++i) {
    lower_[n_ + i] = problem->row_lower[i];
    upper_[n_ + i] = problem->row_upper[i];
  }
  init_slack_basis();
}

void DualSimplex::init_slack_basis() {
  x_.assign(total(), 0.0);
  d_.assign(total(), 0.0);
  head_.resize(m_);
  position_.assign(total(), -1);
  at_upper_.assign(total(), 0);
  for (int i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    position_[n_ + i] = i;
  }
  for (int j = 0; j < n_; ++j) {
    d_[j] = problem_->cost[j];
    at_upper_[j] = problem_->cost[j] < 0 ? 1 : 0;
    x_[j] = at_upper_[j] ? upper_[j] : lower_[j];
  }
  binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  for (int i = 0; i < m_; ++i) binv_[static_cast<std::size_t>(i) * m_ + i] = -1.0;
  recompute_primal();
  since_refactor_ = 0;
}

void DualSimplex::reset() { init_slack_basis(); }

double DualSimplex::primal_tolerance(double bound) const {
  return 1e-7 + 1e-9 * std::abs(bound);
}

double DualSimplex::column_dot(int j, const double* row) const {
  if (j >= n_) return -row[j - n_];
  double s = 0;
  for (const auto& [r, a] : problem_->columns[j]) s += row[r] * a;
  return s;
}

void DualSimplex::column_times_inverse(int j, std::vector<double>& out) const {
  out.assign(m_, 0.0);
  if (j >= n_) {
    const int k = j - n_;
    for (int i = 0; i < m_; ++i) out[i] = -binv_[static_cast<std::size_t>(i) * m_ + k];
    return;
  }
  for (const auto& [k, a] : problem_->columns[j]) {
    for (int i = 0; i < m_; ++i) out[i] += binv_[static_cast<std::size_t>(i) * m_ + k] * a;
  }
}

void DualSimplex::set_bounds(int col, double lower, double upper) {
  lower_[col] = lower;
  upper_[col] = upper;
  if (position_[col] >= 0) return;
  const double target = at_upper_[col] ? upper : lower;
  const double delta = target - x_[col];
  if (delta == 0) return;
  x_[col] = target;
  std::vector<double> w;
  column_times_inverse(col, w);
  for (int i = 0; i < m_; ++i) x_[head_[i]] -= w[i] * delta;
}

// Rebuilds the inverse of the basis by Gauss-Jordan elimination with partial
// pivoting.
bool DualSimplex::refactor() {
  const std::size_t mm = static_cast<std::size_t>(m_);
  std::vector<double> b(mm * mm, 0.0);
  for (int c = 0; c < m_; ++c) {
    const int j = head_[c];
    if (j >= n_) {
      b[static_cast<std::size_t>(j - n_) * mm + c] = -1.0;
    } else {
      for (const auto& [r, a] : problem_->columns[j]) b[static_cast<std::size_t>(r) * mm + c] = a;
    }
  }
  std::vector<double> inv(mm * mm, 0.0);
  for (int i = 0; i < m_; ++i) inv[i * mm + i] = 1.0;
  for (int c = 0; c < m_; ++c) {
    int piv = c;
    for (int r = c + 1; r < m_; ++r) {
      if (std::abs(b[r * mm + c]) > std::abs(b[piv * mm + c])) piv = r;
    }
    if (std::abs(b[piv * mm + c]) < 1e-12) return false;
    if (piv != c) {
      for (int k = 0; k < m_; ++k) {
        std::swap(b[piv * mm + k], b[c * mm + k]);
        std::swap(inv[piv * mm + k], inv[c * mm + k]);
      }
    }
    const double p = b[c * mm + c];
    for (int k = 0; k < m_; ++k) {
      b[c * mm + k] /= p;
      inv[c * mm + k] /= p;
    }
    for (int r = 0; r < m_; ++r) {
      if (r == c) continue;
      const double f = b[r * mm + c];
      if (f == 0) continue;
      for (int k = 0; k < m_; ++k) {
        b[r * mm + k] -= f * b[c * mm + k];
        inv[r * mm + k] -= f * inv[c * mm + k];
      }
    }
  }
  binv_ = std::move(inv);
  since_refactor_ = 0;
  recompute_primal();
  recompute_duals();
  return true;
}

void DualSimplex::recompute_primal() {
  // B x_B = -N x_N
  std::vector<double> rhs(m_, 0.0);
  for (int j = 0; j < total(); ++j) {
    if (position_[j] >= 0) continue;
    const double v = x_[j];
    if (v == 0) continue;
    if (j >= n_) {
      rhs[j - n_] += v;
    } else {
      for (const auto& [r, a] : problem_->columns[j]) rhs[r] -= a * v;
    }
  }
  for (int i = 0; i < m_; ++i) {
    double s = 0;
    const double* row = &binv_[static_cast<std::size_t>(i) * m_];
    for (int k = 0; k < m_; ++k) s += row[k] * rhs[k];
    x_[head_[i]] = s;
  }
}

void DualSimplex::recompute_duals() {
  std::vector<double> y(m_, 0.0);
  for (int i = 0; i < m_; ++i) {
    const int j = head_[i];
    const double c = j < n_ ? problem_->cost[j] : 0.0;
    if (c == 0) continue;
    const double* row = &binv_[static_cast<std::size_t>(i) * m_];
    for (int k = 0; k < m_; ++k) y[k] += c * row[k];
  }
  for (int j = 0; j < total(); ++j) {
    if (position_[j] >= 0) {
      d_[j] = 0;
      continue;
    }
    const double c = j < n_ ? problem_->cost[j] : 0.0;
    d_[j] = c - column_dot(j, y.data());
  }
}

LpStatus DualSimplex::solve(long max_iterations) {
  for (int j = 0; j < total(); ++j) {
    if (lower_[j] > upper_[j] + primal_tolerance(upper_[j])) return LpStatus::kInfeasible;
  }
  std::vector<double> alpha(total(), 0.0);
  std::vector<double> w;
  for (long it = 0; it < max_iterations; ++it) {
    if (since_refactor_ >= kRefactorInterval && !refactor()) {
      return LpStatus::kNumericalFailure;
    }
    // Leaving row: largest bound violation.
    int r = -1;
    double worst = 0;
    bool to_lower = false;
    for (int i = 0; i < m_; ++i) {
      const int j = head_[i];
      const double v = x_[j];
      if (v < lower_[j] - primal_tolerance(lower_[j])) {
        if (lower_[j] - v > worst) {
          worst = lower_[j] - v;
          r = i;
          to_lower = true;
        }
      } else if (v > upper_[j] + primal_tolerance(upper_[j])) {
        if (v - upper_[j] > worst) {
          worst = v - upper_[j];
          r = i;
          to_lower = false;
        }
      }
    }
    if (r < 0) {
      // Confirm on a fresh factorization, then repair reduced costs that
      // drifted to the wrong sign by moving boxed columns to the other bound.
      if (since_refactor_ > 0) {
        if (!refactor()) return LpStatus::kNumericalFailure;
        continue;
      }
      bool flipped = false;
      for (int j = 0; j < total(); ++j) {
        if (position_[j] >= 0 || lower_[j] == upper_[j]) continue;
        const bool wrong = at_upper_[j] ? d_[j] > 1e-7 : d_[j] < -1e-7;
        if (!wrong) continue;
        const double other = at_upper_[j] ? lower_[j] : upper_[j];
        if (!std::isfinite(other)) return LpStatus::kNumericalFailure;
        at_upper_[j] = !at_upper_[j];
        x_[j] = other;
        flipped = true;
      }
      if (!flipped) return LpStatus::kOptimal;
      recompute_primal();
      continue;
    }

    const double* rho = &binv_[static_cast<std::size_t>(r) * m_];
    // Harris ratio test. The leaving variable moves up to its lower bound
    // (to_lower) or down to its upper bound; an entering candidate must
    // keep its reduced cost sign.
    double theta_max = kInf;
    for (int j = 0; j < total(); ++j) {
      if (position_[j] >= 0 || lower_[j] == upper_[j]) continue;
      const double a = column_dot(j, rho);
      alpha[j] = a;
      if (std::abs(a) < kPivotTolerance) continue;
      const double s = to_lower ? -a : a;
      const bool eligible = at_upper_[j] ? s < 0 : s > 0;
      if (!eligible) continue;
      const double dj = std::abs(d_[j]);
      theta_max = std::min(theta_max, (dj + kDualTolerance) / std::abs(a));
    }
    if (theta_max == kInf) return LpStatus::kInfeasible;
    int q = -1;
    double best_alpha = 0;
    for (int j = 0; j < total(); ++j) {
      if (position_[j] >= 0 || lower_[j] == upper_[j]) continue;
      const double a = alpha[j];
      if (std::abs(a) < kPivotTolerance) continue;
      const double s = to_lower ? -a : a;
      const bool eligible = at_upper_[j] ? s < 0 : s > 0;
      if (!eligible) continue;
      if (std::abs(d_[j]) / std::abs(a) <= theta_max && std::abs(a) > best_alpha) {
        best_alpha = std::abs(a);
        q = j;
      }
    }
    if (q < 0) return LpStatus::kInfeasible;

    column_times_inverse(q, w);
    const double aq = w[r];
    if (std::abs(aq) < kPivotTolerance ||
        std::abs(aq - alpha[q]) > 1e-6 * (1.0 + std::abs(aq))) {
      if (since_refactor_ == 0 || !refactor()) return LpStatus::kNumericalFailure;
      continue;
    }

    const int p = head_[r];
    const double target = to_lower ? lower_[p] : upper_[p];
    const double step = (x_[p] - target) / aq;
    for (int i = 0; i < m_; ++i) x_[head_[i]] -= w[i] * step;
    x_[q] += step;
    x_[p] = target;

    const double theta_d = d_[q] / aq;
    for (int j = 0; j < total(); ++j) {
      if (position_[j] >= 0 || j == q || lower_[j] == upper_[j]) continue;
      d_[j] -= theta_d * alpha[j];
    }
    // Fixed columns skipped the ratio test; their reduced costs are
    // refreshed exactly at the next refactor.
    for (int j = 0; j < total(); ++j) {
      if (position_[j] < 0 && j != q && lower_[j] == upper_[j]) {
        d_[j] -= theta_d * column_dot(j, rho);
      }
    }
    d_[p] = -theta_d;
    d_[q] = 0;

    double* prow = &binv_[static_cast<std::size_t>(r) * m_];
    for (int k = 0; k < m_; ++k) prow[k] /= aq;
    for (int i = 0; i < m_; ++i) {
      if (i == r || w[i] == 0) continue;
      const double f = w[i];
      double* row = &binv_[static_cast<std::size_t>(i) * m_];
      for (int k = 0; k < m_; ++k) row[k] -= f * prow[k];
    }
    head_[r] = q;
    position_[q] = r;
    position_[p] = -1;
    at_upper_[p] = to_lower ? 0 : 1;
    ++iterations_;
    ++since_refactor_;
  }
  return LpStatus::kIterationLimit;
}

double DualSimplex::objective() const {
  double s = 0;
  for (int j = 0; j < n_; ++j) s += problem_->cost[j] * x_[j];
  return s;
}

}  // namespace ttw::detail
