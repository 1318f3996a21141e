#include "superhedge/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

namespace superhedge {

namespace {

constexpr double kPivotEps = 1e-10;  // coefficients below this never pivot

std::string var_label(const LinearProgram& lp, int j) {
  if (j < static_cast<int>(lp.var_names.size()) && !lp.var_names[j].empty())
    return lp.var_names[j];
  return "x" + std::to_string(j);
}

std::string row_label(const LinearProgram& lp, int i) {
  if (i < static_cast<int>(lp.row_names.size()) && !lp.row_names[i].empty())
    return lp.row_names[i];
  return "r" + std::to_string(i);
}

enum class VStat : unsigned char { basic, at_lower, at_upper, free_nb };

// Bounded-variable revised simplex working state. One instance per solve;
// owns all scratch arrays.
class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SolveOptions& opts)
      : lp_(lp), opts_(opts), m_(lp.num_rows()), n_(lp.num_vars()) {
    total_ = n_ + m_;
    sign_ = lp.sense == Sense::maximize ? -1.0 : 1.0;

    acols_.assign(static_cast<std::size_t>(m_) * n_, 0.0);
    b_.resize(m_);
    cost_.assign(total_, 0.0);
    lo_.resize(total_);
    hi_.resize(total_);

    for (int j = 0; j < n_; ++j) {
      cost_[j] = sign_ * lp.objective[j];
      lo_[j] = lp.lower[j];
      hi_[j] = lp.upper[j];
    }
    for (int i = 0; i < m_; ++i) {
      const auto& row = lp.rows[i];
      b_[i] = row.rhs;
      for (const auto& [j, v] : row.coeffs) acols_[col_off(j) + i] += v;
      const int s = n_ + i;
      switch (row.rel) {
        case Rel::le:
          lo_[s] = 0.0;
          hi_[s] = kInf;
          break;
        case Rel::ge:
          lo_[s] = -kInf;
          hi_[s] = 0.0;
          break;
        case Rel::eq:
          lo_[s] = 0.0;
          hi_[s] = 0.0;
          break;
      }
    }

    stat_.assign(total_, VStat::at_lower);
    for (int j = 0; j < total_; ++j) {
      if (std::isfinite(lo_[j]))
        stat_[j] = VStat::at_lower;
      else if (std::isfinite(hi_[j]))
        stat_[j] = VStat::at_upper;
      else
        stat_[j] = VStat::free_nb;
    }

    basic_.resize(m_);
    in_row_.assign(total_, -1);
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      in_row_[n_ + i] = i;
      stat_[n_ + i] = VStat::basic;
      binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;
    }
    xb_.resize(m_);
    recompute_basic_values();

    w_.resize(m_);
    y_.resize(m_);
    colbuf_.resize(m_);
  }

  LpSolution run() {
    LpSolution sol;
    int max_iter = opts_.max_iterations > 0 ? opts_.max_iterations
                                            : 50 * (m_ + n_) + 10000;
    bool use_bland = opts_.pivot == SolveOptions::Pivot::bland;
    double best_measure = kInf;
    int stall = 0;

    for (iter_ = 0; iter_ < max_iter; ++iter_) {
      if (drift_check_due()) maybe_refactor();

      const double infeas = total_infeasibility();
      const bool phase1 = infeas > 0.0;

      compute_duals(phase1);
      int q = -1;
      int dir = 0;
      pick_entering(phase1, use_bland, q, dir);

      if (q < 0) {
        if (phase1) return finish_infeasible(sol);
        return finish_optimal(sol);
      }

      // stall watch: Dantzig falls back to Bland when it stops progressing
      if (!use_bland) {
        const double measure = phase1 ? infeas : objective_value();
        if (measure < best_measure - 1e-12 * (1.0 + std::fabs(best_measure))) {
          best_measure = measure;
          stall = 0;
        } else if (++stall > 200) {
          use_bland = true;
        }
      }

      if (q >= n_) {
        // slack column: w is just a column of binv
        const int i0 = q - n_;
        for (int i = 0; i < m_; ++i)
          w_[i] = binv_[static_cast<std::size_t>(i) * m_ + i0];
      } else {
        compute_column(q, colbuf_.data());
        apply_binv(colbuf_.data(), w_.data());
      }

      bool moved = phase1 ? step_phase1(q, dir) : step_phase2(q, dir);
      if (!moved) {
        if (phase1) {
          // descent with no blocking event cannot happen in exact arithmetic;
          // treat as a numeric dead end
          sol.status = LpSolution::Status::iteration_limit;
          sol.iterations = iter_;
          return sol;
        }
        sol.status = LpSolution::Status::unbounded;
        sol.iterations = iter_;
        fill_primal(sol);
        return sol;
      }
    }
    sol.status = LpSolution::Status::iteration_limit;
    sol.iterations = iter_;
    return sol;
  }

 private:
  std::size_t col_off(int j) const { return static_cast<std::size_t>(j) * m_; }

  double col_value(int j) const {
    switch (stat_[j]) {
      case VStat::basic:
        return xb_[in_row_[j]];
      case VStat::at_lower:
        return lo_[j];
      case VStat::at_upper:
        return hi_[j];
      case VStat::free_nb:
        return 0.0;
    }
    return 0.0;
  }

  void compute_column(int j, double* out) const {
    if (j < n_) {
      std::memcpy(out, acols_.data() + col_off(j), sizeof(double) * m_);
    } else {
      std::fill(out, out + m_, 0.0);
      out[j - n_] = 1.0;
    }
  }

  // out = binv * v
  void apply_binv(const double* v, double* out) const {
    for (int i = 0; i < m_; ++i) {
      const double* row = binv_.data() + static_cast<std::size_t>(i) * m_;
      double s = 0.0;
      for (int k = 0; k < m_; ++k) s += row[k] * v[k];
      out[i] = s;
    }
  }

  void recompute_basic_values() {
    // xb = binv * (b - sum over nonbasic columns at nonzero value)
    std::vector<double> rhs(b_);
    for (int j = 0; j < total_; ++j) {
      if (stat_[j] == VStat::basic) continue;
      const double v = col_value(j);
      if (v == 0.0) continue;
      if (j < n_) {
        const double* col = acols_.data() + col_off(j);
        for (int i = 0; i < m_; ++i) rhs[i] -= col[i] * v;
      } else {
        rhs[j - n_] -= v;
      }
    }
    apply_binv(rhs.data(), xb_.data());
  }

  // Violations below feas_tol are ignored everywhere so that the phase flag,
  // the phase-1 gradient and the infeasibility report stay coherent.
  double violation(int j, double v) const {
    const double lo = lo_[j], hi = hi_[j];
    if (v < lo - opts_.feas_tol) return lo - v;
    if (v > hi + opts_.feas_tol) return v - hi;
    return 0.0;
  }

  double total_infeasibility() const {
    double s = 0.0;
    for (int i = 0; i < m_; ++i) s += violation(basic_[i], xb_[i]);
    return s;
  }

  // Phase-aware simplex multipliers: phase 1 prices the infeasibility
  // gradient, phase 2 the true costs.
  void compute_duals(bool phase1) {
    std::fill(y_.begin(), y_.end(), 0.0);
    for (int i = 0; i < m_; ++i) {
      double c;
      if (phase1) {
        const int j = basic_[i];
        if (xb_[i] < lo_[j] - opts_.feas_tol)
          c = -1.0;
        else if (xb_[i] > hi_[j] + opts_.feas_tol)
          c = 1.0;
        else
          c = 0.0;
      } else {
        c = cost_[basic_[i]];
      }
      if (c == 0.0) continue;
      const double* row = binv_.data() + static_cast<std::size_t>(i) * m_;
      for (int k = 0; k < m_; ++k) y_[k] += c * row[k];
    }
  }

  double reduced_cost(bool phase1, int j) const {
    double c = phase1 ? 0.0 : cost_[j];
    if (j < n_) {
      const double* col = acols_.data() + col_off(j);
      double s = 0.0;
      for (int i = 0; i < m_; ++i) s += y_[i] * col[i];
      return c - s;
    }
    return c - y_[j - n_];
  }

  void pick_entering(bool phase1, bool bland, int& q, int& dir) const {
    q = -1;
    dir = 0;
    double best = opts_.opt_tol;
    for (int j = 0; j < total_; ++j) {
      if (stat_[j] == VStat::basic) continue;
      if (lo_[j] == hi_[j]) continue;  // fixed, never enters
      const double d = reduced_cost(phase1, j);
      int cand_dir = 0;
      if (stat_[j] == VStat::at_lower && d < -opts_.opt_tol)
        cand_dir = 1;
      else if (stat_[j] == VStat::at_upper && d > opts_.opt_tol)
        cand_dir = -1;
      else if (stat_[j] == VStat::free_nb && std::fabs(d) > opts_.opt_tol)
        cand_dir = d < 0 ? 1 : -1;
      if (cand_dir == 0) continue;
      if (bland) {
        q = j;
        dir = cand_dir;
        return;
      }
      if (std::fabs(d) > best) {
        best = std::fabs(d);
        q = j;
        dir = cand_dir;
      }
    }
  }

  // Standard bounded ratio test. Returns false on unbounded.
  bool step_phase2(int q, int dir) {
    double t_best = kInf;
    int r = -1;
    bool r_to_upper = false;
    for (int i = 0; i < m_; ++i) {
      const double wi = w_[i];
      if (std::fabs(wi) < kPivotEps) continue;
      const double delta = dir * wi;  // xb_[i] moves at rate -delta
      const int bj = basic_[i];
      double t;
      bool to_upper;
      if (delta > 0) {
        if (!std::isfinite(lo_[bj])) continue;
        t = (xb_[i] - lo_[bj]) / delta;
        to_upper = false;
      } else {
        if (!std::isfinite(hi_[bj])) continue;
        t = (hi_[bj] - xb_[i]) / (-delta);
        to_upper = true;
      }
      if (t < 0) t = 0;
      if (t < t_best - 1e-12 ||
          (t <= t_best + 1e-12 && r >= 0 && basic_[i] < basic_[r])) {
        t_best = t;
        r = i;
        r_to_upper = to_upper;
      }
    }

    const double range = hi_[q] - lo_[q];
    if (std::isfinite(range) && range < t_best) {
      // bound flip, no basis change
      for (int i = 0; i < m_; ++i) xb_[i] -= range * dir * w_[i];
      stat_[q] = stat_[q] == VStat::at_lower ? VStat::at_upper : VStat::at_lower;
      return true;
    }
    if (r < 0) return false;  // unbounded
    pivot(q, dir, r, t_best, r_to_upper);
    return true;
  }

  // Piecewise-linear phase-1 ratio test: the entering variable may drive
  // several basics across their bounds while total infeasibility keeps
  // falling; we stop at the breakpoint where the slope turns nonnegative.
  bool step_phase1(int q, int dir) {
    struct Event {
      double t;
      int row;
      bool to_upper;
    };
    std::vector<Event> events;
    events.reserve(2 * m_);
    for (int i = 0; i < m_; ++i) {
      const double wi = w_[i];
      if (std::fabs(wi) < kPivotEps) continue;
      const double delta = dir * wi;
      const int bj = basic_[i];
      const double lo = lo_[bj], hi = hi_[bj], xv = xb_[i];
      if (delta > 0) {  // moving down
        if (xv > hi + opts_.feas_tol) {
          events.push_back({(xv - hi) / delta, i, true});
          if (std::isfinite(lo)) events.push_back({(xv - lo) / delta, i, false});
        } else if (xv >= lo - opts_.feas_tol) {
          if (std::isfinite(lo))
            events.push_back({std::max(0.0, (xv - lo) / delta), i, false});
        }
        // already below lo and sinking: no crossing
      } else {  // moving up
        if (xv < lo - opts_.feas_tol) {
          events.push_back({(lo - xv) / (-delta), i, false});
          if (std::isfinite(hi)) events.push_back({(hi - xv) / (-delta), i, true});
        } else if (xv <= hi + opts_.feas_tol) {
          if (std::isfinite(hi))
            events.push_back({std::max(0.0, (hi - xv) / (-delta)), i, true});
        }
      }
    }
    std::sort(events.begin(), events.end(), [&](const Event& a, const Event& b) {
      if (a.t != b.t) return a.t < b.t;
      return basic_[a.row] < basic_[b.row];
    });

    double slope = dir * reduced_cost(true, q);
    const double range = hi_[q] - lo_[q];
    for (const Event& e : events) {
      if (std::isfinite(range) && range <= e.t) {
        for (int i = 0; i < m_; ++i) xb_[i] -= range * dir * w_[i];
        stat_[q] =
            stat_[q] == VStat::at_lower ? VStat::at_upper : VStat::at_lower;
        return true;
      }
      slope += std::fabs(w_[e.row]);
      if (slope >= -1e-12) {
        pivot(q, dir, e.row, e.t, e.to_upper);
        return true;
      }
    }
    if (std::isfinite(range)) {
      for (int i = 0; i < m_; ++i) xb_[i] -= range * dir * w_[i];
      stat_[q] = stat_[q] == VStat::at_lower ? VStat::at_upper : VStat::at_lower;
      return true;
    }
    return false;
  }

  void pivot(int q, int dir, int r, double t, bool leave_to_upper) {
    const double entering_start = col_value(q);
    for (int i = 0; i < m_; ++i) xb_[i] -= t * dir * w_[i];

    const int leaving = basic_[r];
    stat_[leaving] = leave_to_upper ? VStat::at_upper : VStat::at_lower;
    if (!std::isfinite(leave_to_upper ? hi_[leaving] : lo_[leaving]))
      stat_[leaving] = VStat::free_nb;  // cannot happen for blocking bounds
    in_row_[leaving] = -1;

    basic_[r] = q;
    in_row_[q] = r;
    stat_[q] = VStat::basic;
    xb_[r] = entering_start + dir * t;

    // binv <- E * binv with eta column derived from w_
    const double wr = w_[r];
    double* rowr = binv_.data() + static_cast<std::size_t>(r) * m_;
    const double inv = 1.0 / wr;
    for (int k = 0; k < m_; ++k) rowr[k] *= inv;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = w_[i];
      if (f == 0.0) continue;
      double* rowi = binv_.data() + static_cast<std::size_t>(i) * m_;
      for (int k = 0; k < m_; ++k) rowi[k] -= f * rowr[k];
    }
    ++pivots_since_check_;
  }

  bool drift_check_due() const { return pivots_since_check_ >= 128; }

  void maybe_refactor() {
    pivots_since_check_ = 0;
    std::vector<double> xb_now(xb_);
    recompute_basic_values();
    double drift = 0.0;
    for (int i = 0; i < m_; ++i)
      drift = std::max(drift, std::fabs(xb_now[i] - xb_[i]));
    if (drift > 1e-8) refactor();
  }

  void refactor() {
    // Gauss-Jordan inversion of the basis matrix; falls back to the all-slack
    // basis if numerically singular.
    const int m = m_;
    std::vector<double> mat(static_cast<std::size_t>(m) * m, 0.0);
    for (int k = 0; k < m; ++k) {
      compute_column(basic_[k], colbuf_.data());
      for (int i = 0; i < m; ++i) mat[static_cast<std::size_t>(i) * m + k] = colbuf_[i];
    }
    std::vector<double> inv(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) inv[static_cast<std::size_t>(i) * m + i] = 1.0;

    for (int c = 0; c < m; ++c) {
      int piv = -1;
      double best = 1e-12;
      for (int i = c; i < m; ++i) {
        const double v = std::fabs(mat[static_cast<std::size_t>(i) * m + c]);
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (piv < 0) {
        reset_to_slack_basis();
        return;
      }
      if (piv != c) {
        // left-multiplication by a permutation; basis bookkeeping untouched
        for (int k = 0; k < m; ++k) {
          std::swap(mat[static_cast<std::size_t>(piv) * m + k],
                    mat[static_cast<std::size_t>(c) * m + k]);
          std::swap(inv[static_cast<std::size_t>(piv) * m + k],
                    inv[static_cast<std::size_t>(c) * m + k]);
        }
      }
      const double d = 1.0 / mat[static_cast<std::size_t>(c) * m + c];
      for (int k = 0; k < m; ++k) {
        mat[static_cast<std::size_t>(c) * m + k] *= d;
        inv[static_cast<std::size_t>(c) * m + k] *= d;
      }
      for (int i = 0; i < m; ++i) {
        if (i == c) continue;
        const double f = mat[static_cast<std::size_t>(i) * m + c];
        if (f == 0.0) continue;
        for (int k = 0; k < m; ++k) {
          mat[static_cast<std::size_t>(i) * m + k] -=
              f * mat[static_cast<std::size_t>(c) * m + k];
          inv[static_cast<std::size_t>(i) * m + k] -=
              f * inv[static_cast<std::size_t>(c) * m + k];
        }
      }
    }
    binv_.swap(inv);
    recompute_basic_values();
  }

  void reset_to_slack_basis() {
    for (int j = 0; j < total_; ++j) in_row_[j] = -1;
    for (int j = 0; j < total_; ++j) {
      if (stat_[j] == VStat::basic) {
        if (std::isfinite(lo_[j]))
          stat_[j] = VStat::at_lower;
        else if (std::isfinite(hi_[j]))
          stat_[j] = VStat::at_upper;
        else
          stat_[j] = VStat::free_nb;
      }
    }
    std::fill(binv_.begin(), binv_.end(), 0.0);
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      in_row_[n_ + i] = i;
      stat_[n_ + i] = VStat::basic;
      binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;
    }
    recompute_basic_values();
  }

  double objective_value() const {
    double z = 0.0;
    for (int j = 0; j < n_; ++j) z += lp_.objective[j] * col_value(j);
    return z;
  }

  void fill_primal(LpSolution& sol) const {
    sol.x.resize(n_);
    for (int j = 0; j < n_; ++j) sol.x[j] = col_value(j);
    sol.objective = objective_value();
  }

  LpSolution finish_optimal(LpSolution& sol) {
    maybe_refactor();  // certificate-grade duals need a clean basis
    compute_duals(false);
    sol.status = LpSolution::Status::optimal;
    sol.iterations = iter_;
    fill_primal(sol);
    sol.y.resize(m_);
    for (int i = 0; i < m_; ++i) sol.y[i] = sign_ * y_[i];
    sol.reduced_costs.resize(n_);
    for (int j = 0; j < n_; ++j)
      sol.reduced_costs[j] = sign_ * reduced_cost(false, j);
    return sol;
  }

  LpSolution finish_infeasible(LpSolution& sol) {
    maybe_refactor();
    compute_duals(true);
    sol.status = LpSolution::Status::infeasible;
    sol.iterations = iter_;
    // the phase-1 multipliers aggregate the rows into an inequality no
    // in-bound point satisfies; gap equals the residual infeasibility
    sol.farkas.assign(y_.begin(), y_.end());
    return sol;
  }

  const LinearProgram& lp_;
  SolveOptions opts_;
  int m_ = 0, n_ = 0, total_ = 0;
  double sign_ = 1.0;
  int iter_ = 0;
  int pivots_since_check_ = 0;

  std::vector<double> acols_;  // m x n, column-major
  std::vector<double> b_;
  std::vector<double> cost_;  // internal (minimization) costs, slacks zero
  std::vector<double> lo_, hi_;
  std::vector<VStat> stat_;
  std::vector<int> basic_;
  std::vector<int> in_row_;
  std::vector<double> binv_;  // m x m, row-major
  std::vector<double> xb_;
  std::vector<double> w_, y_, colbuf_;
};

}  // namespace

int LinearProgram::add_var(double lo, double hi, double obj, std::string name) {
  objective.push_back(obj);
  lower.push_back(lo);
  upper.push_back(hi);
  if (!name.empty()) {
    var_names.resize(objective.size());
    var_names.back() = std::move(name);
  }
  return static_cast<int>(objective.size()) - 1;
}

int LinearProgram::add_row(std::vector<std::pair<int, double>> coeffs, Rel rel,
                           double rhs, std::string name) {
  rows.push_back(Row{std::move(coeffs), rel, rhs});
  if (!name.empty()) {
    row_names.resize(rows.size());
    row_names.back() = std::move(name);
  }
  return static_cast<int>(rows.size()) - 1;
}

void LinearProgram::validate() const {
  const int n = num_vars();
  if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n)
    throw ValidationError("lp: bounds arrays disagree with objective length");
  for (int j = 0; j < n; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || !std::isfinite(objective[j]))
      throw ValidationError("lp: non-finite data for variable " + std::to_string(j));
    if (lower[j] > upper[j])
      throw ValidationError("lp: empty bound interval for variable " +
                            std::to_string(j));
  }
  for (int i = 0; i < num_rows(); ++i) {
    if (!std::isfinite(rows[i].rhs))
      throw ValidationError("lp: non-finite rhs in row " + std::to_string(i));
    for (const auto& [j, v] : rows[i].coeffs) {
      if (j < 0 || j >= n)
        throw ValidationError("lp: bad variable index in row " + std::to_string(i));
      if (!std::isfinite(v))
        throw ValidationError("lp: non-finite coefficient in row " +
                              std::to_string(i));
    }
  }
}

LpSolution solve(const LinearProgram& lp, const SolveOptions& opts) {
  lp.validate();
  Simplex s(lp, opts);
  return s.run();
}

namespace {

double row_activity(const LinearProgram& lp, const std::vector<double>& x, int i) {
  double s = 0.0;
  for (const auto& [j, v] : lp.rows[i].coeffs) s += v * x[j];
  return s;
}

}  // namespace

VerifyReport verify(const LinearProgram& lp, const LpSolution& sol,
                    double tolerance) {
  VerifyReport rep;
  const int n = lp.num_vars();
  const int m = lp.num_rows();
  if (static_cast<int>(sol.x.size()) != n || static_cast<int>(sol.y.size()) != m) {
    rep.violation = "solution arrays missing or wrong size";
    return rep;
  }
  const double sgn = lp.sense == Sense::maximize ? -1.0 : 1.0;

  auto flag = [&](double& slot, double v, const std::string& what) {
    if (v > slot) {
      slot = v;
      if (rep.violation.empty() || v > std::max({rep.primal_residual,
                                                 rep.dual_residual,
                                                 rep.comp_slack}))
        rep.violation = what;
    }
  };

  // primal feasibility
  for (int j = 0; j < n; ++j) {
    const double scale = 1.0 + std::max(std::fabs(lp.lower[j]), std::fabs(lp.upper[j] == kInf ? 0.0 : lp.upper[j]));
    if (std::isfinite(lp.lower[j]))
      flag(rep.primal_residual, (lp.lower[j] - sol.x[j]) / scale,
           "lower bound of " + var_label(lp, j));
    if (std::isfinite(lp.upper[j]))
      flag(rep.primal_residual, (sol.x[j] - lp.upper[j]) / scale,
           "upper bound of " + var_label(lp, j));
  }
  std::vector<double> act(m);
  for (int i = 0; i < m; ++i) {
    act[i] = row_activity(lp, sol.x, i);
    const double scale = 1.0 + std::fabs(lp.rows[i].rhs);
    const double resid = act[i] - lp.rows[i].rhs;
    switch (lp.rows[i].rel) {
      case Rel::le:
        flag(rep.primal_residual, resid / scale, "row " + row_label(lp, i));
        break;
      case Rel::ge:
        flag(rep.primal_residual, -resid / scale, "row " + row_label(lp, i));
        break;
      case Rel::eq:
        flag(rep.primal_residual, std::fabs(resid) / scale,
             "row " + row_label(lp, i));
        break;
    }
  }

  // dual feasibility, internal minimization convention: y_int = sgn * y,
  // d_int = sgn*c - A^T y_int; le rows need y_int <= 0, ge rows y_int >= 0
  std::vector<double> d(n);
  for (int j = 0; j < n; ++j) d[j] = sgn * lp.objective[j];
  for (int i = 0; i < m; ++i) {
    const double yi = sgn * sol.y[i];
    for (const auto& [j, v] : lp.rows[i].coeffs) d[j] -= yi * v;
    switch (lp.rows[i].rel) {
      case Rel::le:
        flag(rep.dual_residual, yi, "dual sign of row " + row_label(lp, i));
        break;
      case Rel::ge:
        flag(rep.dual_residual, -yi, "dual sign of row " + row_label(lp, i));
        break;
      case Rel::eq:
        break;
    }
    // complementary slackness on rows
    if (lp.rows[i].rel != Rel::eq) {
      const double slack = std::fabs(act[i] - lp.rows[i].rhs);
      flag(rep.comp_slack,
           std::fabs(yi) * slack / (1.0 + std::fabs(lp.rows[i].rhs)),
           "slackness of row " + row_label(lp, i));
    }
  }
  for (int j = 0; j < n; ++j) {
    const double at_lo =
        std::isfinite(lp.lower[j]) ? sol.x[j] - lp.lower[j] : kInf;
    const double at_hi =
        std::isfinite(lp.upper[j]) ? lp.upper[j] - sol.x[j] : kInf;
    const double scale = 1.0 + std::fabs(lp.objective[j]);
    if (at_lo > tolerance * 10 && at_hi > tolerance * 10) {
      // interior: reduced cost must vanish
      flag(rep.dual_residual, std::fabs(d[j]) / scale,
           "reduced cost of interior " + var_label(lp, j));
    } else if (at_lo <= tolerance * 10 && at_hi > tolerance * 10) {
      flag(rep.dual_residual, -d[j] / scale,
           "reduced cost sign at lower bound of " + var_label(lp, j));
    } else if (at_hi <= tolerance * 10 && at_lo > tolerance * 10) {
      flag(rep.dual_residual, d[j] / scale,
           "reduced cost sign at upper bound of " + var_label(lp, j));
    }
  }

  // duality gap with bound contributions
  double primal_obj = 0.0;
  for (int j = 0; j < n; ++j) primal_obj += lp.objective[j] * sol.x[j];
  double dual_obj = 0.0;
  for (int i = 0; i < m; ++i) dual_obj += sgn * sol.y[i] * lp.rows[i].rhs;
  for (int j = 0; j < n; ++j) {
    if (d[j] > 0 && std::isfinite(lp.lower[j]))
      dual_obj += d[j] * lp.lower[j];
    else if (d[j] < 0 && std::isfinite(lp.upper[j]))
      dual_obj += d[j] * lp.upper[j];
  }
  const double gap =
      std::fabs(sgn * primal_obj - dual_obj) / (1.0 + std::fabs(primal_obj));
  rep.gap = gap;
  if (gap > tolerance && rep.violation.empty()) rep.violation = "duality gap";

  rep.ok = rep.primal_residual <= tolerance && rep.dual_residual <= tolerance &&
           rep.comp_slack <= 10 * tolerance && rep.gap <= tolerance;
  return rep;
}

VerifyReport verify_farkas(const LinearProgram& lp, const std::vector<double>& y,
                           double tolerance) {
  VerifyReport rep;
  const int n = lp.num_vars();
  const int m = lp.num_rows();
  if (static_cast<int>(y.size()) != m) {
    rep.violation = "certificate has wrong length";
    return rep;
  }
  // sign conditions: the aggregation sum_i y_i * row_i must give a valid
  // >=-inequality, so le rows need y <= 0 and ge rows y >= 0
  for (int i = 0; i < m; ++i) {
    if (lp.rows[i].rel == Rel::le && y[i] > tolerance) {
      rep.violation = "positive multiplier on le row " + row_label(lp, i);
      return rep;
    }
    if (lp.rows[i].rel == Rel::ge && y[i] < -tolerance) {
      rep.violation = "negative multiplier on ge row " + row_label(lp, i);
      return rep;
    }
  }
  std::vector<double> coef(n, 0.0);
  double rhs = 0.0;
  for (int i = 0; i < m; ++i) {
    if (y[i] == 0.0) continue;
    rhs += y[i] * lp.rows[i].rhs;
    for (const auto& [j, v] : lp.rows[i].coeffs) coef[j] += y[i] * v;
  }
  double reachable = 0.0;  // best value of sum coef_j x_j over the box
  for (int j = 0; j < n; ++j) {
    double c = coef[j];
    if (std::fabs(c) <= 1e-11) continue;
    const double b = c > 0 ? lp.upper[j] : lp.lower[j];
    if (!std::isfinite(b)) {
      rep.violation = "aggregated coefficient escapes through unbounded " +
                      var_label(lp, j);
      return rep;
    }
    reachable += c * b;
  }
  rep.gap = rhs - reachable;
  rep.ok = rep.gap >= tolerance;
  if (!rep.ok && rep.violation.empty())
    rep.violation = "aggregated inequality is satisfiable";
  return rep;
}

void write_lp_text(const LinearProgram& lp, std::ostream& os) {
  os << "\\ exported linear program\n";
  os << (lp.sense == Sense::minimize ? "Minimize\n" : "Maximize\n");
  os << " obj:";
  bool first = true;
  for (int j = 0; j < lp.num_vars(); ++j) {
    const double c = lp.objective[j];
    if (c == 0.0) continue;
    os << (c >= 0 && !first ? " + " : (c < 0 ? " - " : " "))
       << std::fabs(c) << ' ' << var_label(lp, j);
    first = false;
  }
  if (first) os << " 0 " << (lp.num_vars() ? var_label(lp, 0) : std::string("x0"));
  os << "\nSubject To\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    os << ' ' << row_label(lp, i) << ':';
    bool f2 = true;
    for (const auto& [j, v] : lp.rows[i].coeffs) {
      if (v == 0.0) continue;
      os << (v >= 0 && !f2 ? " + " : (v < 0 ? " - " : " ")) << std::fabs(v)
         << ' ' << var_label(lp, j);
      f2 = false;
    }
    if (f2) os << " 0 " << (lp.num_vars() ? var_label(lp, 0) : std::string("x0"));
    const char* rel = lp.rows[i].rel == Rel::le   ? "<="
                      : lp.rows[i].rel == Rel::ge ? ">="
                                                  : "=";
    os << ' ' << rel << ' ' << lp.rows[i].rhs << '\n';
  }
  os << "Bounds\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    const double lo = lp.lower[j], hi = lp.upper[j];
    if (!std::isfinite(lo) && !std::isfinite(hi)) {
      os << ' ' << var_label(lp, j) << " free\n";
    } else if (!std::isfinite(hi)) {
      os << ' ' << lo << " <= " << var_label(lp, j) << '\n';
    } else if (!std::isfinite(lo)) {
      os << " -inf <= " << var_label(lp, j) << " <= " << hi << '\n';
    } else {
      os << ' ' << lo << " <= " << var_label(lp, j) << " <= " << hi << '\n';
    }
  }
  os << "End\n";
}

}  // namespace superhedge
