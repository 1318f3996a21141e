#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "superhedge/common.hpp"

namespace superhedge {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Rel { le, eq, ge };
enum class Sense { minimize, maximize };

// Dense-friendly LP description. Rows hold sparse coefficient lists; variable
// bounds may be +-inf. Immutable once handed to solve().
struct LinearProgram {
  struct Row {
    std::vector<std::pair<int, double>> coeffs;  // (variable, coefficient)
    Rel rel = Rel::le;
    double rhs = 0.0;
  };

  Sense sense = Sense::minimize;
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Row> rows;
  std::vector<std::string> var_names;  // optional, for export/diagnostics
  std::vector<std::string> row_names;  // optional

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  // Returns the new variable's index.
  int add_var(double lo, double hi, double obj, std::string name = {});
  // Returns the new row's index. Coefficients may appear in any order;
  // duplicate variable entries are summed.
  int add_row(std::vector<std::pair<int, double>> coeffs, Rel rel, double rhs,
              std::string name = {});

  void validate() const;  // throws ValidationError on bad dimensions / NaN
};

struct SolveOptions {
  enum class Pivot { bland, dantzig };
  Pivot pivot = Pivot::bland;   // Bland is the cycling-safe default
  int max_iterations = 0;       // 0 = automatic limit
  double feas_tol = tol::feasibility;
  double opt_tol = tol::optimality;
};

struct LpSolution {
  enum class Status { optimal, infeasible, unbounded, iteration_limit };

  Status status = Status::iteration_limit;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> x;              // primal values (num_vars)
  std::vector<double> y;              // row duals (num_rows)
  std::vector<double> reduced_costs;  // per variable (num_vars)
  std::vector<double> farkas;         // row multipliers when infeasible
  int iterations = 0;
};

// Two-phase bounded-variable revised simplex. Never throws for infeasible or
// unbounded inputs; those come back as status codes.
LpSolution solve(const LinearProgram& lp, const SolveOptions& opts = {});

struct VerifyReport {
  bool ok = false;
  double primal_residual = 0.0;  // worst scaled row/bound violation
  double dual_residual = 0.0;    // worst scaled dual-feasibility violation
  double comp_slack = 0.0;       // worst complementary-slackness violation
  double gap = 0.0;              // |primal objective - dual objective|, scaled
  std::string violation;         // first offending row/variable, if any
};

// Recomputes feasibility, dual feasibility, complementary slackness and the
// duality gap from scratch; trusts nothing inside `sol` except x and y.
VerifyReport verify(const LinearProgram& lp, const LpSolution& sol, double tolerance);

// Checks an infeasibility certificate: with multipliers y (respecting row
// senses), even the best-in-bounds x violates the aggregated constraint by a
// strictly positive margin.
VerifyReport verify_farkas(const LinearProgram& lp, const std::vector<double>& y,
                           double tolerance);

// Plain-text export in LP interchange format. Unnamed columns print as x<j>,
// unnamed rows as r<i>.
void write_lp_text(const LinearProgram& lp, std::ostream& os);

}  // namespace superhedge
