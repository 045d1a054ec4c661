#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace caes {

enum class Sense { minimize, maximize };
enum class Relation { le, eq, ge };

struct Variable {
    std::string name;
    double lb = 0.0;
    double ub = 0.0;
};

using LinExpr = std::vector<std::pair<int, double>>;

struct Constraint {
    std::string name;
    LinExpr terms;
    Relation rel = Relation::le;
    double rhs = 0.0;
};

struct LinearProgram {
    std::vector<Variable> variables;
    Sense sense = Sense::minimize;
    std::vector<double> objective;  // one coefficient per variable
    double objective_constant = 0.0;
    std::vector<Constraint> constraints;

    int add_variable(const std::string& name, double lb, double ub, double cost = 0.0);
    int add_constraint(const std::string& name, LinExpr terms, Relation rel, double rhs);
    size_t num_variables() const { return variables.size(); }
    double evaluate(const std::vector<double>& x) const;
    // Largest absolute violation of rows and bounds.
    double max_violation(const std::vector<double>& x) const;
};

struct MILPProblem {
    LinearProgram base;
    std::vector<int> integer_vars;  // binary, bounds within [0, 1]
    // Optional branching priority per variable (higher first); empty means uniform.
    std::vector<int> priority;

    int add_binary(const std::string& name, double cost = 0.0, int prio = 0);
};

enum class LPStatus { optimal, infeasible, unbounded, iteration_limit };
const char* lp_status_name(LPStatus s);

struct LPSolution {
    LPStatus status = LPStatus::infeasible;
    std::vector<double> values;
    double objective = 0.0;
    long iterations = 0;
};

LPSolution solve_lp(const LinearProgram& lp);

enum class MILPStatus { optimal, gap_terminated, infeasible, time_limit };
const char* milp_status_name(MILPStatus s);

struct MILPSolution {
    MILPStatus status = MILPStatus::infeasible;
    std::vector<double> values;
    double objective = 0.0;
    double bound = 0.0;
    double gap = 0.0;  // |bound - objective| / max(1, |objective|)
    long nodes = 0;
    long lp_iterations = 0;
    bool has_solution = false;
    // (seconds since start, gap) each time the gap changed
    std::vector<std::pair<double, double>> gap_history;
};

struct MILPOptions {
    double rel_gap = 1e-3;
    double time_limit = 60.0;  // s
    long node_limit = -1;
    double int_tol = 1e-6;
    int dive_every = 50;  // run the diving heuristic every N nodes (0 disables)
    // Depth-first search until the first incumbent, for at most this many
    // nodes, then best bound.
    long plunge_nodes = 2000;
    // Starting points: one value per variable, only integer entries are read,
    // NaN leaves a variable free. A start that is infeasible as given is
    // retried with only its highest-priority integers fixed, then dived.
    std::vector<std::vector<double>> starts;
    // Each new incumbent is followed by a search of at most this many nodes
    // with the highest-priority integers held at their incumbent values
    // (0 disables). Only runs when the problem has more than one priority.
    long polish_nodes = 1000;
};

MILPSolution solve_milp(const MILPProblem& p, const MILPOptions& opt = {});
MILPSolution solve_milp(const MILPProblem& p, double rel_gap, double time_limit);

// x^2 on uniform breakpoints over [lo, hi]. `x` is an affine expression
// sum(terms) + constant. The segment is selected with ceil(log2(segments))
// binaries over a reflected Gray code, and x is a convex combination of two
// adjacent breakpoints. The breakpoints are shifted by the interval centre c,
// so `y` carries (x - c)^2 and expr + constant = y + 2 c x - c^2 carries x^2.
struct PwlSquare {
    int y = -1;
    LinExpr expr;
    double constant = 0.0;
    LinExpr x;  // the argument, x + x_constant
    double x_constant = 0.0;
    std::vector<int> lambdas;
    std::vector<int> binaries;
    double lo = 0.0, hi = 0.0;
    int segments = 0;
    double max_error() const;  // w^2 / 4
};

PwlSquare encode_pwl_square(MILPProblem& p, const LinExpr& x, double x_constant, double lo, double hi, int segments,
                            const std::string& tag, int priority = 0);
PwlSquare encode_pwl_square(MILPProblem& p, int x, double lo, double hi, int segments, const std::string& tag,
                            int priority = 0);

// Writes the segment bits, weights and y of the point where the argument
// evaluates to its value under `values` (argument clamped to [lo, hi]).
void pwl_square_start(const PwlSquare& sq, std::vector<double>& values);

// Chord interpolation of x^2 on the same breakpoints, for checks.
double pwl_square_value(double x, double lo, double hi, int segments);

// x*y with x in [xlo, xhi], y in [ylo, yhi] as ((a x + y/a)^2 - (a x - y/a)^2) / 4,
// a chosen so both factors span equal ranges. Returns the expression for the product.
struct PwlProduct {
    LinExpr expr;  // expr + constant approximates x*y
    double constant = 0.0;
    PwlSquare plus, minus;
    double scale = 1.0;
    double max_error() const;  // (err_plus + err_minus) / 4
};

PwlProduct encode_pwl_product(MILPProblem& p, int x, double xlo, double xhi, int y, double ylo, double yhi,
                              int segments, const std::string& tag, int priority = 0);

// Fixed-format model file. Names longer than 8 characters or containing blanks
// are replaced by generated ones. Values needing more than 12 characters run
// past their field; the reader splits on whitespace.
void export_mps(const MILPProblem& p, std::ostream& out, const std::string& name = "MODEL");
MILPProblem import_mps(std::istream& in);

}  // namespace caes
