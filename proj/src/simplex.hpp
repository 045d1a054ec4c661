#pragma once

// Bounded primal simplex on a dense tableau. Internal to the solver; the
// branch-and-bound driver keeps one instance alive and changes bounds between
// solves so each node starts from the previous basis.

#include <vector>

#include "caes/milp.hpp"

namespace caes::detail {

class Simplex {
public:
    explicit Simplex(const LinearProgram& lp);

    LPStatus solve(long max_iter = -1);
    void set_bounds(int j, double lo, double up);
    double lower(int j) const { return lo_[j]; }
    double upper(int j) const { return up_[j]; }

    std::vector<double> primal() const;  // structural values
    double objective() const;            // in the caller's sense, constant included
    long iterations() const { return iters_; }
    // Rebuilds the tableau from the original rows with the slack basis.
    void reset();
    // Recomputes the tableau for the current basis from the original rows.
    // Falls back to reset() and returns false when the basis is singular.
    bool reinvert();

private:
    enum : char { basic = 0, at_lb = 1, at_ub = 2 };

    void build();
    void recompute_basics();
    void compute_duals(bool phase1);
    void pivot(int r, int q);
    int choose_entering(bool phase1) const;
    bool infeasible_basics() const;
    double residual() const;

    const LinearProgram* lp_;
    int m_ = 0, n_ = 0, N_ = 0;
    double sign_ = 1.0;
    std::vector<double> cost_;  // minimization form, size N_
    std::vector<double> lo_, up_;
    std::vector<double> T_;     // m_ x N_
    std::vector<double> d_;     // reduced costs
    std::vector<double> x_;     // values of all columns
    std::vector<int> head_;     // basic column per row
    std::vector<int> row_of_;   // row of a basic column, -1 otherwise
    std::vector<char> stat_;
    std::vector<double> p1cost_;
    std::vector<int> nz_;
    long iters_ = 0;
    bool bland_ = false;
};

}  // namespace caes::detail
