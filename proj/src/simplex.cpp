#include "simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace caes::detail {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double ptol = 1e-9;   // primal feasibility
constexpr double dtol = 1e-9;   // reduced cost
constexpr double pivtol = 1e-7;
}  // namespace

Simplex::Simplex(const LinearProgram& lp) : lp_(&lp) {
    m_ = static_cast<int>(lp.constraints.size());
    n_ = static_cast<int>(lp.variables.size());
    N_ = n_ + m_;
    if (lp.objective.size() != lp.variables.size())
        throw std::invalid_argument("objective length differs from variable count");
    sign_ = lp.sense == Sense::maximize ? -1.0 : 1.0;
    cost_.assign(N_, 0.0);
    for (int j = 0; j < n_; ++j) cost_[j] = sign_ * lp.objective[j];
    lo_.assign(N_, 0.0);
    up_.assign(N_, 0.0);
    for (int j = 0; j < n_; ++j) {
        const auto& v = lp.variables[j];
        if (!std::isfinite(v.lb) && !std::isfinite(v.ub))
            throw std::invalid_argument("variable '" + v.name + "' has no finite bound");
        lo_[j] = v.lb;
        up_[j] = v.ub;
    }
    for (int i = 0; i < m_; ++i) {
        const auto& c = lp.constraints[i];
        for (auto& [j, a] : c.terms)
            if (j < 0 || j >= n_) throw std::invalid_argument("constraint '" + c.name + "' references unknown variable");
        lo_[n_ + i] = c.rel == Relation::le ? -inf : c.rhs;
        up_[n_ + i] = c.rel == Relation::ge ? inf : c.rhs;
    }
    build();
}

void Simplex::build() {
    T_.assign(static_cast<size_t>(m_) * N_, 0.0);
    for (int i = 0; i < m_; ++i) {
        double* row = &T_[static_cast<size_t>(i) * N_];
        for (auto& [j, a] : lp_->constraints[i].terms) row[j] -= a;
        row[n_ + i] = 1.0;
    }
    head_.resize(m_);
    row_of_.assign(N_, -1);
    stat_.assign(N_, at_lb);
    x_.assign(N_, 0.0);
    for (int i = 0; i < m_; ++i) {
        head_[i] = n_ + i;
        row_of_[n_ + i] = i;
        stat_[n_ + i] = basic;
    }
    for (int j = 0; j < n_; ++j) {
        if (std::isfinite(lo_[j])) {
            stat_[j] = at_lb;
            x_[j] = lo_[j];
        } else {
            stat_[j] = at_ub;
            x_[j] = up_[j];
        }
    }
    d_.assign(N_, 0.0);
    bland_ = false;
}

void Simplex::reset() { build(); }

bool Simplex::reinvert() {
    const std::vector<int> target(head_.begin(), head_.end());
    const std::vector<char> stat = stat_;
    const std::vector<double> x = x_;
    std::vector<char> in_target(N_, 0);
    for (int q : target) in_target[q] = 1;
    // fresh slack tableau
    std::fill(T_.begin(), T_.end(), 0.0);
    for (int i = 0; i < m_; ++i) {
        double* row = &T_[static_cast<size_t>(i) * N_];
        for (auto& [j, a] : lp_->constraints[i].terms) row[j] -= a;
        row[n_ + i] = 1.0;
        head_[i] = n_ + i;
    }
    std::fill(row_of_.begin(), row_of_.end(), -1);
    for (int i = 0; i < m_; ++i) row_of_[n_ + i] = i;
    for (int q : target) {
        if (q >= n_) continue;
        int r = -1;
        double best = 0.0;
        for (int i = 0; i < m_; ++i) {
            if (in_target[head_[i]]) continue;
            const double a = std::abs(T_[static_cast<size_t>(i) * N_ + q]);
            if (a > best) {
                best = a;
                r = i;
            }
        }
        if (r < 0 || best < 1e-11) {
            build();
            return false;
        }
        pivot(r, q);
    }
    stat_ = stat;
    x_ = x;
    for (int i = 0; i < m_; ++i) stat_[head_[i]] = basic;
    recompute_basics();
    return true;
}

void Simplex::set_bounds(int j, double lo, double up) {
    lo_[j] = lo;
    up_[j] = up;
    if (stat_[j] == basic) return;
    double nv = x_[j];
    if (stat_[j] == at_lb) {
        if (std::isfinite(lo)) nv = lo;
        else { stat_[j] = at_ub; nv = up; }
    } else {
        if (std::isfinite(up)) nv = up;
        else { stat_[j] = at_lb; nv = lo; }
    }
    const double delta = nv - x_[j];
    if (delta != 0.0) {
        for (int i = 0; i < m_; ++i) {
            double t = T_[static_cast<size_t>(i) * N_ + j];
            if (t != 0.0) x_[head_[i]] -= t * delta;
        }
        x_[j] = nv;
    }
}

void Simplex::recompute_basics() {
    nz_.clear();
    for (int j = 0; j < N_; ++j)
        if (stat_[j] != basic && x_[j] != 0.0) nz_.push_back(j);
    for (int i = 0; i < m_; ++i) {
        const double* row = &T_[static_cast<size_t>(i) * N_];
        double s = 0.0;
        for (int j : nz_) s -= row[j] * x_[j];
        x_[head_[i]] = s;
    }
}

bool Simplex::infeasible_basics() const {
    for (int i = 0; i < m_; ++i) {
        int b = head_[i];
        if (x_[b] < lo_[b] - ptol || x_[b] > up_[b] + ptol) return true;
    }
    return false;
}

void Simplex::compute_duals(bool phase1) {
    std::fill(d_.begin(), d_.end(), 0.0);
    if (!phase1)
        for (int j = 0; j < N_; ++j)
            if (stat_[j] != basic) d_[j] = cost_[j];
    for (int i = 0; i < m_; ++i) {
        int b = head_[i];
        double cb;
        if (phase1) {
            cb = x_[b] < lo_[b] - ptol ? -1.0 : (x_[b] > up_[b] + ptol ? 1.0 : 0.0);
        } else {
            cb = cost_[b];
        }
        if (cb == 0.0) continue;
        const double* row = &T_[static_cast<size_t>(i) * N_];
        for (int j = 0; j < N_; ++j)
            if (row[j] != 0.0) d_[j] -= cb * row[j];
    }
    for (int i = 0; i < m_; ++i) d_[head_[i]] = 0.0;
}

int Simplex::choose_entering(bool) const {
    int best = -1;
    double best_score = 0.0;
    for (int j = 0; j < N_; ++j) {
        if (stat_[j] == basic || lo_[j] == up_[j]) continue;
        double score = 0.0;
        if (stat_[j] == at_lb && d_[j] < -dtol) score = -d_[j];
        else if (stat_[j] == at_ub && d_[j] > dtol) score = d_[j];
        else continue;
        if (bland_) return j;
        if (score > best_score) {
            best_score = score;
            best = j;
        }
    }
    return best;
}

void Simplex::pivot(int r, int q) {
    double* prow = &T_[static_cast<size_t>(r) * N_];
    const double piv = prow[q];
    const double inv = 1.0 / piv;
    nz_.clear();
    for (int j = 0; j < N_; ++j) {
        if (prow[j] == 0.0) continue;
        prow[j] *= inv;
        if (std::abs(prow[j]) < 1e-14) {
            prow[j] = 0.0;
            continue;
        }
        nz_.push_back(j);
    }
    prow[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
        if (i == r) continue;
        double* row = &T_[static_cast<size_t>(i) * N_];
        const double f = row[q];
        if (f == 0.0) continue;
        for (int j : nz_) row[j] -= f * prow[j];
        row[q] = 0.0;
    }
    const double f = d_[q];
    if (f != 0.0) {
        for (int j : nz_) d_[j] -= f * prow[j];
        d_[q] = 0.0;
    }
    const int old = head_[r];
    head_[r] = q;
    row_of_[q] = r;
    row_of_[old] = -1;
    stat_[q] = basic;
}

LPStatus Simplex::solve(long max_iter) {
    if (max_iter < 0) max_iter = 200L * (m_ + N_) + 1000;
    recompute_basics();
    long degenerate = 0;
    int repairs = 0;
    bland_ = false;
    bool phase1 = infeasible_basics();
    if (!phase1) compute_duals(false);
    for (long it = 0; it < max_iter; ++it) {
        if (phase1) {
            if (!infeasible_basics()) {
                phase1 = false;
                compute_duals(false);
            } else {
                compute_duals(true);
            }
        }
        if (it > 0 && it % 200 == 0 && residual() > 1e-9) {
            reinvert();
            phase1 = infeasible_basics();
            if (!phase1) compute_duals(false);
            continue;
        }
        const int q = choose_entering(phase1);
        if (q < 0) {
            if (residual() > 1e-9 && repairs < 3) {
                ++repairs;
                if (!reinvert()) recompute_basics();
                phase1 = infeasible_basics();
                if (!phase1) compute_duals(false);
                continue;
            }
            if (phase1) return LPStatus::infeasible;
            if (!phase1) {
                // reduced costs drift too; confirm optimality with fresh ones
                compute_duals(false);
                if (choose_entering(false) >= 0) continue;
            }
            return LPStatus::optimal;
        }
        const double dir = stat_[q] == at_lb ? 1.0 : -1.0;
        // ratio test
        double theta = up_[q] - lo_[q];
        int leave = -1;
        char leave_stat = at_lb;
        double best_piv = 0.0;
        for (int i = 0; i < m_; ++i) {
            const double t = T_[static_cast<size_t>(i) * N_ + q];
            if (std::abs(t) < pivtol) continue;
            const double g = -t * dir;  // rate of change of the basic variable
            const int b = head_[i];
            const double v = x_[b];
            double lim = inf;
            char st = at_lb;
            const bool below = v < lo_[b] - ptol;
            const bool above = v > up_[b] + ptol;
            if (g > 0) {
                if (below) { lim = (lo_[b] - v) / g; st = at_lb; }
                else if (!above && std::isfinite(up_[b])) { lim = (up_[b] - v) / g; st = at_ub; }
            } else {
                if (above) { lim = (v - up_[b]) / -g; st = at_ub; }
                else if (!below && std::isfinite(lo_[b])) { lim = (v - lo_[b]) / -g; st = at_lb; }
            }
            if (!(lim < inf)) continue;
            if (lim < 0) lim = 0;
            const double a = std::abs(t);
            bool take = lim < theta - 1e-12;
            if (!take && lim <= theta + 1e-12) {
                if (leave < 0) take = true;
                else if (bland_) take = head_[i] < head_[leave];
                else take = a > best_piv;
            }
            if (take) {
                theta = std::min(theta, lim);
                leave = i;
                leave_stat = st;
                best_piv = a;
            }
        }
        if (!(theta < inf)) {
            if (phase1) throw std::logic_error("simplex: unbounded ray during feasibility phase");
            return LPStatus::unbounded;
        }
        ++iters_;
        if (theta < 1e-12) {
            if (++degenerate > 50) bland_ = true;
        } else {
            degenerate = 0;
            bland_ = false;
        }
        const double delta = dir * theta;
        if (delta != 0.0) {
            for (int i = 0; i < m_; ++i) {
                const double t = T_[static_cast<size_t>(i) * N_ + q];
                if (t != 0.0) x_[head_[i]] -= t * delta;
            }
            x_[q] += delta;
        }
        if (leave < 0) {
            // bound flip
            stat_[q] = stat_[q] == at_lb ? at_ub : at_lb;
            x_[q] = stat_[q] == at_lb ? lo_[q] : up_[q];
            continue;
        }
        const int b = head_[leave];
        pivot(leave, q);
        stat_[b] = leave_stat;
        x_[b] = leave_stat == at_lb ? lo_[b] : up_[b];
    }
    return LPStatus::iteration_limit;
}

double Simplex::residual() const {
    double worst = 0.0;
    for (int i = 0; i < m_; ++i) {
        double s = 0.0, scale = 1.0;
        for (auto& [j, a] : lp_->constraints[i].terms) {
            s += a * x_[j];
            scale = std::max(scale, std::abs(a * x_[j]));
        }
        worst = std::max(worst, std::abs(s - x_[n_ + i]) / scale);
    }
    return worst;
}

std::vector<double> Simplex::primal() const { return std::vector<double>(x_.begin(), x_.begin() + n_); }

double Simplex::objective() const {
    double s = lp_->objective_constant;
    for (int j = 0; j < n_; ++j) s += lp_->objective[j] * x_[j];
    return s;
}

}  // namespace caes::detail
