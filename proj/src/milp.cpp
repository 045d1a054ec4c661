#include "caes/milp.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <functional>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "caes/io.hpp"
#include "simplex.hpp"

namespace caes {

int LinearProgram::add_variable(const std::string& name, double lb, double ub, double cost) {
    if (lb > ub) throw std::invalid_argument("variable '" + name + "': lower bound exceeds upper bound");
    variables.push_back({name, lb, ub});
    objective.push_back(cost);
    return static_cast<int>(variables.size()) - 1;
}

int LinearProgram::add_constraint(const std::string& name, LinExpr terms, Relation rel, double rhs) {
    constraints.push_back({name, std::move(terms), rel, rhs});
    return static_cast<int>(constraints.size()) - 1;
}

double LinearProgram::evaluate(const std::vector<double>& x) const {
    double s = objective_constant;
    for (size_t j = 0; j < objective.size(); ++j) s += objective[j] * x[j];
    return s;
}

double LinearProgram::max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (size_t j = 0; j < variables.size(); ++j) {
        worst = std::max(worst, variables[j].lb - x[j]);
        worst = std::max(worst, x[j] - variables[j].ub);
    }
    for (auto& c : constraints) {
        double s = 0.0;
        for (auto& [j, a] : c.terms) s += a * x[j];
        if (c.rel != Relation::ge) worst = std::max(worst, s - c.rhs);
        if (c.rel != Relation::le) worst = std::max(worst, c.rhs - s);
    }
    return worst;
}

int MILPProblem::add_binary(const std::string& name, double cost, int prio) {
    int j = base.add_variable(name, 0.0, 1.0, cost);
    integer_vars.push_back(j);
    if (prio != 0 || !priority.empty()) {
        priority.resize(base.variables.size(), 0);
        priority[j] = prio;
    }
    return j;
}

const char* lp_status_name(LPStatus s) {
    switch (s) {
        case LPStatus::optimal: return "optimal";
        case LPStatus::infeasible: return "infeasible";
        case LPStatus::unbounded: return "unbounded";
        case LPStatus::iteration_limit: return "iteration-limit";
    }
    return "?";
}

const char* milp_status_name(MILPStatus s) {
    switch (s) {
        case MILPStatus::optimal: return "optimal";
        case MILPStatus::gap_terminated: return "gap-terminated";
        case MILPStatus::infeasible: return "infeasible";
        case MILPStatus::time_limit: return "time-limit";
    }
    return "?";
}

LPSolution solve_lp(const LinearProgram& lp) {
    detail::Simplex sx(lp);
    LPSolution sol;
    sol.status = sx.solve();
    sol.iterations = sx.iterations();
    if (sol.status == LPStatus::optimal) {
        sol.values = sx.primal();
        sol.objective = sx.objective();
    }
    return sol;
}

// ---------------------------------------------------------------- branch and bound

namespace {

struct Node {
    std::vector<std::pair<int, char>> fixes;  // binary variable, value
    double bound = 0.0;                       // parent LP value, maximization sense
    long id = 0;
    double key = 0.0;                         // bound on a coarse grid, so near-ties go depth first
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.key != b.key) return a.key < b.key;
        if (a.fixes.size() != b.fixes.size()) return a.fixes.size() < b.fixes.size();
        return a.id > b.id;
    }
};

class BranchAndBound {
public:
    BranchAndBound(const MILPProblem& p, const MILPOptions& opt)
        : p_(p), opt_(opt), sx_(p.base), start_(std::chrono::steady_clock::now()) {
        sense_ = p.base.sense == Sense::maximize ? 1.0 : -1.0;
        is_int_.assign(p.base.variables.size(), 0);
        for (int j : p.integer_vars) {
            const auto& v = p.base.variables.at(j);
            if (v.lb < 0.0 || v.ub > 1.0) throw std::invalid_argument("integer variable '" + v.name + "' is not binary");
            is_int_[j] = 1;
        }
        cur_fix_.assign(p.base.variables.size(), -1);
    }

    MILPSolution run() {
        MILPSolution out;
        for (auto& st : opt_.starts) try_start(st);
        std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
        std::vector<Node> stack;  // depth-first phase
        stack.push_back(Node{{}, std::numeric_limits<double>::infinity(), next_id_++, std::numeric_limits<double>::infinity()});
        double global_bound = std::numeric_limits<double>::infinity();
        bool timed_out = false;
        long processed = 0;
        auto end_plunge = [&] {
            for (auto& nd : stack) open.push(std::move(nd));
            stack.clear();
        };
        if (has_inc_) end_plunge();
        while (!open.empty() || !stack.empty()) {
            if (!stack.empty() && (has_inc_ || processed >= opt_.plunge_nodes)) end_plunge();
            const bool plunging = !stack.empty();
            if (!plunging) global_bound = std::min(global_bound, queue_bound(open.top().bound));
            if (has_inc_ && inc_score_ > polished_score_) polish();
            if (has_inc_) {
                double g = gap(global_bound);
                record_gap(g);
                if (g <= opt_.rel_gap) break;
            }
            if (elapsed() > opt_.time_limit || (opt_.node_limit >= 0 && processed >= opt_.node_limit)) {
                timed_out = true;
                break;
            }
            Node node;
            if (plunging) {
                node = std::move(stack.back());
                stack.pop_back();
            } else {
                node = open.top();
                open.pop();
            }
            if (has_inc_ && node.bound <= inc_score_ + 1e-9 * std::max(1.0, std::abs(inc_score_))) continue;
            ++processed;
            apply(node.fixes);
            double score;
            if (!solve_node(score)) continue;
            if (has_inc_ && score <= inc_score_ + 1e-9 * std::max(1.0, std::abs(inc_score_))) continue;
            auto x = sx_.primal();
            int br = branching_var(x);
            if (br < 0) {
                offer(x);
                continue;
            }
            if (opt_.dive_every > 0 && (processed == 1 || processed % opt_.dive_every == 0)) {
                dive(node.fixes, x);
            }
            const double bound = std::min(node.bound, score);
            if (quantum_ == 0.0) quantum_ = 1e-9 * std::max(1.0, std::abs(bound));
            // the child on the side of the LP value is explored first among ties
            const char near = x[br] >= 0.5 ? 1 : 0;
            for (char v : {char(1 - near), near}) {
                Node child{node.fixes, bound, next_id_++, std::floor(bound / quantum_)};
                child.fixes.emplace_back(br, v);
                if (plunging) stack.push_back(std::move(child));
                else open.push(std::move(child));
            }
        }
        end_plunge();
        if (!open.empty()) global_bound = std::min(global_bound, queue_bound(open.top().bound));
        out.nodes = processed;
        out.lp_iterations = sx_.iterations();
        out.has_solution = has_inc_;
        if (!has_inc_) {
            out.status = timed_out ? MILPStatus::time_limit : MILPStatus::infeasible;
            out.gap = std::numeric_limits<double>::infinity();
            out.bound = sense_ * global_bound;
            out.gap_history = history_;
            return out;
        }
        // nodes left in the queue that the incumbent already dominates prove nothing open
        const bool proven =
            open.empty() || open.top().bound + quantum_ <= inc_score_ + 1e-9 * std::max(1.0, std::abs(inc_score_));
        if (proven) global_bound = inc_score_;
        global_bound = std::max(global_bound, inc_score_);
        out.values = inc_;
        out.objective = p_.base.evaluate(inc_);
        out.bound = sense_ * global_bound;
        out.gap = gap(global_bound);
        record_gap(out.gap);
        out.gap_history = history_;
        if (proven) out.status = MILPStatus::optimal;
        else if (out.gap <= opt_.rel_gap) out.status = MILPStatus::gap_terminated;
        else out.status = MILPStatus::time_limit;
        return out;
    }

private:
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    // Keys tie within one quantum, so the top of the queue may sit up to a
    // quantum below the best open node. Nodes below the incumbent bound nothing.
    double queue_bound(double top) const {
        const double b = top + quantum_;
        return has_inc_ ? std::max(b, inc_score_) : b;
    }

    double gap(double bound) const { return std::abs(bound - inc_score_) / std::max(1.0, std::abs(inc_score_)); }

    void record_gap(double g) {
        if (history_.empty() || history_.back().second != g) history_.emplace_back(elapsed(), g);
    }

    void apply(const std::vector<std::pair<int, char>>& fixes) {
        std::vector<int> want(cur_fix_.size(), -1);
        for (auto& [j, v] : fixes) want[j] = v;
        for (int j : p_.integer_vars) {
            if (want[j] == cur_fix_[j]) continue;
            const auto& var = p_.base.variables[j];
            if (want[j] < 0) sx_.set_bounds(j, var.lb, var.ub);
            else sx_.set_bounds(j, want[j], want[j]);
            cur_fix_[j] = want[j];
        }
    }

    // Solves the current LP; returns false when infeasible.
    bool solve_node(double& score) {
        LPStatus st = sx_.solve();
        if (st == LPStatus::iteration_limit) {
            sx_.reset();
            for (int j : p_.integer_vars)
                if (cur_fix_[j] >= 0) sx_.set_bounds(j, cur_fix_[j], cur_fix_[j]);
            st = sx_.solve();
        }
        if (st == LPStatus::infeasible) return false;
        if (st == LPStatus::unbounded) throw std::domain_error("MILP relaxation is unbounded");
        if (st != LPStatus::optimal) throw std::runtime_error("simplex iteration limit reached");
        score = sense_ * sx_.objective();
        return true;
    }

    int branching_var(const std::vector<double>& x) const {
        int best = -1;
        int best_prio = std::numeric_limits<int>::min();
        double best_frac = 0.0;
        for (int j : p_.integer_vars) {
            const double f = std::abs(x[j] - std::round(x[j]));
            if (f <= opt_.int_tol) continue;
            const int prio = p_.priority.empty() ? 0 : p_.priority[j];
            const double dist = 0.5 - std::abs(x[j] - std::floor(x[j]) - 0.5);
            if (prio > best_prio || (prio == best_prio && (dist > best_frac + 1e-12 || (std::abs(dist - best_frac) <= 1e-12 && j < best)))) {
                best = j;
                best_prio = prio;
                best_frac = dist;
            }
        }
        return best;
    }

    void offer(std::vector<double> x) {
        for (int j : p_.integer_vars) x[j] = std::round(x[j]);
        if (p_.base.max_violation(x) > 1e-6) return;
        const double score = sense_ * p_.base.evaluate(x);
        if (!has_inc_ || score > inc_score_) {
            has_inc_ = true;
            inc_score_ = score;
            inc_ = std::move(x);
        }
    }

    void polish() {
        polished_score_ = inc_score_;
        if (opt_.polish_nodes <= 0 || p_.priority.empty()) return;
        const int top = *std::max_element(p_.priority.begin(), p_.priority.end());
        const int bottom = *std::min_element(p_.priority.begin(), p_.priority.end());
        if (top == bottom) return;
        std::vector<char> key;
        for (int j : p_.integer_vars)
            if (p_.priority[j] == top) key.push_back(inc_[j] >= 0.5);
        if (!polished_.insert(key).second) return;
        MILPProblem sub = p_;
        for (int j : p_.integer_vars)
            if (p_.priority[j] == top) sub.base.variables[j].lb = sub.base.variables[j].ub = std::round(inc_[j]);
        MILPOptions o = opt_;
        o.polish_nodes = 0;
        o.node_limit = opt_.polish_nodes;
        o.time_limit = std::max(0.0, opt_.time_limit - elapsed());
        o.starts = {inc_};
        const MILPSolution r = BranchAndBound(sub, o).run();
        if (r.has_solution) offer(r.values);
        polished_score_ = inc_score_;
    }

    void try_start(const std::vector<double>& start) {
        if (start.size() != p_.base.variables.size())
            throw std::invalid_argument("MILP start has " + std::to_string(start.size()) + " values, expected " +
                                        std::to_string(p_.base.variables.size()));
        int top = std::numeric_limits<int>::min();
        for (int j : p_.integer_vars)
            if (!std::isnan(start[j])) top = std::max(top, p_.priority.empty() ? 0 : p_.priority[j]);
        for (bool all : {true, false}) {
            std::vector<std::pair<int, char>> fixes;
            for (int j : p_.integer_vars) {
                if (std::isnan(start[j])) continue;
                if (!all && (p_.priority.empty() ? 0 : p_.priority[j]) < top) continue;
                fixes.emplace_back(j, start[j] >= 0.5 ? 1 : 0);
            }
            apply(fixes);
            double score;
            if (!solve_node(score)) continue;
            auto x = sx_.primal();
            if (branching_var(x) < 0) offer(x);
            else dive(fixes, x);
            if (has_inc_) break;
        }
        apply({});
    }

    void dive(std::vector<std::pair<int, char>> fixes, std::vector<double> x) {
        const size_t limit = p_.integer_vars.size() + 1;
        for (size_t step = 0; step < limit; ++step) {
            if (elapsed() > opt_.time_limit) return;
            int br = branching_var(x);
            if (br < 0) {
                offer(x);
                return;
            }
            char first = x[br] >= 0.5 ? 1 : 0;
            bool ok = false;
            for (char v : {first, char(1 - first)}) {
                fixes.emplace_back(br, v);
                apply(fixes);
                double score;
                if (solve_node(score) && (!has_inc_ || score > inc_score_ + 1e-9 * std::max(1.0, std::abs(inc_score_)))) {
                    ok = true;
                    x = sx_.primal();
                    break;
                }
                fixes.pop_back();
            }
            if (!ok) return;
        }
    }

    const MILPProblem& p_;
    MILPOptions opt_;
    detail::Simplex sx_;
    std::chrono::steady_clock::time_point start_;
    double sense_ = 1.0;
    std::vector<char> is_int_;
    std::vector<int> cur_fix_;
    bool has_inc_ = false;
    double inc_score_ = -std::numeric_limits<double>::infinity();
    std::vector<double> inc_;
    long next_id_ = 0;
    double quantum_ = 0.0;
    std::vector<std::pair<double, double>> history_;
    double polished_score_ = -std::numeric_limits<double>::infinity();
    std::set<std::vector<char>> polished_;
};

}  // namespace

MILPSolution solve_milp(const MILPProblem& p, const MILPOptions& opt) {
    if (!p.priority.empty() && p.priority.size() != p.base.variables.size()) {
        MILPProblem q = p;
        q.priority.resize(q.base.variables.size(), 0);
        return BranchAndBound(q, opt).run();
    }
    return BranchAndBound(p, opt).run();
}

MILPSolution solve_milp(const MILPProblem& p, double rel_gap, double time_limit) {
    MILPOptions o;
    o.rel_gap = rel_gap;
    o.time_limit = time_limit;
    return solve_milp(p, o);
}

// ---------------------------------------------------------------- piecewise-linear squares

double PwlSquare::max_error() const {
    const double w = (hi - lo) / segments;
    return w * w / 4.0;
}

double PwlProduct::max_error() const { return (plus.max_error() + minus.max_error()) / 4.0; }

double pwl_square_value(double x, double lo, double hi, int segments) {
    const double w = (hi - lo) / segments;
    int s = static_cast<int>(std::floor((x - lo) / w));
    s = std::clamp(s, 0, segments - 1);
    const double a = lo + s * w, b = a + w;
    const double t = (x - a) / w;
    return (1 - t) * a * a + t * b * b;
}

void pwl_square_start(const PwlSquare& sq, std::vector<double>& values) {
    double x = sq.x_constant;
    for (auto& [j, a] : sq.x) x += a * values.at(j);
    x = std::clamp(x, sq.lo, sq.hi);
    const double w = (sq.hi - sq.lo) / sq.segments;
    const int s = std::clamp(static_cast<int>(std::floor((x - sq.lo) / w)), 0, sq.segments - 1);
    const int code = s ^ (s >> 1);
    for (size_t l = 0; l < sq.binaries.size(); ++l) values.at(sq.binaries[l]) = (code >> l) & 1;
    const double t = std::clamp((x - sq.lo - s * w) / w, 0.0, 1.0);
    for (int l : sq.lambdas) values.at(l) = 0.0;
    values.at(sq.lambdas[s]) = 1.0 - t;
    values.at(sq.lambdas[s + 1]) = t;
    const double half = 0.5 * (sq.hi - sq.lo);
    const double u0 = -half + s * w, u1 = s + 1 == sq.segments ? half : -half + (s + 1) * w;
    values.at(sq.y) = (1.0 - t) * u0 * u0 + t * u1 * u1;
}

PwlSquare encode_pwl_square(MILPProblem& p, const LinExpr& x, double x_constant, double lo, double hi, int segments,
                            const std::string& tag, int priority) {
    if (!(lo < hi)) throw std::invalid_argument("encode_pwl_square: empty interval for " + tag);
    if (segments < 1) throw std::invalid_argument("encode_pwl_square: segments must be at least 1");
    auto& lp = p.base;
    PwlSquare sq;
    sq.lo = lo;
    sq.hi = hi;
    sq.segments = segments;
    sq.x = x;
    sq.x_constant = x_constant;
    const double w = (hi - lo) / segments;
    const double c = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    sq.y = lp.add_variable(tag + "_y", 0.0, half * half);
    LinExpr convex, link = x, ydef{{sq.y, 1.0}};
    for (int i = 0; i <= segments; ++i) {
        const double u = i == segments ? half : -half + i * w;
        int l = lp.add_variable(tag + "_l" + std::to_string(i), 0.0, 1.0);
        sq.lambdas.push_back(l);
        convex.emplace_back(l, 1.0);
        link.emplace_back(l, -u);
        ydef.emplace_back(l, -u * u);
    }
    lp.add_constraint(tag + "_cvx", convex, Relation::eq, 1.0);
    lp.add_constraint(tag + "_x", link, Relation::eq, c - x_constant);
    lp.add_constraint(tag + "_yd", ydef, Relation::eq, 0.0);
    sq.expr = {{sq.y, 1.0}};
    for (auto& [j, a] : x) sq.expr.emplace_back(j, 2.0 * c * a);
    sq.constant = 2.0 * c * x_constant - c * c;
    int bits = 0;
    while ((1 << bits) < segments) ++bits;
    auto gray = [](int s) { return s ^ (s >> 1); };
    for (int l = 0; l < bits; ++l) {
        int z = p.add_binary(tag + "_z" + std::to_string(l), 0.0, priority);
        sq.binaries.push_back(z);
        LinExpr ones{{z, -1.0}}, zeros{{z, 1.0}};
        for (int i = 0; i <= segments; ++i) {
            bool all1 = true, all0 = true;
            for (int s : {i - 1, i}) {  // segments adjacent to breakpoint i, 0-based
                if (s < 0 || s >= segments) continue;
                const bool bit = (gray(s) >> l) & 1;
                all1 = all1 && bit;
                all0 = all0 && !bit;
            }
            if (all1) ones.emplace_back(sq.lambdas[i], 1.0);
            if (all0) zeros.emplace_back(sq.lambdas[i], 1.0);
        }
        lp.add_constraint(tag + "_g" + std::to_string(l) + "a", ones, Relation::le, 0.0);
        lp.add_constraint(tag + "_g" + std::to_string(l) + "b", zeros, Relation::le, 1.0);
    }
    // codes past the last segment must stay unused
    for (int code = 0; code < (1 << bits); ++code) {
        bool used = false;
        for (int s = 0; s < segments; ++s) used = used || gray(s) == code;
        if (used) continue;
        // sum over bits of (z_l if bit set else 1 - z_l) <= bits - 1
        LinExpr cut;
        double rhs = bits - 1;
        for (int l = 0; l < bits; ++l) {
            if ((code >> l) & 1) cut.emplace_back(sq.binaries[l], 1.0);
            else {
                cut.emplace_back(sq.binaries[l], -1.0);
                rhs -= 1.0;
            }
        }
        lp.add_constraint(tag + "_nc" + std::to_string(code), cut, Relation::le, rhs);
    }
    return sq;
}

PwlSquare encode_pwl_square(MILPProblem& p, int x, double lo, double hi, int segments, const std::string& tag,
                            int priority) {
    return encode_pwl_square(p, LinExpr{{x, 1.0}}, 0.0, lo, hi, segments, tag, priority);
}

PwlProduct encode_pwl_product(MILPProblem& p, int x, double xlo, double xhi, int y, double ylo, double yhi,
                              int segments, const std::string& tag, int priority) {
    if (!(xlo < xhi) || !(ylo < yhi)) throw std::invalid_argument("encode_pwl_product: empty range for " + tag);
    PwlProduct pr;
    const double a = std::sqrt((yhi - ylo) / (xhi - xlo));
    pr.scale = a;
    pr.plus = encode_pwl_square(p, LinExpr{{x, a}, {y, 1.0 / a}}, 0.0, a * xlo + ylo / a, a * xhi + yhi / a, segments,
                                tag + "p", priority);
    pr.minus = encode_pwl_square(p, LinExpr{{x, a}, {y, -1.0 / a}}, 0.0, a * xlo - yhi / a, a * xhi - ylo / a,
                                 segments, tag + "m", priority);
    for (auto& [j, v] : pr.plus.expr) pr.expr.emplace_back(j, 0.25 * v);
    for (auto& [j, v] : pr.minus.expr) pr.expr.emplace_back(j, -0.25 * v);
    pr.constant = 0.25 * (pr.plus.constant - pr.minus.constant);
    return pr;
}

// ---------------------------------------------------------------- model files

namespace {

bool plain_name(const std::string& s) {
    if (s.empty() || s.size() > 8) return false;
    for (char c : s)
        if (std::isspace(static_cast<unsigned char>(c)) || c == '$' || c == '*') return false;
    return true;
}

std::vector<std::string> mps_names(size_t n, char prefix, const std::function<const std::string&(size_t)>& get) {
    std::vector<std::string> out(n);
    std::set<std::string> seen;
    bool ok = true;
    for (size_t i = 0; i < n && ok; ++i) ok = plain_name(get(i)) && seen.insert(get(i)).second && get(i) != "OBJ" &&
                                              get(i) != "RHS" && get(i) != "BND" && get(i) != "MARKER";
    for (size_t i = 0; i < n; ++i) {
        if (ok) out[i] = get(i);
        else {
            std::string num = std::to_string(i);
            out[i] = std::string(1, prefix) + std::string(7 - std::min<size_t>(7, num.size()), '0') + num;
        }
    }
    return out;
}

std::string pad8(const std::string& s) { return s.size() >= 8 ? s : s + std::string(8 - s.size(), ' '); }

}  // namespace

void export_mps(const MILPProblem& p, std::ostream& out, const std::string& name) {
    const auto& lp = p.base;
    const size_t n = lp.variables.size(), m = lp.constraints.size();
    for (auto& v : lp.variables)
        if (!std::isfinite(v.lb) || !std::isfinite(v.ub))
            throw std::invalid_argument("export_mps: variable '" + v.name + "' has an infinite bound");
    auto cn = mps_names(n, 'C', [&](size_t i) -> const std::string& { return lp.variables[i].name; });
    auto rn = mps_names(m, 'R', [&](size_t i) -> const std::string& { return lp.constraints[i].name; });
    std::vector<char> is_int(n, 0);
    for (int j : p.integer_vars) is_int.at(j) = 1;

    // column-wise view
    std::vector<std::vector<std::pair<int, double>>> cols(n);
    for (size_t i = 0; i < m; ++i) {
        std::map<int, double> merged;
        for (auto& [j, a] : lp.constraints[i].terms) merged[j] += a;
        for (auto& [j, a] : merged)
            if (a != 0.0) cols[j].emplace_back(static_cast<int>(i), a);
    }

    out << "NAME          " << name << '\n';
    out << "OBJSENSE\n    " << (lp.sense == Sense::maximize ? "MAX" : "MIN") << '\n';
    out << "ROWS\n N  OBJ\n";
    for (size_t i = 0; i < m; ++i) {
        const char* t = lp.constraints[i].rel == Relation::le ? "L" : lp.constraints[i].rel == Relation::ge ? "G" : "E";
        out << ' ' << t << "  " << rn[i] << '\n';
    }
    out << "COLUMNS\n";
    bool in_int = false;
    int marker = 0;
    auto entry = [&](const std::string& col, const std::string& row, double v) {
        out << "    " << pad8(col) << "  " << pad8(row) << "  " << fmt(v) << '\n';
    };
    for (size_t j = 0; j < n; ++j) {
        if (is_int[j] && !in_int) {
            out << "    MARKER" << std::string(4, ' ') << "  'MARKER'                 'INTORG'\n";
            in_int = true;
        } else if (!is_int[j] && in_int) {
            out << "    MARKER" << std::string(4, ' ') << "  'MARKER'                 'INTEND'\n";
            in_int = false;
            ++marker;
        }
        if (lp.objective[j] != 0.0 || cols[j].empty()) entry(cn[j], "OBJ", lp.objective[j]);
        for (auto& [i, a] : cols[j]) entry(cn[j], rn[i], a);
    }
    if (in_int) out << "    MARKER" << std::string(4, ' ') << "  'MARKER'                 'INTEND'\n";
    out << "RHS\n";
    if (lp.objective_constant != 0.0) entry("RHS", "OBJ", -lp.objective_constant);
    for (size_t i = 0; i < m; ++i)
        if (lp.constraints[i].rhs != 0.0) entry("RHS", rn[i], lp.constraints[i].rhs);
    out << "BOUNDS\n";
    for (size_t j = 0; j < n; ++j) {
        const auto& v = lp.variables[j];
        auto bound = [&](const char* t, double val) {
            out << ' ' << t << ' ' << pad8("BND") << "  " << pad8(cn[j]) << "  " << fmt(val) << '\n';
        };
        if (is_int[j] && v.lb == 0.0 && v.ub == 1.0) {
            bound("BV", 1.0);
        } else if (v.lb == v.ub) {
            bound("FX", v.lb);
        } else {
            if (v.lb != 0.0) bound("LO", v.lb);
            bound("UP", v.ub);
        }
    }
    out << "ENDATA\n";
    if (!out) throw std::runtime_error("export_mps: write failed");
}

MILPProblem import_mps(std::istream& in) {
    MILPProblem p;
    auto& lp = p.base;
    enum class Sec { none, objsense, rows, columns, rhs, bounds, done } sec = Sec::none;
    std::string obj_row;
    std::map<std::string, int> row_index, col_index;
    std::set<std::string> free_rows;
    std::vector<char> bounded_lo, bounded_up;
    bool in_int = false;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw std::invalid_argument("model file line " + std::to_string(lineno) + ": " + msg);
    };
    auto num = [&](const std::string& s) { return parse_double(s, "model file line " + std::to_string(lineno)); };
    auto column = [&](const std::string& name) {
        auto it = col_index.find(name);
        if (it != col_index.end()) return it->second;
        int j = lp.add_variable(name, 0.0, std::numeric_limits<double>::infinity());
        col_index[name] = j;
        bounded_lo.push_back(0);
        bounded_up.push_back(0);
        if (in_int) p.integer_vars.push_back(j);
        return j;
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '*') continue;
        std::istringstream ss(line);
        std::vector<std::string> tok;
        for (std::string t; ss >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (!std::isspace(static_cast<unsigned char>(line[0]))) {
            const std::string& h = tok[0];
            if (h == "NAME") sec = Sec::none;
            else if (h == "OBJSENSE") {
                sec = Sec::objsense;
                if (tok.size() > 1) lp.sense = (tok[1] == "MAX" || tok[1] == "MAXIMIZE") ? Sense::maximize : Sense::minimize;
            } else if (h == "ROWS") sec = Sec::rows;
            else if (h == "COLUMNS") sec = Sec::columns;
            else if (h == "RHS") sec = Sec::rhs;
            else if (h == "BOUNDS") sec = Sec::bounds;
            else if (h == "RANGES") fail("RANGES section is not supported");
            else if (h == "ENDATA") { sec = Sec::done; break; }
            else fail("unknown section '" + h + "'");
            continue;
        }
        switch (sec) {
            case Sec::objsense:
                lp.sense = (tok[0] == "MAX" || tok[0] == "MAXIMIZE") ? Sense::maximize : Sense::minimize;
                break;
            case Sec::rows: {
                if (tok.size() != 2) fail("expected row type and name");
                const std::string& t = tok[0];
                if (t == "N") {
                    if (obj_row.empty()) obj_row = tok[1];
                    else free_rows.insert(tok[1]);
                } else {
                    Relation r = t == "L" ? Relation::le : t == "G" ? Relation::ge : t == "E" ? Relation::eq : Relation::le;
                    if (t != "L" && t != "G" && t != "E") fail("unknown row type '" + t + "'");
                    row_index[tok[1]] = lp.add_constraint(tok[1], {}, r, 0.0);
                }
                break;
            }
            case Sec::columns: {
                if (tok.size() >= 3 && tok[1] == "'MARKER'") {
                    if (tok[2] == "'INTORG'") in_int = true;
                    else if (tok[2] == "'INTEND'") in_int = false;
                    else fail("unknown marker");
                    break;
                }
                if (tok.size() != 3 && tok.size() != 5) fail("expected column, row, value [row, value]");
                int j = column(tok[0]);
                for (size_t k = 1; k + 1 < tok.size(); k += 2) {
                    double v = num(tok[k + 1]);
                    if (tok[k] == obj_row) lp.objective[j] += v;
                    else if (free_rows.count(tok[k])) continue;
                    else {
                        auto it = row_index.find(tok[k]);
                        if (it == row_index.end()) fail("unknown row '" + tok[k] + "'");
                        lp.constraints[it->second].terms.emplace_back(j, v);
                    }
                }
                break;
            }
            case Sec::rhs: {
                if (tok.size() != 3 && tok.size() != 5 && tok.size() != 2 && tok.size() != 4) fail("malformed RHS entry");
                size_t k = (tok.size() % 2 == 1) ? 1 : 0;  // set name is optional
                for (; k + 1 < tok.size(); k += 2) {
                    double v = num(tok[k + 1]);
                    if (tok[k] == obj_row) lp.objective_constant = -v;
                    else {
                        auto it = row_index.find(tok[k]);
                        if (it == row_index.end()) fail("unknown row '" + tok[k] + "'");
                        lp.constraints[it->second].rhs = v;
                    }
                }
                break;
            }
            case Sec::bounds: {
                if (tok.size() < 3) fail("malformed bound");
                const std::string& t = tok[0];
                auto it = col_index.find(tok[2]);
                if (it == col_index.end()) fail("bound on unknown column '" + tok[2] + "'");
                int j = it->second;
                auto& v = lp.variables[j];
                double val = tok.size() > 3 ? num(tok[3]) : 0.0;
                if (t == "UP") { v.ub = val; bounded_up[j] = 1; }
                else if (t == "LO") { v.lb = val; bounded_lo[j] = 1; }
                else if (t == "FX") { v.lb = v.ub = val; bounded_lo[j] = bounded_up[j] = 1; }
                else if (t == "MI") { v.lb = -std::numeric_limits<double>::infinity(); bounded_lo[j] = 1; }
                else if (t == "PL") { v.ub = std::numeric_limits<double>::infinity(); bounded_up[j] = 1; }
                else if (t == "BV") {
                    v.lb = 0.0;
                    v.ub = 1.0;
                    bounded_lo[j] = bounded_up[j] = 1;
                    if (std::find(p.integer_vars.begin(), p.integer_vars.end(), j) == p.integer_vars.end())
                        p.integer_vars.push_back(j);
                } else fail("unsupported bound type '" + t + "'");
                break;
            }
            default: fail("data outside a section");
        }
    }
    if (sec != Sec::done) throw std::invalid_argument("model file: missing ENDATA");
    std::sort(p.integer_vars.begin(), p.integer_vars.end());
    for (int j : p.integer_vars) {
        auto& v = lp.variables[j];
        if (!bounded_up[j]) v.ub = 1.0;
        if (v.lb < 0.0 || v.ub > 1.0) throw std::invalid_argument("model file: general integer '" + v.name + "' is not supported");
    }
    return p;
}

}  // namespace caes
