#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <string>

#include "caes/milp.hpp"

using namespace caes;

namespace {

double eval(const LinExpr& e, double constant, const std::vector<double>& v) {
    double s = constant;
    for (auto [i, c] : e) s += c * v[i];
    return s;
}

const double weights[6] = {12, 7, 11, 8, 9, 6};
const double values[6] = {24, 13, 23, 15, 16, 11};
const double capacity = 26;

MILPProblem knapsack() {
    MILPProblem p;
    p.base.sense = Sense::maximize;
    LinExpr w;
    for (int i = 0; i < 6; ++i) w.push_back({p.add_binary("x" + std::to_string(i), values[i]), weights[i]});
    p.base.add_constraint("cap", w, Relation::le, capacity);
    return p;
}

double knapsack_enumerated() {
    double best = 0;
    for (int mask = 0; mask < 64; ++mask) {
        double w = 0, v = 0;
        for (int i = 0; i < 6; ++i)
            if (mask >> i & 1) w += weights[i], v += values[i];
        if (w <= capacity && v > best) best = v;
    }
    return best;
}

// Binary-heavy problem that needs a real search: pick items under two capacities.
MILPProblem two_constraint_knapsack(int n) {
    MILPProblem p;
    p.base.sense = Sense::maximize;
    LinExpr a, b;
    for (int i = 0; i < n; ++i) {
        const double v = 10 + (i * 37 % 23), wa = 5 + (i * 13 % 11), wb = 3 + (i * 7 % 13);
        const int x = p.add_binary("x" + std::to_string(i), v);
        a.push_back({x, wa});
        b.push_back({x, wb});
    }
    p.base.add_constraint("a", a, Relation::le, 4.0 * n);
    p.base.add_constraint("b", b, Relation::le, 3.5 * n);
    return p;
}

}  // namespace

TEST_CASE("small linear programs") {
    LinearProgram a;
    a.sense = Sense::maximize;
    a.add_variable("x", 0, 3, 1.0);
    LPSolution s = solve_lp(a);
    CHECK(s.status == LPStatus::optimal);
    CHECK(s.values[0] == doctest::Approx(3.0));
    CHECK(s.objective == doctest::Approx(3.0));

    LinearProgram b;
    b.sense = Sense::maximize;
    const int x = b.add_variable("x", 0, 1, 1.0), y = b.add_variable("y", 0, 1, 1.0);
    b.add_constraint("c", {{x, 1.0}, {y, 1.0}}, Relation::le, 1.0);
    CHECK(solve_lp(b).objective == doctest::Approx(1.0));

    LinearProgram c;
    const int z = c.add_variable("x", 0, 10, 1.0);
    c.add_constraint("lo", {{z, 1.0}}, Relation::ge, 2.0);
    c.add_constraint("hi", {{z, 1.0}}, Relation::le, 1.0);
    CHECK(solve_lp(c).status == LPStatus::infeasible);
}

TEST_CASE("lp with equality rows and negative bounds") {
    // min x - 2y s.t. x + y = 1, x - y >= -3, x in [-5, 5], y in [-5, 5]
    LinearProgram lp;
    const int x = lp.add_variable("x", -5, 5, 1.0), y = lp.add_variable("y", -5, 5, -2.0);
    lp.add_constraint("e", {{x, 1.0}, {y, 1.0}}, Relation::eq, 1.0);
    lp.add_constraint("g", {{x, 1.0}, {y, -1.0}}, Relation::ge, -3.0);
    const LPSolution s = solve_lp(lp);
    REQUIRE(s.status == LPStatus::optimal);
    CHECK(s.values[x] == doctest::Approx(-1.0));
    CHECK(s.values[y] == doctest::Approx(2.0));
    CHECK(s.objective == doctest::Approx(-5.0));
    CHECK(lp.max_violation(s.values) <= 1e-9);
}

TEST_CASE("knapsack matches enumeration") {
    const MILPSolution s = solve_milp(knapsack(), 0.0, 10.0);
    CHECK(s.status == MILPStatus::optimal);
    CHECK(s.objective == doctest::Approx(knapsack_enumerated()).epsilon(1e-12));
    double w = 0;
    for (int i = 0; i < 6; ++i) {
        CHECK(std::abs(s.values[i] - std::round(s.values[i])) <= 1e-6);
        w += weights[i] * s.values[i];
    }
    CHECK(w <= capacity + 1e-6);
}

TEST_CASE("integral relaxation stops at the root") {
    MILPProblem p;
    p.base.sense = Sense::maximize;
    const int a = p.add_binary("a", 1.0), b = p.add_binary("b", 2.0);
    p.base.add_constraint("c", {{a, 1.0}, {b, 1.0}}, Relation::le, 1.0);
    const MILPSolution s = solve_milp(p, 1e-3, 10.0);
    CHECK(s.nodes == 1);
    CHECK(s.gap == 0.0);
    CHECK(s.objective == doctest::Approx(2.0));
}

TEST_CASE("infeasible root") {
    MILPProblem p;
    const int a = p.add_binary("a");
    p.base.add_constraint("c", {{a, 1.0}}, Relation::ge, 2.0);
    const MILPSolution s = solve_milp(p, 1e-3, 10.0);
    CHECK(s.status == MILPStatus::infeasible);
    CHECK_FALSE(s.has_solution);
}

TEST_CASE("gap contract and bound sanity") {
    const MILPProblem p = two_constraint_knapsack(30);
    for (double g : {0.0, 1e-3, 0.05}) {
        const MILPSolution s = solve_milp(p, g, 60.0);
        REQUIRE(s.has_solution);
        if (s.status == MILPStatus::gap_terminated) CHECK(s.gap <= g);
        if (s.status == MILPStatus::optimal) CHECK(s.gap <= std::max(g, 1e-9));
        // maximize: the bound is never below the incumbent
        CHECK(s.bound >= s.objective - 1e-9 * std::max(1.0, std::abs(s.objective)));
        CHECK(s.gap == doctest::Approx(std::abs(s.bound - s.objective) / std::max(1.0, std::abs(s.objective))));
        CHECK(p.base.max_violation(s.values) <= 1e-6);
        for (double prev = INFINITY; auto [t, gap] : s.gap_history) {
            CHECK(gap <= prev);
            prev = gap;
        }
    }
}

TEST_CASE("node-limited runs are repeatable") {
    const MILPProblem p = two_constraint_knapsack(40);
    MILPOptions o;
    o.rel_gap = 0.0;
    o.node_limit = 200;
    o.time_limit = 1e6;
    const MILPSolution a = solve_milp(p, o), b = solve_milp(p, o);
    CHECK(a.nodes == b.nodes);
    CHECK(a.objective == b.objective);
    CHECK(a.bound == b.bound);
    CHECK(a.values == b.values);
}

TEST_CASE("mip start is used as incumbent") {
    const MILPProblem p = knapsack();
    MILPOptions o;
    o.node_limit = 1;
    o.dive_every = 0;
    o.starts = {{1, 0, 1, 0, 0, 0}};
    const MILPSolution s = solve_milp(p, o);
    REQUIRE(s.has_solution);
    CHECK(s.objective >= 47.0 - 1e-9);
}

TEST_CASE("pwl square is exact at breakpoints and within w^2/4 inside") {
    const double lo = -1.5, hi = 2.5;
    for (int segments : {1, 3, 4, 8}) {
        MILPProblem p;
        const int x = p.base.add_variable("x", lo, hi);
        const PwlSquare sq = encode_pwl_square(p, x, lo, hi, segments, "s");
        const double w = (hi - lo) / segments;
        CHECK(sq.max_error() == doctest::Approx(w * w / 4));
        CHECK(static_cast<int>(sq.binaries.size()) == static_cast<int>(std::ceil(std::log2(segments))));
        for (int j = 0; j <= 4 * segments; ++j) {
            const double xv = lo + (hi - lo) * j / (4.0 * segments);
            for (Sense sense : {Sense::minimize, Sense::maximize}) {
                MILPProblem q = p;
                q.base.variables[x].lb = q.base.variables[x].ub = xv;
                q.base.sense = sense;
                q.base.objective.assign(q.base.num_variables(), 0.0);
                for (auto [i, c] : sq.expr) q.base.objective[i] += c;
                const MILPSolution s = solve_milp(q, 0.0, 10.0);
                REQUIRE(s.has_solution);
                const double y = eval(sq.expr, sq.constant, s.values);
                if (j % 4 == 0) CHECK(y == doctest::Approx(xv * xv).epsilon(1e-9).scale(1.0));
                CHECK(std::abs(y - xv * xv) <= w * w / 4 + 1e-9);
                CHECK(y == doctest::Approx(pwl_square_value(xv, lo, hi, segments)).epsilon(1e-9).scale(1.0));
            }
        }
    }
}

TEST_CASE("chord value on [0, 4] with four segments") {
    CHECK(pwl_square_value(1.5, 0, 4, 4) == doctest::Approx(2.5).epsilon(1e-15));
    MILPProblem p;
    const int x = p.base.add_variable("x", 1.5, 1.5);
    const PwlSquare sq = encode_pwl_square(p, x, 0, 4, 4, "s");
    const MILPSolution s = solve_milp(p, 0.0, 10.0);
    REQUIRE(s.has_solution);
    CHECK(eval(sq.expr, sq.constant, s.values) == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("pwl start values satisfy the encoding") {
    MILPProblem p;
    const int x = p.base.add_variable("x", -2, 6);
    const PwlSquare sq = encode_pwl_square(p, x, -2, 6, 8, "s");
    for (double xv : {-2.0, -0.3, 1.0, 2.7, 6.0}) {
        std::vector<double> v(p.base.num_variables(), 0.0);
        v[x] = xv;
        pwl_square_start(sq, v);
        CHECK(p.base.max_violation(v) <= 1e-9);
        CHECK(eval(sq.expr, sq.constant, v) == doctest::Approx(pwl_square_value(xv, -2, 6, 8)).epsilon(1e-12));
    }
}

TEST_CASE("pwl product stays within its error bound") {
    for (auto [xv, yv] : {std::pair{1.0, 2.0}, {3.0, 5.0}, {2.2, 3.3}, {1.7, 4.9}}) {
        MILPProblem p;
        const int x = p.base.add_variable("x", xv, xv), y = p.base.add_variable("y", yv, yv);
        const PwlProduct pr = encode_pwl_product(p, x, 1, 3, y, 2, 5, 4, "xy");
        const MILPSolution s = solve_milp(p, 0.0, 10.0);
        REQUIRE(s.has_solution);
        CHECK(std::abs(eval(pr.expr, pr.constant, s.values) - xv * yv) <= pr.max_error() + 1e-9);
    }
}

TEST_CASE("model file round trip") {
    MILPProblem p = two_constraint_knapsack(12);
    const int c = p.base.add_variable("a_long_continuous_name", -2, 7, 0.5);
    p.base.add_constraint("mix", {{c, 1.0}, {0, 2.0}}, Relation::eq, 3.0);
    p.base.add_constraint("lower", {{c, 1.0}, {1, -1.0}}, Relation::ge, -1.0);
    std::ostringstream out;
    export_mps(p, out, "RT");
    const std::string text = out.str();
    CHECK(text.find("ROWS") != std::string::npos);
    CHECK(text.find("COLUMNS") != std::string::npos);
    CHECK(text.find("RHS") != std::string::npos);
    CHECK(text.find("BOUNDS") != std::string::npos);
    // binary columns sit between the markers and carry a BV bound
    std::set<std::string> marked, bv;
    {
        std::istringstream lines(text);
        std::string line;
        bool inside = false;
        while (std::getline(lines, line)) {
            std::istringstream f(line);
            std::string a, b;
            f >> a >> b;
            if (line.find("'INTORG'") != std::string::npos) inside = true;
            else if (line.find("'INTEND'") != std::string::npos) inside = false;
            else if (inside) marked.insert(a);
            if (a == "BV") {
                std::string name;
                f >> name;
                bv.insert(name);
            }
        }
    }
    CHECK(marked.size() == p.integer_vars.size());
    CHECK(marked == bv);
    CHECK(text.find("a_long_continuous_name") == std::string::npos);

    std::istringstream in(text);
    const MILPProblem q = import_mps(in);
    CHECK(q.base.num_variables() == p.base.num_variables());
    CHECK(q.integer_vars.size() == p.integer_vars.size());
    const MILPSolution a = solve_milp(p, 0.0, 60.0), b = solve_milp(q, 0.0, 60.0);
    CHECK(std::abs(a.objective - b.objective) <= 1e-9 * std::abs(a.objective));

    // export again is byte identical
    std::ostringstream again;
    export_mps(q, again, "RT");
    CHECK(again.str() == text);
}

TEST_CASE("model file with no constraints") {
    MILPProblem p;
    p.base.sense = Sense::maximize;
    p.base.add_variable("x", 0, 4, 1.0);
    p.add_binary("b", 2.0);
    std::ostringstream out;
    export_mps(p, out);
    std::istringstream in(out.str());
    const MILPProblem q = import_mps(in);
    CHECK(q.base.constraints.empty());
    CHECK(solve_milp(q, 0.0, 10.0).objective == doctest::Approx(6.0));
}
