#include "caes/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

#include "caes/io.hpp"
#include "caes/reference.hpp"

namespace caes {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

CavernState default_initial(const ScheduleOptions& opt, const PlantConfig& cfg) {
    if (opt.initial.m_s > 0.0) return opt.initial;
    return state_from_pT(46e5, c_to_k(20.0), cfg);
}

double step_hours(const PriceSeries& pr) { return pr.dt / 3600.0; }

struct Iv {
    double lo = 0.0, hi = 0.0;
    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

struct Box {
    Iv m, T, p;
};

constexpr double ideal_gas_tolerance = 2e-3;  // relative, on p V = m R T

std::vector<double> grid(Iv r, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(n == 1 ? r.lo : r.lo + (r.hi - r.lo) * i / (n - 1));
    return g;
}

// Per-step state envelopes. The bilinear steps are multilinear in (T, p,
// flow, 1/m) apart from the flow and mass squares, so a 5-point grid per
// factor catches the extremes; a small widening each step covers PWL drift.
std::vector<Box> state_envelopes(const PlantConfig& cfg, const CoefficientSet& c, const CavernState& s0, int n_t) {
    const DerivedParams d = derive_params(cfg);
    const double dt = c.dt;
    const Iv fin{cfg.c_Ain * cfg.P_ch_min, cfg.c_Ain * cfg.P_ch_max};
    const Iv fout{cfg.c_Aout * cfg.P_dch_min, cfg.c_Aout * cfg.P_dch_max};
    const double widen_T = 0.2, widen_p = 0.03e5;
    std::vector<Box> out;
    Box b{{s0.m_s, s0.m_s}, {s0.T_s, s0.T_s}, {s0.p_s, s0.p_s}};
    out.push_back(b);
    for (int t = 1; t <= n_t; ++t) {
        Box n;
        n.m = {std::max(d.m_s_min, b.m.lo - fout.hi * dt), std::min(d.m_s_max, b.m.hi + fin.hi * dt)};
        if (n.m.lo > n.m.hi)
            throw std::domain_error("infeasible by bounds: stored mass leaves [" + fmt(d.m_s_min) + ", " +
                                    fmt(d.m_s_max) + "] kg at step " + std::to_string(t));
        n.T = {inf, -inf};
        n.p = {inf, -inf};
        const int g = (b.m.hi > b.m.lo || b.T.hi > b.T.lo) ? 5 : 1;
        for (double m : grid(b.m, g))
            for (double T : grid(b.T, g))
                for (double p : grid(b.p, g)) {
                    const CavernState s{T, p, m};
                    auto take = [&](const CavernState& x) {
                        n.T.include(x.T_s);
                        n.p.include(x.p_s);
                    };
                    take(step_idle_bilinear(s, c));
                    for (double f : grid(fin, 5)) take(step_charge_bilinear(s, f, c));
                    for (double f : grid(fout, 5))
                        if (m - f * dt > 0.0) take(step_discharge_bilinear(s, f, c));
                }
        n.T = {n.T.lo - widen_T, n.T.hi + widen_T};
        n.p = {n.p.lo - widen_p, n.p.hi + widen_p};
        if (n.p.hi < cfg.p_min || n.p.lo > cfg.p_max)
            throw std::domain_error("infeasible by bounds: pressure cannot reach [p_min, p_max] at step " +
                                    std::to_string(t));
        n.p = {std::max(n.p.lo, cfg.p_min), std::min(n.p.hi, cfg.p_max)};
        // the pressure bounds and the ideal gas law also bound the temperature
        const double slack = 1.0 + ideal_gas_tolerance;
        n.T.lo = std::max({n.T.lo, d.T_s_min, n.p.lo * cfg.V_s / (n.m.hi * cfg.R) / slack});
        n.T.hi = std::min({n.T.hi, d.T_s_max, n.p.hi * cfg.V_s / (n.m.lo * cfg.R) * slack});
        if (n.T.lo > n.T.hi)
            throw std::domain_error("infeasible by bounds: temperature leaves the envelope at step " + std::to_string(t));
        out.push_back(n);
        b = n;
    }
    return out;
}

// a * b * k still to be expanded once the segment count of the product is known
struct PendingProduct {
    int a = -1, b = -1;
    double k = 0.0;
};

struct Affine {
    LinExpr terms;
    double c = 0.0;
    double err = 0.0;  // PWL error bound of the product terms
    std::vector<PendingProduct> pending;
};

// A factor is either a model variable or a known constant, in scaled units.
struct Factor {
    int var = -1;
    double value = 0.0;
    double lo = 0.0, hi = 0.0;
    double scale = 1.0;  // SI per scaled unit
};

Factor constant(double si, double scale) { return {-1, si / scale, si / scale, si / scale, scale}; }

// Collects the state equations of a step and encodes their products with PWL squares.
class Model2Builder {
public:
    Model2Builder(MILPProblem& p, ScheduleModelMap& map, int max_segments)
        : p_(p), map_(map), max_segments_(max_segments) {}

    // e += coef * a, coefficient in SI, equation divided by eq_scale
    void add(Affine& e, double coef, double eq_scale, const Factor& a) {
        const double k = coef * a.scale / eq_scale;
        if (a.var < 0) e.c += k * a.value;
        else e.terms.emplace_back(a.var, k);
    }

    // e += coef * a * b
    void add(Affine& e, double coef, double eq_scale, const Factor& a, const Factor& b) {
        const double k = coef * a.scale * b.scale / eq_scale;
        if (a.var < 0 && b.var < 0) {
            e.c += k * a.value * b.value;
        } else if (a.var < 0 || b.var < 0) {
            const Factor& v = a.var < 0 ? b : a;
            const Factor& f = a.var < 0 ? a : b;
            e.terms.emplace_back(v.var, k * f.value);
        } else {
            e.pending.push_back({a.var, b.var, k});
        }
    }

    void add_const(Affine& e, double si, double eq_scale) { e.c += si / eq_scale; }

    // Encodes the pending products of one step. budget[i] bounds the total
    // PWL error of eqs[i] in its own units. Starting from one segment each, the
    // worst contributor of an equation over budget is doubled until all fit
    // or every contributor is at the cap.
    void finalize(const std::vector<Affine*>& eqs, const std::vector<double>& budget, int step) {
        using Key = std::pair<int, int>;
        std::map<Key, int> seg;
        std::map<Key, double> unit_err;  // error at one segment
        for (Affine* e : eqs)
            for (auto& q : e->pending) {
                const Key key = std::minmax(q.a, q.b);
                if (cache_.count(key) || seg.count(key)) continue;
                const auto& va = p_.base.variables[q.a];
                const auto& vb = p_.base.variables[q.b];
                const double ra = va.ub - va.lb, rb = vb.ub - vb.lb;
                seg[key] = 1;
                unit_err[key] = q.a == q.b ? ra * ra / 4.0 : ra * rb / 2.0;
            }
        auto err_of = [&](const Key& key) {
            auto it = cache_.find(key);
            if (it != cache_.end()) return map_.products[it->second].max_error;
            const double k = seg.at(key);
            return unit_err.at(key) / (k * k);
        };
        for (bool changed = true; changed;) {
            changed = false;
            for (size_t i = 0; i < eqs.size(); ++i) {
                double total = 0.0, worst = 0.0;
                const Key* pick = nullptr;
                for (auto& q : eqs[i]->pending) {
                    const Key key = std::minmax(q.a, q.b);
                    const double c = std::abs(q.k) * err_of(key);
                    total += c;
                    if (seg.count(key) && seg[key] < max_segments_ && c > worst) {
                        worst = c;
                        pick = &seg.find(key)->first;
                    }
                }
                if (total > budget[i] && pick) {
                    seg[*pick] = std::min(2 * seg[*pick], max_segments_);
                    changed = true;
                }
            }
        }
        for (auto& [key, k] : seg) product(key.first, key.second, k, step);
        for (Affine* e : eqs) {
            for (auto& q : e->pending) {
                const auto& pr = map_.products[cache_.at(std::minmax(q.a, q.b))];
                for (auto& [j, w] : pr.expr) e->terms.emplace_back(j, q.k * w);
                e->c += q.k * pr.constant;
                e->err += std::abs(q.k) * pr.max_error;
            }
            e->pending.clear();
        }
    }

private:
    void product(int a, int b, int segments, int step) {
        const auto key = std::minmax(a, b);
        if (cache_.count(key)) return;
        const auto& va = p_.base.variables[a];
        const auto& vb = p_.base.variables[b];
        ScheduleModelMap::Product pr;
        pr.step = step;
        pr.a = a;
        pr.b = b;
        const int prio = 1;
        const std::string tag = "q" + std::to_string(map_.squares.size());
        if (a == b) {
            pr.label = va.name + "^2";
            PwlSquare sq = encode_pwl_square(p_, a, va.lb, va.ub, segments, tag, prio);
            pr.expr = sq.expr;
            pr.constant = sq.constant;
            pr.max_error = sq.max_error();
            map_.squares.push_back(sq);
        } else {
            pr.label = va.name + "*" + vb.name;
            PwlProduct pp = encode_pwl_product(p_, a, va.lb, va.ub, b, vb.lb, vb.ub, segments,
                                               tag, prio);
            pr.expr = pp.expr;
            pr.constant = pp.constant;
            pr.max_error = pp.max_error();
            map_.squares.push_back(pp.plus);
            map_.squares.push_back(pp.minus);
        }
        map_.products.push_back(pr);
        cache_[key] = static_cast<int>(map_.products.size()) - 1;
    }

    MILPProblem& p_;
    ScheduleModelMap& map_;
    int max_segments_;
    std::map<std::pair<int, int>, int> cache_;
};

double affine_min(const LinearProgram& lp, const Affine& e) {
    double s = e.c;
    for (auto& [j, a] : e.terms) s += a >= 0 ? a * lp.variables[j].lb : a * lp.variables[j].ub;
    return s;
}

double affine_max(const LinearProgram& lp, const Affine& e) {
    double s = e.c;
    for (auto& [j, a] : e.terms) s += a >= 0 ? a * lp.variables[j].ub : a * lp.variables[j].lb;
    return s;
}

// e == 0 when sum(gates) == 1 (active) or when sum(gates) == 0 (inverted).
// `reach` bounds |e| at integer points where the equation is switched off;
// the bound from the variable boxes is used when it is tighter.
void gate(LinearProgram& lp, const std::string& name, const Affine& e, const std::vector<int>& gates, bool inverted,
          double reach) {
    const double up = std::min(std::max(0.0, affine_max(lp, e)), reach) * 1.001 + 1e-6;
    const double dn = std::min(std::max(0.0, -affine_min(lp, e)), reach) * 1.001 + 1e-6;
    // active: e <= up * (1 - g), e >= -dn * (1 - g); inverted: e <= up * g, e >= -dn * g
    LinExpr le = e.terms, ge = e.terms;
    for (int g : gates) {
        le.emplace_back(g, inverted ? -up : up);
        ge.emplace_back(g, inverted ? dn : -dn);
    }
    lp.add_constraint(name + "u", le, Relation::le, (inverted ? 0.0 : up) - e.c);
    lp.add_constraint(name + "d", ge, Relation::ge, (inverted ? 0.0 : -dn) - e.c);
}

// Largest |f| over a 3-point grid of the previous state box and the next
// value range. The residuals are multilinear except for the mass square, so
// the grid holds the extremes up to a small curvature term.
double reach_of(const Box& prev, Iv next, const std::function<double(double, double, double, double)>& f) {
    double worst = 0.0;
    for (double m : grid(prev.m, 3))
        for (double T : grid(prev.T, 3))
            for (double p : grid(prev.p, 3))
                for (double x : grid(next, 3)) worst = std::max(worst, std::abs(f(m, T, p, x)));
    return worst;
}

// p V = m R T within a relative tolerance, with m*T relaxed by its McCormick
// envelope. The bilinear steps keep this relation closely, so the rows cut
// off relaxed states where a fractional mode decouples pressure from mass.
void add_ideal_gas_rows(LinearProgram& lp, const PlantConfig& cfg, int t, int m, int T, int p) {
    const std::string s = std::to_string(t);
    const auto& vm = lp.variables[m];
    const auto& vT = lp.variables[T];
    const int w = lp.add_variable("w" + s, vm.lb * vT.lb, vm.ub * vT.ub);
    lp.add_constraint("w1" + s, {{w, 1.0}, {T, -vm.lb}, {m, -vT.lb}}, Relation::ge, -vm.lb * vT.lb);
    lp.add_constraint("w2" + s, {{w, 1.0}, {T, -vm.ub}, {m, -vT.ub}}, Relation::ge, -vm.ub * vT.ub);
    lp.add_constraint("w3" + s, {{w, 1.0}, {T, -vm.ub}, {m, -vT.lb}}, Relation::le, -vm.ub * vT.lb);
    lp.add_constraint("w4" + s, {{w, 1.0}, {T, -vm.lb}, {m, -vT.ub}}, Relation::le, -vm.lb * vT.ub);
    // p [bar] * 1e5 * V / R = w * 1e8
    const double k = pressure_unit * cfg.V_s / (cfg.R * mass_unit * temperature_unit);
    lp.add_constraint("g1" + s, {{p, k}, {w, -(1.0 + ideal_gas_tolerance)}}, Relation::le, 0.0);
    lp.add_constraint("g2" + s, {{p, k}, {w, -(1.0 - ideal_gas_tolerance)}}, Relation::ge, 0.0);
}

void add_market_block(MILPProblem& p, ScheduleModelMap& map, const PlantConfig& cfg, const PriceSeries& prices, int t) {
    auto& lp = p.base;
    const double h = step_hours(prices);
    const double tau = prices.tau[t - 1];
    const std::string s = std::to_string(t);
    const int a = p.add_binary("a" + s, 0.0, 2);
    const int b = p.add_binary("b" + s, 0.0, 2);
    const double pcmax = cfg.P_ch_max / power_unit, pcmin = cfg.P_ch_min / power_unit;
    const double pdmax = cfg.P_dch_max / power_unit, pdmin = cfg.P_dch_min / power_unit;
    const int pc = lp.add_variable("Pc" + s, 0.0, pcmax, -(tau + cfg.C_ch) * h);
    const int pd = lp.add_variable("Pd" + s, 0.0, pdmax, (tau - cfg.C_dch) * h);
    lp.add_constraint("ab" + s, {{a, 1.0}, {b, 1.0}}, Relation::le, 1.0);
    lp.add_constraint("pcu" + s, {{pc, 1.0}, {a, -pcmax}}, Relation::le, 0.0);
    lp.add_constraint("pcl" + s, {{pc, 1.0}, {a, -pcmin}}, Relation::ge, 0.0);
    lp.add_constraint("pdu" + s, {{pd, 1.0}, {b, -pdmax}}, Relation::le, 0.0);
    lp.add_constraint("pdl" + s, {{pd, 1.0}, {b, -pdmin}}, Relation::ge, 0.0);
    map.alpha.push_back(a);
    map.beta.push_back(b);
    map.P_ch.push_back(pc);
    map.P_dch.push_back(pd);
}

// m_t = m_{t-1} + dt (c_Ain P_ch - c_Aout P_dch)
void add_mass_balance(LinearProgram& lp, const ScheduleModelMap& map, const PlantConfig& cfg, double dt, int t,
                      const Factor& m_prev, int m_now) {
    const double kin = dt * cfg.c_Ain * power_unit / mass_unit;
    const double kout = dt * cfg.c_Aout * power_unit / mass_unit;
    LinExpr e{{m_now, 1.0}, {map.P_ch[t - 1], -kin}, {map.P_dch[t - 1], kout}};
    double rhs = 0.0;
    if (m_prev.var < 0) rhs = m_prev.value;
    else e.emplace_back(m_prev.var, -1.0);
    lp.add_constraint("mb" + std::to_string(t), e, Relation::eq, rhs);
}

MILPProblem build_model2(const PlantConfig& cfg, const PriceSeries& prices, const ScheduleOptions& opt,
                         ScheduleModelMap& map) {
    const int n = static_cast<int>(prices.tau.size());
    const CoefficientSet co = compute_coefficients(cfg, prices.dt);
    const CavernState s0 = default_initial(opt, cfg);
    const auto env = state_envelopes(cfg, co, s0, n);
    MILPProblem p;
    auto& lp = p.base;
    lp.sense = Sense::maximize;
    map.m.assign(n + 1, -1);
    map.T.assign(n + 1, -1);
    map.p.assign(n + 1, -1);
    Model2Builder bld(p, map, opt.segments);
    const double Sm = mass_unit, ST = temperature_unit, Sp = pressure_unit;
    Factor m_prev = constant(s0.m_s, Sm), T_prev = constant(s0.T_s, ST), p_prev = constant(s0.p_s, Sp);
    double p_err = 0.0;  // bar, accumulated
    for (int t = 1; t <= n; ++t) {
        const std::string s = std::to_string(t);
        add_market_block(p, map, cfg, prices, t);
        const int a = map.alpha.back(), b = map.beta.back();
        const Factor Pc{map.P_ch.back(), 0.0, lp.variables[map.P_ch.back()].lb, lp.variables[map.P_ch.back()].ub,
                        cfg.c_Ain * power_unit};
        const Factor Pd{map.P_dch.back(), 0.0, lp.variables[map.P_dch.back()].lb, lp.variables[map.P_dch.back()].ub,
                        cfg.c_Aout * power_unit};
        const Box& bx = env[t];
        const int mv = lp.add_variable("m" + s, bx.m.lo / Sm, bx.m.hi / Sm);
        const int Tv = lp.add_variable("T" + s, bx.T.lo / ST, bx.T.hi / ST);
        const int pv = lp.add_variable("p" + s, bx.p.lo / Sp, bx.p.hi / Sp);
        map.m[t] = mv;
        map.T[t] = Tv;
        map.p[t] = pv;
        add_mass_balance(lp, map, cfg, prices.dt, t, m_prev, mv);
        const Factor Tn{Tv, 0.0, bx.T.lo / ST, bx.T.hi / ST, ST};
        const Factor pn{pv, 0.0, bx.p.lo / Sp, bx.p.hi / Sp, Sp};
        const double eT = Sm * ST, eP = Sm * Sp;
        const double m_lo = env[t - 1].m.lo / Sm;

        const Box& pb = env[t - 1];
        // Inactive charge or discharge has zero flow, so its residual is bounded by
        // the flow-free terms; an inactive idle equation sees the full state boxes.
        const double slackT = 1.05, slackp = 1.05;

        // charge
        Affine ct, cp;
        bld.add(ct, 1.0, eT, m_prev, Tn);
        bld.add(ct, -1.0, eT, m_prev, T_prev);
        bld.add(ct, -co.c2, eT, T_prev, Pc);
        bld.add(ct, -co.c3, eT, m_prev, Pc);
        bld.add(ct, -co.c4, eT, Pc);
        bld.add(ct, -co.c5, eT, T_prev);
        bld.add(ct, -co.c6, eT, m_prev);
        bld.add_const(ct, -co.c7, eT);
        bld.add(cp, 1.0, eP, m_prev, pn);
        bld.add(cp, -1.0, eP, m_prev, p_prev);
        bld.add(cp, -co.c8, eP, p_prev, Pc);
        bld.add(cp, -co.c9, eP, m_prev, Pc);
        bld.add(cp, -co.c10, eP, Pc);
        bld.add(cp, -co.c11, eP, m_prev);
        bld.add(cp, -co.c12, eP, p_prev);
        bld.add_const(cp, -co.c13, eP);

        // discharge
        Affine dtm, dp;
        bld.add(dtm, 1.0, eT, m_prev, Tn);
        bld.add(dtm, -1.0, eT, m_prev, T_prev);
        bld.add(dtm, -co.c14, eT, T_prev, Pd);
        bld.add(dtm, -co.c15, eT, Pd);
        bld.add(dtm, -co.c16, eT, T_prev);
        bld.add_const(dtm, -co.c17, eT);
        bld.add(dp, 1.0, eP, m_prev, pn);
        bld.add(dp, -1.0, eP, m_prev, p_prev);
        bld.add(dp, -co.c18, eP, p_prev, Pd);
        bld.add(dp, -co.c19, eP, T_prev, m_prev);
        bld.add(dp, -co.c20, eP, T_prev, Pd);
        bld.add(dp, -co.c21, eP, Pd, Pd);
        bld.add(dp, -co.c22, eP, m_prev, Pd);
        bld.add(dp, -co.c23, eP, Pd);
        bld.add(dp, -co.c24, eP, m_prev);
        bld.add(dp, -co.c25, eP, p_prev);
        bld.add(dp, -co.c26, eP, T_prev);

        // idle
        Affine it, ip;
        bld.add(it, 1.0, ST, Tn);
        bld.add(it, -co.c27, ST, m_prev, T_prev);
        bld.add(it, -co.c28, ST, T_prev);
        bld.add(it, -co.c29, ST, m_prev);
        bld.add_const(it, -co.c30, ST);
        bld.add(ip, 1.0, Sp, pn);
        bld.add(ip, -co.c27, Sp, p_prev, m_prev);
        bld.add(ip, -co.c31, Sp, m_prev, m_prev);
        bld.add(ip, -co.c28, Sp, p_prev);
        bld.add(ip, -co.c32, Sp, m_prev);

        // budgets in equation units: T and p equations of charge and discharge carry a factor m
        const double bT = opt.pwl_budget_T / ST, bp = opt.pwl_budget_p;
        bld.finalize({&ct, &cp, &dtm, &dp, &it, &ip}, {bT * m_lo, bp * m_lo, bT * m_lo, bp * m_lo, bT, bp}, t);

        const double r_ct = reach_of(pb, bx.T, [&](double m, double T, double, double x) {
            return m * x - (m * T + co.c5 * T + co.c6 * m + co.c7);
        });
        const double r_cp = reach_of(pb, bx.p, [&](double m, double, double p, double x) {
            return m * x - (p * m + co.c11 * m + co.c12 * p + co.c13);
        });
        gate(lp, "ct" + s, ct, {a}, false, r_ct / eT * slackT + ct.err);
        gate(lp, "cp" + s, cp, {a}, false, r_cp / eP * slackp + cp.err);

        const double r_dt = reach_of(pb, bx.T, [&](double m, double T, double, double x) {
            return m * x - (m * T + co.c16 * T + co.c17);
        });
        const double r_dp = reach_of(pb, bx.p, [&](double m, double T, double p, double x) {
            return m * x - (p * m + co.c19 * T * m + co.c24 * m + co.c25 * p + co.c26 * T);
        });
        gate(lp, "dt" + s, dtm, {b}, false, r_dt / eT * slackT + dtm.err);
        gate(lp, "dp" + s, dp, {b}, false, r_dp / eP * slackp + dp.err);

        const double r_it = reach_of(pb, bx.T, [&](double m, double T, double, double x) {
            return x - (co.c27 * m * T + co.c28 * T + co.c29 * m + co.c30);
        });
        const double r_ip = reach_of(pb, bx.p, [&](double m, double, double p, double x) {
            return x - (co.c27 * p * m + co.c31 * m * m + co.c28 * p + co.c32 * m);
        });
        gate(lp, "it" + s, it, {a, b}, true, r_it / ST * slackT + it.err);
        gate(lp, "ip" + s, ip, {a, b}, true, r_ip / Sp * slackp + ip.err);
        p_err += std::max({cp.err / m_lo, dp.err / m_lo, ip.err});

        add_ideal_gas_rows(lp, cfg, t, mv, Tv, pv);

        m_prev = {mv, 0.0, bx.m.lo / Sm, bx.m.hi / Sm, Sm};
        T_prev = Tn;
        p_prev = pn;
    }
    if (opt.terminal_mass) lp.add_constraint("mterm", {{map.m[n], 1.0}}, Relation::ge, s0.m_s / Sm);
    map.p_error_bound = p_err * Sp;
    return p;
}

MILPProblem build_model4(const PlantConfig& cfg, const PriceSeries& prices, const ScheduleOptions& opt,
                         ScheduleModelMap& map) {
    const int n = static_cast<int>(prices.tau.size());
    const CavernState s0 = default_initial(opt, cfg);
    MILPProblem p;
    auto& lp = p.base;
    lp.sense = Sense::maximize;
    map.m.assign(n + 1, -1);
    // p = m R T0 / V, so the pressure bounds are mass bounds
    const double mlo = std::max(cfg.p_min * cfg.V_s / (cfg.R * s0.T_s), 0.0);
    const double mhi = cfg.p_max * cfg.V_s / (cfg.R * s0.T_s);
    Factor m_prev = constant(s0.m_s, mass_unit);
    for (int t = 1; t <= n; ++t) {
        add_market_block(p, map, cfg, prices, t);
        const int mv = lp.add_variable("m" + std::to_string(t), mlo / mass_unit, mhi / mass_unit);
        map.m[t] = mv;
        add_mass_balance(lp, map, cfg, prices.dt, t, m_prev, mv);
        m_prev = {mv, 0.0, mlo / mass_unit, mhi / mass_unit, mass_unit};
    }
    if (opt.terminal_mass) lp.add_constraint("mterm", {{map.m[n], 1.0}}, Relation::ge, s0.m_s / mass_unit);
    return p;
}

// A fixed power plan used to seed the model 2 search.
struct Plan {
    std::vector<int> alpha, beta;
    std::vector<double> P_ch, P_dch;  // W
};

// Simulates the plan with the bilinear steps. A power that would take the
// pressure within `margin` of a bound is cut back by bisection, and the step
// turns idle when even the minimum power fails.
std::vector<CavernState> repair_plan(Plan& plan, const PlantConfig& cfg, const CoefficientSet& co,
                                     const CavernState& s0, double margin) {
    const double lo = cfg.p_min + margin, hi = cfg.p_max - margin;
    auto inside = [&](const CavernState& x) { return x.p_s >= lo && x.p_s <= hi; };
    auto step = [&](const CavernState& x, bool charge, double P, CavernState& out) {
        try {
            out = charge ? step_charge_bilinear(x, cfg.c_Ain * P, co) : step_discharge_bilinear(x, cfg.c_Aout * P, co);
        } catch (const std::domain_error&) {
            return false;
        }
        return inside(out);
    };
    std::vector<CavernState> states{s0};
    for (size_t t = 0; t < plan.alpha.size(); ++t) {
        const CavernState& x = states.back();
        CavernState next;
        const bool charge = plan.alpha[t] != 0, discharge = plan.beta[t] != 0;
        if (charge || discharge) {
            double& P = charge ? plan.P_ch[t] : plan.P_dch[t];
            const double Pmin = charge ? cfg.P_ch_min : cfg.P_dch_min;
            if (!step(x, charge, P, next)) {
                if (!step(x, charge, Pmin, next)) {
                    P = 0.0;
                    (charge ? plan.alpha[t] : plan.beta[t]) = 0;
                } else {
                    double good = Pmin, bad = P;
                    for (int i = 0; i < 40; ++i) {
                        const double mid = 0.5 * (good + bad);
                        CavernState tmp;
                        (step(x, charge, mid, tmp) ? good : bad) = mid;
                    }
                    P = good;
                    step(x, charge, P, next);
                }
            }
        }
        if (!plan.alpha[t] && !plan.beta[t]) next = step_idle_bilinear(x, co);
        states.push_back(next);
    }
    return states;
}

// Integer start for model 2 from a plan and its simulated states.
std::vector<double> model2_start(const MILPProblem& p, const ScheduleModelMap& map, const Plan& plan,
                                 const std::vector<CavernState>& states) {
    std::vector<double> v(p.base.variables.size(), std::numeric_limits<double>::quiet_NaN());
    for (size_t t = 0; t < plan.alpha.size(); ++t) {
        v[map.alpha[t]] = plan.alpha[t];
        v[map.beta[t]] = plan.beta[t];
        v[map.P_ch[t]] = plan.P_ch[t] / power_unit;
        v[map.P_dch[t]] = plan.P_dch[t] / power_unit;
        v[map.m[t + 1]] = states[t + 1].m_s / mass_unit;
        v[map.T[t + 1]] = states[t + 1].T_s / temperature_unit;
        v[map.p[t + 1]] = states[t + 1].p_s / pressure_unit;
    }
    for (const auto& sq : map.squares) pwl_square_start(sq, v);
    return v;
}

// Local search on the powers of a plan. Each round solves a linear program
// with the modes fixed and every PWL square limited to the cells next to the
// one the simulated plan occupies, then keeps the returned powers if the
// simulated profit improves.
Plan improve_plan(Plan plan, const MILPProblem& p, const ScheduleModelMap& map, const PlantConfig& cfg,
                  const PriceSeries& prices, const CoefficientSet& co, double margin, int rounds) {
    repair_plan(plan, cfg, co, map.initial, margin);
    double best = schedule_profit(cfg, prices, plan.P_ch, plan.P_dch);
    for (int r = 0; r < rounds; ++r) {
        const auto states = repair_plan(plan, cfg, co, map.initial, margin);
        auto start = model2_start(p, map, plan, states);
        LinearProgram lp = p.base;
        for (size_t t = 0; t < plan.alpha.size(); ++t) {
            lp.variables[map.alpha[t]].lb = lp.variables[map.alpha[t]].ub = plan.alpha[t];
            lp.variables[map.beta[t]].lb = lp.variables[map.beta[t]].ub = plan.beta[t];
        }
        for (const auto& sq : map.squares) {
            const int n = static_cast<int>(sq.lambdas.size());
            int cell = 0;
            for (int i = 0; i < n; ++i)
                if (start[sq.lambdas[i]] > 0.0) {
                    cell = i;
                    break;
                }
            for (int i = 0; i < n; ++i)
                if (i < cell - 1 || i > cell + 2) lp.variables[sq.lambdas[i]].ub = 0.0;
        }
        const LPSolution sol = solve_lp(lp);
        if (sol.status != LPStatus::optimal) break;
        Plan q = plan;
        for (size_t t = 0; t < q.alpha.size(); ++t) {
            q.P_ch[t] = q.alpha[t] ? std::clamp(sol.values[map.P_ch[t]] * power_unit, cfg.P_ch_min, cfg.P_ch_max) : 0.0;
            q.P_dch[t] = q.beta[t] ? std::clamp(sol.values[map.P_dch[t]] * power_unit, cfg.P_dch_min, cfg.P_dch_max) : 0.0;
        }
        // shorter steps toward the returned powers when the full step does not pay
        bool moved = false;
        for (double f : {1.0, 0.5, 0.25}) {
            Plan c = plan;
            for (size_t t = 0; t < c.alpha.size(); ++t) {
                c.P_ch[t] += f * (q.P_ch[t] - plan.P_ch[t]);
                c.P_dch[t] += f * (q.P_dch[t] - plan.P_dch[t]);
            }
            repair_plan(c, cfg, co, map.initial, margin);
            const double v = schedule_profit(cfg, prices, c.P_ch, c.P_dch);
            if (v > best + 1e-6 * std::max(1.0, std::abs(best))) {
                best = v;
                plan = std::move(c);
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    return plan;
}

// Full power in the cheapest and dearest thirds of the steps.
Plan price_rule_plan(const PlantConfig& cfg, const PriceSeries& prices) {
    const size_t n = prices.tau.size();
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return prices.tau[a] < prices.tau[b]; });
    Plan plan{std::vector<int>(n, 0), std::vector<int>(n, 0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    for (size_t k = 0; k < n / 3; ++k) {
        plan.alpha[order[k]] = 1;
        plan.P_ch[order[k]] = cfg.P_ch_max;
        plan.beta[order[n - 1 - k]] = 1;
        plan.P_dch[order[n - 1 - k]] = cfg.P_dch_max;
    }
    return plan;
}

}  // namespace

void validate_prices(const PriceSeries& prices) {
    if (prices.tau.empty()) throw std::invalid_argument("price series is empty");
    if (!(prices.dt > 0.0)) throw std::invalid_argument("price series dt must be positive");
    for (size_t i = 0; i < prices.tau.size(); ++i)
        if (!std::isfinite(prices.tau[i])) throw std::invalid_argument("price " + std::to_string(i) + " is not finite");
}

PriceSeries two_peak_prices(int n_t, double dt, double base, double peak, double hours) {
    if (n_t < 1) throw std::invalid_argument("two_peak_prices: n_t must be at least 1");
    auto plateau = [](double h, double a, double b) {
        const double shoulder = 1.5;
        if (h >= a && h <= b) return 1.0;
        const double d = h < a ? a - h : h - b;
        return std::max(0.0, 1.0 - d / shoulder);
    };
    PriceSeries ps;
    ps.dt = dt;
    for (int i = 0; i < n_t; ++i) {
        const double h = (i + 0.5) * hours / n_t;
        const double w = std::max(plateau(h, 9.0, 12.0), plateau(h, 18.0, 21.0));
        ps.tau.push_back(base + (peak - base) * w);
    }
    return ps;
}

PriceSeries read_prices_csv(std::istream& in, double dt) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("price file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,price_per_MWh") throw std::invalid_argument("price file: expected header 't,price_per_MWh'");
    PriceSeries ps;
    ps.dt = dt;
    int lineno = 1;
    double first = 0.0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string ctx = "price file line " + std::to_string(lineno);
        auto f = split_csv(line);
        if (f.size() != 2) throw std::invalid_argument(ctx + ": expected 2 fields");
        const double t = parse_double(f[0], ctx);
        if (ps.tau.empty()) {
            if (t != 0.0 && t != 1.0) throw std::invalid_argument(ctx + ": first step must be 0 or 1");
            first = t;
        } else if (t != first + static_cast<double>(ps.tau.size())) {
            throw std::invalid_argument(ctx + ": step index must increase by one");
        }
        ps.tau.push_back(parse_double(f[1], ctx));
    }
    validate_prices(ps);
    return ps;
}

void write_prices_csv(std::ostream& out, const PriceSeries& prices) {
    out << "t,price_per_MWh\n";
    for (size_t i = 0; i < prices.tau.size(); ++i) out << i + 1 << ',' << fmt(prices.tau[i]) << '\n';
}

std::vector<StepMode> ScheduleSolution::modes() const {
    std::vector<StepMode> out;
    for (size_t t = 0; t < alpha.size(); ++t) {
        if (alpha[t]) out.push_back(StepMode::charge(mdot_in[t]));
        else if (beta[t]) out.push_back(StepMode::discharge(mdot_out[t]));
        else out.push_back(StepMode::idle());
    }
    return out;
}

Model1Description describe_model1(int n_t) {
    if (n_t < 1) throw std::invalid_argument("n_t must be at least 1");
    Model1Description d;
    d.n_t = n_t;
    static const char* cont[] = {"T_s", "p_s", "m_s", "T_ch", "p_ch", "T_dch", "p_dch", "T_idl", "p_idl", "mdot_in", "mdot_out"};
    for (int t = 1; t <= n_t; ++t) {
        for (const char* c : cont) d.variable_names.push_back(std::string(c) + "_" + std::to_string(t));
        d.variable_names.push_back("alpha_" + std::to_string(t));
        d.variable_names.push_back("beta_" + std::to_string(t));
    }
    d.continuous = 11 * n_t;
    d.binary = 2 * n_t;
    // per step: m*T_ch, m*p_ch, m*T_dch, m*p_dch, m*T, p*m, T*in, m*in, p*in, T*out, p*out, out*out, m*out, m*m
    d.bilinear_terms = 14 * n_t;
    return d;
}

MILPProblem build_model(const PlantConfig& cfg_in, const PriceSeries& prices, ScheduleModel variant,
                        const ScheduleOptions& opt, ScheduleModelMap* map) {
    validate_prices(prices);
    const PlantConfig cfg = resolved(cfg_in);
    if (opt.segments < 1) throw std::invalid_argument("segments must be at least 1");
    if (!(opt.pwl_budget_T > 0.0) || !(opt.pwl_budget_p > 0.0))
        throw std::invalid_argument("PWL error budgets must be positive");
    ScheduleModelMap local;
    ScheduleModelMap& mp = map ? *map : local;
    mp = ScheduleModelMap{};
    mp.variant = variant;
    mp.dt = prices.dt;
    mp.initial = default_initial(opt, cfg);
    switch (variant) {
        case ScheduleModel::model2_milp: return build_model2(cfg, prices, opt, mp);
        case ScheduleModel::model4_constT: return build_model4(cfg, prices, opt, mp);
        case ScheduleModel::model1_mibp:
            throw std::invalid_argument("model 1 is bilinear; use describe_model1 or the model 2 reformulation");
    }
    throw std::logic_error("unhandled schedule model");
}

double schedule_profit(const PlantConfig& cfg, const PriceSeries& prices, const std::vector<double>& P_ch,
                       const std::vector<double>& P_dch) {
    const double h = step_hours(prices);
    double s = 0.0;
    for (size_t t = 0; t < prices.tau.size(); ++t)
        s += ((prices.tau[t] - cfg.C_dch) * P_dch[t] - (prices.tau[t] + cfg.C_ch) * P_ch[t]) / power_unit * h;
    return s;
}

ScheduleSolution solve_schedule(const PlantConfig& cfg_in, const PriceSeries& prices, ScheduleModel variant,
                                const ScheduleOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    const PlantConfig cfg = resolved(cfg_in);
    ScheduleModelMap map;
    MILPProblem p = build_model(cfg, prices, variant, opt, &map);
    MILPOptions mo;
    mo.rel_gap = opt.rel_gap;
    mo.time_limit = opt.time_limit;
    mo.node_limit = opt.node_limit;
    if (variant == ScheduleModel::model2_milp) {
        // seeds: all idle, a price rule and the constant-temperature optimum, each
        // simulated and cut back to the pressure bounds
        const CoefficientSet co = compute_coefficients(cfg, prices.dt);
        const size_t n = prices.tau.size();
        std::vector<Plan> plans{Plan{std::vector<int>(n, 0), std::vector<int>(n, 0), std::vector<double>(n, 0.0),
                                     std::vector<double>(n, 0.0)},
                                price_rule_plan(cfg, prices)};
        ScheduleOptions o4 = opt;
        o4.time_limit = std::min(30.0, 0.05 * opt.time_limit);
        const ScheduleSolution s4 = solve_schedule(cfg, prices, ScheduleModel::model4_constT, o4);
        if (!s4.alpha.empty()) plans.push_back(Plan{s4.alpha, s4.beta, s4.P_ch, s4.P_dch});
        for (Plan& plan : plans) {
            plan = improve_plan(plan, p, map, cfg, prices, co, map.p_error_bound, 20);
            const auto states = repair_plan(plan, cfg, co, map.initial, map.p_error_bound);
            mo.starts.push_back(model2_start(p, map, plan, states));
        }
    }
    MILPSolution ms = solve_milp(p, mo);
    ScheduleSolution sol;
    sol.dt = prices.dt;
    sol.states.push_back(map.initial);
    sol.status = milp_status_name(ms.status);
    sol.gap = ms.gap;
    sol.nodes = ms.nodes;
    if (!ms.has_solution) {
        sol.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return sol;
    }
    const int n = static_cast<int>(prices.tau.size());
    const auto& x = ms.values;
    for (int t = 1; t <= n; ++t) {
        const int a = static_cast<int>(std::lround(x[map.alpha[t - 1]]));
        const int b = static_cast<int>(std::lround(x[map.beta[t - 1]]));
        double pc = a ? std::clamp(x[map.P_ch[t - 1]] * power_unit, cfg.P_ch_min, cfg.P_ch_max) : 0.0;
        double pd = b ? std::clamp(x[map.P_dch[t - 1]] * power_unit, cfg.P_dch_min, cfg.P_dch_max) : 0.0;
        sol.alpha.push_back(a);
        sol.beta.push_back(b);
        sol.P_ch.push_back(pc);
        sol.P_dch.push_back(pd);
        sol.mdot_in.push_back(cfg.c_Ain * pc);
        sol.mdot_out.push_back(cfg.c_Aout * pd);
        const CavernState& prev = sol.states.back();
        CavernState st;
        st.m_s = prev.m_s + prices.dt * (sol.mdot_in.back() - sol.mdot_out.back());
        if (variant == ScheduleModel::model2_milp) {
            st.T_s = x[map.T[t]] * temperature_unit;
            st.p_s = x[map.p[t]] * pressure_unit;
        } else {
            st.T_s = map.initial.T_s;
            st.p_s = st.m_s * cfg.R * st.T_s / cfg.V_s;
        }
        sol.states.push_back(st);
    }
    sol.objective = schedule_profit(cfg, prices, sol.P_ch, sol.P_dch);
    sol.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return sol;
}

// ---------------------------------------------------------------- enumeration

namespace {

ScheduleSolution enumerate(const PlantConfig& cfg, const PriceSeries& prices, int levels, const ScheduleOptions& opt,
                           TruthModel truth, long node_budget) {
    const auto start = std::chrono::steady_clock::now();
    if (levels < 1) throw std::invalid_argument("power_levels must be at least 1");
    const int n = static_cast<int>(prices.tau.size());
    const double h = step_hours(prices);
    const CoefficientSet co = compute_coefficients(cfg, prices.dt);
    const CavernState s0 = default_initial(opt, cfg);

    struct Choice {
        Mode mode;
        double P;
    };
    std::vector<Choice> choices{{Mode::idle, 0.0}};
    auto level = [&](double lo, double hi, int k) { return levels == 1 ? hi : lo + (hi - lo) * k / (levels - 1); };
    for (int k = 0; k < levels; ++k) choices.push_back({Mode::charge, level(cfg.P_ch_min, cfg.P_ch_max, k)});
    for (int k = 0; k < levels; ++k) choices.push_back({Mode::discharge, level(cfg.P_dch_min, cfg.P_dch_max, k)});

    auto gain = [&](int t, const Choice& c) {
        const double tau = prices.tau[t];
        if (c.mode == Mode::charge) return -(tau + cfg.C_ch) * c.P / power_unit * h;
        if (c.mode == Mode::discharge) return (tau - cfg.C_dch) * c.P / power_unit * h;
        return 0.0;
    };
    // optimistic profit of steps t..n-1
    std::vector<double> rest(n + 1, 0.0);
    for (int t = n - 1; t >= 0; --t) {
        double best = 0.0;
        for (auto& c : choices) best = std::max(best, gain(t, c));
        rest[t] = rest[t + 1] + best;
    }

    std::vector<int> cur(n), best_pat;
    std::vector<CavernState> path(n + 1);
    path[0] = s0;
    double best_obj = -inf;
    long nodes = 0;
    bool exhausted = false;

    std::function<void(int, double)> dfs = [&](int t, double acc) {
        if (exhausted) return;
        if (t == n) {
            if (opt.terminal_mass && path[n].m_s < s0.m_s) return;
            if (acc > best_obj) {
                best_obj = acc;
                best_pat = cur;
            }
            return;
        }
        for (size_t ci = 0; ci < choices.size(); ++ci) {
            const double g = gain(t, choices[ci]);
            if (best_obj > -inf && acc + g + rest[t + 1] <= best_obj) continue;
            if (++nodes > node_budget) {
                exhausted = true;
                return;
            }
            const Choice& c = choices[ci];
            StepMode sm = c.mode == Mode::charge      ? StepMode::charge(cfg.c_Ain * c.P)
                          : c.mode == Mode::discharge ? StepMode::discharge(cfg.c_Aout * c.P)
                                                      : StepMode::idle();
            CavernState nx;
            try {
                nx = truth == TruthModel::bilinear ? apply_step(path[t], sm, cfg, co, Model::bilinear)
                                                   : analytical_step(path[t], sm, cfg, prices.dt);
            } catch (const std::domain_error&) {
                continue;
            }
            if (!(nx.p_s >= cfg.p_min && nx.p_s <= cfg.p_max)) continue;
            path[t + 1] = nx;
            cur[t] = static_cast<int>(ci);
            dfs(t + 1, acc + g);
        }
    };
    dfs(0, 0.0);

    ScheduleSolution sol;
    sol.dt = prices.dt;
    sol.nodes = nodes;
    if (best_pat.empty()) {
        sol.status = exhausted ? "incumbent" : "infeasible";
        sol.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return sol;
    }
    sol.status = exhausted ? "incumbent" : "searched";
    sol.states.push_back(s0);
    for (int t = 0; t < n; ++t) {
        const Choice& c = choices[best_pat[t]];
        sol.alpha.push_back(c.mode == Mode::charge);
        sol.beta.push_back(c.mode == Mode::discharge);
        sol.P_ch.push_back(c.mode == Mode::charge ? c.P : 0.0);
        sol.P_dch.push_back(c.mode == Mode::discharge ? c.P : 0.0);
        sol.mdot_in.push_back(cfg.c_Ain * sol.P_ch.back());
        sol.mdot_out.push_back(cfg.c_Aout * sol.P_dch.back());
    }
    const auto modes = sol.modes();
    for (int t = 0; t < n; ++t)
        sol.states.push_back(truth == TruthModel::bilinear ? apply_step(sol.states.back(), modes[t], cfg, co, Model::bilinear)
                                                           : analytical_step(sol.states.back(), modes[t], cfg, prices.dt));
    sol.objective = schedule_profit(cfg, prices, sol.P_ch, sol.P_dch);
    sol.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return sol;
}

}  // namespace

ScheduleSolution oracle_enumerate(const PlantConfig& cfg_in, const PriceSeries& prices, int power_levels,
                                  const ScheduleOptions& opt) {
    validate_prices(prices);
    if (prices.tau.size() > 8) throw std::invalid_argument("oracle_enumerate: n_t must be at most 8");
    return enumerate(resolved(cfg_in), prices, power_levels, opt, TruthModel::bilinear,
                     std::numeric_limits<long>::max());
}

ScheduleSolution solve_model3_heuristic(const PlantConfig& cfg_in, const PriceSeries& prices, int power_levels,
                                        const ScheduleOptions& opt, long node_budget) {
    validate_prices(prices);
    if (prices.tau.size() > 12) throw std::invalid_argument("solve_model3_heuristic: n_t must be at most 12");
    return enumerate(resolved(cfg_in), prices, power_levels, opt, TruthModel::analytical, node_budget);
}

FeasibilityReport verify_schedule(const ScheduleSolution& sol, const PlantConfig& cfg_in, TruthModel truth) {
    const PlantConfig cfg = resolved(cfg_in);
    if (sol.states.empty()) throw std::invalid_argument("verify_schedule: schedule has no initial state");
    if (!(sol.dt > 0.0)) throw std::invalid_argument("verify_schedule: schedule dt must be positive");
    const CoefficientSet co = compute_coefficients(cfg, sol.dt);
    FeasibilityReport rep;
    rep.states.push_back(sol.states.front());
    const auto modes = sol.modes();
    for (size_t t = 0; t < modes.size(); ++t) {
        StepCheck c;
        c.step = static_cast<int>(t) + 1;
        CavernState nx;
        try {
            nx = truth == TruthModel::bilinear ? apply_step(rep.states.back(), modes[t], cfg, co, Model::bilinear)
                                               : analytical_step(rep.states.back(), modes[t], cfg, sol.dt);
        } catch (const std::domain_error&) {
            // the truth model cannot continue; count the rest as unbounded violations
            for (size_t u = t; u < modes.size(); ++u) {
                StepCheck bad;
                bad.step = static_cast<int>(u) + 1;
                bad.excursion = inf;
                rep.steps.push_back(bad);
                ++rep.violations;
            }
            rep.worst_excursion = inf;
            return rep;
        }
        c.T = nx.T_s;
        c.p = nx.p_s;
        c.m = nx.m_s;
        if (nx.p_s < cfg.p_min) c.excursion = cfg.p_min - nx.p_s;
        else if (nx.p_s > cfg.p_max) c.excursion = nx.p_s - cfg.p_max;
        if (c.excursion > 0.0) ++rep.violations;
        rep.worst_excursion = std::max(rep.worst_excursion, c.excursion);
        rep.steps.push_back(c);
        rep.states.push_back(nx);
    }
    return rep;
}

void write_schedule_csv(std::ostream& out, const ScheduleSolution& sol, const PriceSeries& prices,
                        const PlantConfig& cfg) {
    out << "t,alpha,beta,P_ch_MW,P_dch_MW,mdot_kg_s,T_K,p_bar,m_kg,profit_$\n";
    const double h = step_hours(prices);
    for (size_t t = 0; t < sol.states.size(); ++t) {
        const CavernState& s = sol.states[t];
        if (t == 0) {
            out << "0,0,0,0,0,0," << fmt(s.T_s) << ',' << fmt(pa_to_bar(s.p_s)) << ',' << fmt(s.m_s) << ",0\n";
            continue;
        }
        const size_t i = t - 1;
        const double pc = sol.P_ch[i] / power_unit, pd = sol.P_dch[i] / power_unit;
        const double profit = ((prices.tau[i] - cfg.C_dch) * pd - (prices.tau[i] + cfg.C_ch) * pc) * h;
        out << t << ',' << sol.alpha[i] << ',' << sol.beta[i] << ',' << fmt(pc) << ',' << fmt(pd) << ','
            << fmt(sol.mdot_in[i] - sol.mdot_out[i]) << ',' << fmt(s.T_s) << ',' << fmt(pa_to_bar(s.p_s)) << ','
            << fmt(s.m_s) << ',' << fmt(profit) << '\n';
    }
}

ScheduleSolution read_schedule_csv(std::istream& in, double dt, const PlantConfig& cfg_in) {
    const PlantConfig cfg = resolved(cfg_in);
    if (!(dt > 0.0)) throw std::invalid_argument("schedule dt must be positive");
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("schedule file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,alpha,beta,P_ch_MW,P_dch_MW,mdot_kg_s,T_K,p_bar,m_kg,profit_$")
        throw std::invalid_argument("schedule file: unexpected header");
    ScheduleSolution sol;
    sol.dt = dt;
    sol.status = "read";
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string ctx = "schedule file line " + std::to_string(lineno);
        const auto f = split_csv(line);
        if (f.size() != 10) throw std::invalid_argument(ctx + ": expected 10 fields");
        if (parse_double(f[0], ctx) != static_cast<double>(sol.states.size()))
            throw std::invalid_argument(ctx + ": step index must count from 0 by one");
        const CavernState st{parse_double(f[6], ctx), bar_to_pa(parse_double(f[7], ctx)), parse_double(f[8], ctx)};
        if (sol.states.empty()) {
            sol.states.push_back(st);
            continue;
        }
        const double a = parse_double(f[1], ctx), b = parse_double(f[2], ctx);
        if ((a != 0.0 && a != 1.0) || (b != 0.0 && b != 1.0) || a + b > 1.0)
            throw std::invalid_argument(ctx + ": alpha and beta must be 0/1 and not both 1");
        const double pc = parse_double(f[3], ctx) * power_unit, pd = parse_double(f[4], ctx) * power_unit;
        auto within = [](double v, double lo, double hi) { return v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12); };
        if (!(a ? within(pc, cfg.P_ch_min, cfg.P_ch_max) : pc == 0.0))
            throw std::invalid_argument(ctx + ": charging power outside its limits");
        if (!(b ? within(pd, cfg.P_dch_min, cfg.P_dch_max) : pd == 0.0))
            throw std::invalid_argument(ctx + ": discharging power outside its limits");
        sol.alpha.push_back(static_cast<int>(a));
        sol.beta.push_back(static_cast<int>(b));
        sol.P_ch.push_back(pc);
        sol.P_dch.push_back(pd);
        sol.mdot_in.push_back(cfg.c_Ain * pc);
        sol.mdot_out.push_back(cfg.c_Aout * pd);
        sol.objective += parse_double(f[9], ctx);
        sol.states.push_back(st);
    }
    if (sol.states.empty()) throw std::invalid_argument("schedule file has no initial state row");
    return sol;
}

void write_violation_csv(std::ostream& out, const FeasibilityReport& rep) {
    out << "step,p_bar,excursion_bar\n";
    for (const auto& c : rep.steps)
        out << c.step << ',' << fmt(pa_to_bar(c.p)) << ',' << fmt(pa_to_bar(c.excursion)) << '\n';
}

}  // namespace caes
