#include "caes/validation.hpp"

#include <cmath>
#include <stdexcept>

#include "caes/io.hpp"
#include "caes/reference.hpp"

namespace caes {

namespace {

ScenarioSpec make(const char* label, double p_bar, double T_C, Mode mode, double mdot) {
    ScenarioSpec s;
    s.label = label;
    s.initial_p = bar_to_pa(p_bar);
    s.initial_T = c_to_k(T_C);
    s.mode = {mode, mode == Mode::idle ? 0.0 : mdot};
    s.duration = (mode == Mode::discharge ? 4.0 : 16.0) * 3600.0;
    s.dt = 1.0;
    return s;
}

}  // namespace

std::vector<ScenarioSpec> table_scenarios() {
    const Mode C = Mode::charge, D = Mode::discharge, I = Mode::idle;
    return {
        make("C1", 46, 20, C, 49.12),   make("C2", 46, 20, C, 4.912),   make("C3", 46, 35, C, 49.12),
        make("C4", 46, 35, C, 4.912),   make("C5", 30, 20, C, 4.912),   make("C6", 5, 20, C, 4.912),
        make("D1", 66, 50, D, 189.67),  make("D2", 66, 50, D, 18.967),  make("D3", 66, 35, D, 189.67),
        make("D4", 66, 35, D, 18.967),  make("D5", 46, 50, D, 18.967),  make("D6", 30, 50, D, 18.967),
        make("D7", 5, 50, D, 18.967),   make("I1", 46, 20, I, 0),       make("I2", 5, 20, I, 0),
        make("I3", 66, 50, I, 0),       make("I4", 5, 50, I, 0),
    };
}

ScenarioSpec find_scenario(const std::string& label) {
    for (auto& s : table_scenarios())
        if (s.label == label) return s;
    throw std::invalid_argument("unknown scenario '" + label + "'");
}

ScenarioSpec charge_reference_scenario() { return make("charge", 46, 20, Mode::charge, 49.12); }
ScenarioSpec discharge_reference_scenario() { return make("discharge", 66, 40, Mode::discharge, 189.67); }
ScenarioSpec idle_reference_scenario() { return make("idle", 60, 45, Mode::idle, 0); }

void validate_scenario(const ScenarioSpec& spec) {
    if (!(spec.dt > 0.0) || !(spec.duration > 0.0))
        throw std::invalid_argument("scenario " + spec.label + ": duration and dt must be positive");
    double n = spec.duration / spec.dt;
    if (std::abs(n - std::round(n)) > 1e-9 * n)
        throw std::invalid_argument("scenario " + spec.label + ": duration is not a multiple of dt");
}

std::vector<StepMode> scenario_modes(const ScenarioSpec& spec) {
    validate_scenario(spec);
    auto n = static_cast<size_t>(std::llround(spec.duration / spec.dt));
    return std::vector<StepMode>(n, spec.mode);
}

ComparisonReport compare_states(const std::vector<CavernState>& test, const std::vector<CavernState>& ref) {
    if (test.size() != ref.size()) throw std::invalid_argument("compare_states: series lengths differ");
    ComparisonReport r;
    r.n_points = test.size();
    if (test.empty()) return r;
    for (size_t i = 0; i < test.size(); ++i) {
        double dp = std::abs(test[i].p_s - ref[i].p_s);
        double dT = std::abs(test[i].T_s - ref[i].T_s);
        r.mae_p += dp;
        r.mae_T += dT;
        r.mape_p += dp / std::abs(ref[i].p_s);
        r.mape_T += dT / std::abs(ref[i].T_s);
    }
    const double n = static_cast<double>(test.size());
    r.mae_p /= n;
    r.mae_T /= n;
    r.mape_p /= n;
    r.mape_T /= n;
    return r;
}

ComparisonReport run_scenario(const ScenarioSpec& spec, const PlantConfig& cfg) {
    try {
        auto modes = scenario_modes(spec);
        auto co = compute_coefficients(cfg, spec.dt);
        auto s0 = state_from_pT(spec.initial_p, spec.initial_T, cfg);
        auto bil = simulate(s0, modes, cfg, co, Model::bilinear, spec.dt);
        auto ana = simulate(s0, modes, cfg, co, Model::analytical, spec.dt);
        return compare_states(bil.states, ana.states);
    } catch (const std::domain_error& e) {
        throw std::domain_error("scenario " + spec.label + ": " + e.what());
    }
}

double max_ideal_gas_residual(const ScenarioSpec& spec, const PlantConfig& cfg) {
    auto modes = scenario_modes(spec);
    auto co = compute_coefficients(cfg, spec.dt);
    auto s0 = state_from_pT(spec.initial_p, spec.initial_T, cfg);
    auto tr = simulate(s0, modes, cfg, co, Model::bilinear, spec.dt);
    double worst = ideal_gas_residual(s0, cfg);
    for (auto& s : tr.states) worst = std::max(worst, ideal_gas_residual(s, cfg));
    return worst;
}

std::vector<double> default_intervals() { return {1.0, 60.0, 300.0, 600.0, 1200.0, 3600.0}; }

std::vector<IntervalRow> interval_study(Mode process, const std::vector<double>& intervals, const PlantConfig& cfg) {
    ScenarioSpec base = process == Mode::charge      ? charge_reference_scenario()
                        : process == Mode::discharge ? discharge_reference_scenario()
                                                     : idle_reference_scenario();
    std::vector<IntervalRow> rows;
    for (double dt : intervals) {
        ScenarioSpec spec = base;
        spec.dt = dt;
        auto modes = scenario_modes(spec);
        auto co = compute_coefficients(cfg, dt);
        auto s0 = state_from_pT(spec.initial_p, spec.initial_T, cfg);
        auto bil = simulate(s0, modes, cfg, co, Model::bilinear, dt).states.back();
        auto ana = simulate(s0, modes, cfg, co, Model::analytical, dt).states.back();
        IntervalRow r;
        r.interval = dt;
        r.T_error = bil.T_s - ana.T_s;
        r.p_error = bil.p_s - ana.p_s;
        r.T_rel = r.T_error / ana.T_s;
        r.p_rel = r.p_error / ana.p_s;
        rows.push_back(r);
    }
    return rows;
}

bool EfficiencyReport::closure_ok() const { return std::abs(closure) <= 0.02 * U_in; }

EfficiencyReport efficiency_audit(const Trajectory& tr, const PlantConfig& cfg) {
    EfficiencyReport r;
    CavernState prev = tr.initial;
    for (size_t i = 0; i < tr.states.size(); ++i) {
        const auto& mode = tr.modes[i];
        const auto& next = tr.states[i];
        const double T_mid = 0.5 * (prev.T_s + next.T_s);
        const double md = mode.mode == Mode::idle ? 0.0 : mode.mdot;
        if (mode.mode == Mode::charge) r.U_in += md * tr.dt * cfg.c_v * cfg.T_in;
        if (mode.mode == Mode::discharge) r.U_out += md * tr.dt * cfg.c_v * T_mid;
        r.Q_wall += h_eff(cfg, md) * cfg.V_s * (cfg.T_RW - T_mid) * tr.dt;
        prev = next;
    }
    const CavernState& last = tr.states.empty() ? tr.initial : tr.states.back();
    r.delta_U_cavern = cfg.c_v * (last.m_s * last.T_s - tr.initial.m_s * tr.initial.T_s);
    r.closure = r.delta_U_cavern - (r.U_in - r.U_out + r.Q_wall);
    if (r.U_in == 0.0) throw std::domain_error("efficiency undefined: no air was charged (U_in = 0)");
    r.efficiency = r.U_out / r.U_in;
    return r;
}

std::vector<StepMode> balanced_day_cycle(const PlantConfig& cfg_in, double charge_hours, double discharge_hours,
                                         double dt) {
    const PlantConfig cfg = resolved(cfg_in);
    if (!(dt > 0.0)) throw std::invalid_argument("day cycle: dt must be positive");
    const long nc = std::lround(charge_hours * 3600.0 / dt), nd = std::lround(discharge_hours * 3600.0 / dt);
    const long nday = std::lround(86400.0 / dt);
    if (nc < 1 || nd < 1 || nc + nd > nday) throw std::invalid_argument("charge and discharge hours must fit in a day");
    const double mdot_out = cfg.mdot_in_max * static_cast<double>(nc) / static_cast<double>(nd);
    if (mdot_out > cfg.mdot_out_max) throw std::invalid_argument("discharge too short to return the charged mass");
    const long rest = nday - nc - nd;
    std::vector<StepMode> day;
    day.insert(day.end(), nc, StepMode::charge(cfg.mdot_in_max));
    day.insert(day.end(), rest / 2, StepMode::idle());
    day.insert(day.end(), nd, StepMode::discharge(mdot_out));
    day.insert(day.end(), rest - rest / 2, StepMode::idle());
    return day;
}

std::vector<EfficiencyReport> chained_efficiency(const CavernState& initial, const std::vector<StepMode>& day,
                                                 int days, const PlantConfig& cfg, const CoefficientSet& co) {
    if (days < 1) throw std::invalid_argument("chained_efficiency: days must be at least 1");
    std::vector<EfficiencyReport> out;
    CavernState s = initial;
    for (int d = 0; d < days; ++d) {
        auto tr = simulate(s, day, cfg, co, Model::bilinear);
        out.push_back(efficiency_audit(tr, cfg));
        s = tr.states.back();
    }
    return out;
}

MeasuredSeries ingest_measurements(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("measurements: empty input");
    auto head = split_csv(line);
    if (head != std::vector<std::string>{"t_s", "p_bar", "T_C"})
        throw std::invalid_argument("measurements line 1: expected header 't_s,p_bar,T_C'");
    MeasuredSeries s;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv(line);
        const std::string ctx = "measurements line " + std::to_string(lineno);
        if (f.size() != 3) throw std::invalid_argument(ctx + ": expected 3 fields");
        double t = parse_double(f[0], ctx);
        double p = parse_double(f[1], ctx);
        double T = parse_double(f[2], ctx);
        if (!s.t.empty() && !(t > s.t.back())) throw std::invalid_argument(ctx + ": time is not strictly increasing");
        s.t.push_back(t);
        s.p.push_back(bar_to_pa(p));
        s.T.push_back(c_to_k(T));
    }
    if (s.t.empty()) throw std::invalid_argument("measurements: empty series");
    return s;
}

ComparisonReport compare_measurements(const MeasuredSeries& series, const Trajectory& tr) {
    std::vector<CavernState> test, ref;
    for (size_t i = 0; i < series.t.size(); ++i) {
        double idx = series.t[i] / tr.dt;
        double r = std::round(idx);
        if (std::abs(idx - r) > 1e-9 || r < 0 || r > static_cast<double>(tr.states.size())) continue;
        auto j = static_cast<size_t>(r);
        const CavernState& sim = j == 0 ? tr.initial : tr.states[j - 1];
        test.push_back(sim);
        ref.push_back(CavernState{series.T[i], series.p[i], sim.m_s});
    }
    if (test.empty()) throw std::invalid_argument("no measurement timestamp falls on the trajectory grid");
    return compare_states(test, ref);
}

void write_comparison_header(std::ostream& out) {
    out << "label,p0_bar,T0_C,mdot_kg_s,mape_p,mae_p_bar,mape_T,mae_T_C\n";
}

void write_comparison_row(std::ostream& out, const ScenarioSpec& spec, const ComparisonReport& r) {
    out << spec.label << ',' << fmt(pa_to_bar(spec.initial_p)) << ',' << fmt(k_to_c(spec.initial_T)) << ','
        << fmt(spec.mode.mdot) << ',' << fmt(r.mape_p) << ',' << fmt(pa_to_bar(r.mae_p)) << ',' << fmt(r.mape_T)
        << ',' << fmt(r.mae_T) << '\n';
}

void write_interval_csv(std::ostream& out, Mode process, const std::vector<IntervalRow>& rows) {
    out << "process,interval_s,T_error_C,T_rel,p_error_bar,p_rel\n";
    for (auto& r : rows)
        out << mode_name(process) << ',' << fmt(r.interval) << ',' << fmt(r.T_error) << ',' << fmt(r.T_rel) << ','
            << fmt(pa_to_bar(r.p_error)) << ',' << fmt(r.p_rel) << '\n';
}

}  // namespace caes
