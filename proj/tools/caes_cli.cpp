// caes: command-line front end for simulation, validation and scheduling runs.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "caes/bilinear.hpp"
#include "caes/io.hpp"
#include "caes/milp.hpp"
#include "caes/params.hpp"
#include "caes/reference.hpp"
#include "caes/scheduler.hpp"
#include "caes/validation.hpp"

#ifndef CAES_VERSION
#define CAES_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace caes;

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string config;
    std::string out_dir = ".";
    std::vector<std::string> inputs;
};

PlantConfig load(const Common& c) { return c.config.empty() ? huntorf_config() : load_config(c.config); }

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot write " + p.string());
    return f;
}

std::ifstream open_in(const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot read " + p);
    return f;
}

// Written before any data file, so a missing CSV next to a manifest marks a partial run.
void write_manifest(const Common& c, const std::string& command, const std::vector<std::string>& args) {
    fs::create_directories(c.out_dir);
    nlohmann::ordered_json m;
    m["command"] = command;
    m["arguments"] = args;
    m["config"] = c.config.empty() ? "builtin:huntorf" : c.config;
    m["inputs"] = c.inputs;
    m["output_dir"] = c.out_dir;
    m["determinism"] =
        "no random numbers are drawn; identical inputs give byte-identical CSVs, except schedule runs that stop on "
        "the time limit (use --node-limit for repeatable runs)";
    m["version"] = CAES_VERSION;
    auto f = open_out(fs::path(c.out_dir) / "manifest.json");
    f << m.dump(2) << '\n';
}

Mode parse_mode(const std::string& s) {
    if (s == "charge") return Mode::charge;
    if (s == "discharge") return Mode::discharge;
    if (s == "idle") return Mode::idle;
    throw std::invalid_argument("unknown mode '" + s + "'");
}

ScheduleModel parse_schedule_model(const std::string& s) {
    if (s == "2") return ScheduleModel::model2_milp;
    if (s == "4") return ScheduleModel::model4_constT;
    if (s == "1") return ScheduleModel::model1_mibp;
    throw std::invalid_argument("unknown schedule model '" + s + "'");
}

void print_report(const ScheduleSolution& sol) {
    std::printf("status %s objective %s gap %s nodes %ld seconds %.1f\n", sol.status.c_str(), fmt(sol.objective).c_str(),
                fmt(sol.gap).c_str(), sol.nodes, sol.seconds);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cavern simulation, validation and self-scheduling"};
    app.set_version_flag("--version", CAES_VERSION);
    app.require_subcommand(1);
    std::vector<std::string> args(argv + 1, argv + argc);

    Common common;
    auto add_common = [&](CLI::App* sc) {
        sc->add_option("--config", common.config, "plant configuration file (default: built-in Huntorf values)");
        sc->add_option("--out", common.out_dir, "output directory");
    };

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate one process and write trajectory.csv");
    add_common(sim);
    std::string sim_mode = "idle", sim_model = "bilinear", sim_p0 = "46bar", sim_T0 = "20C";
    double sim_hours = 1.0, sim_dt = 1.0, sim_mdot = -1.0;
    int sim_every = 1;
    sim->add_option("--mode", sim_mode, "charge, discharge or idle")->required()->check(CLI::IsMember({"charge", "discharge", "idle"}));
    sim->add_option("--hours", sim_hours, "duration in hours");
    sim->add_option("--dt", sim_dt, "step in seconds");
    sim->add_option("--p0", sim_p0, "initial pressure, e.g. 60bar");
    sim->add_option("--T0", sim_T0, "initial temperature, e.g. 45C");
    sim->add_option("--mdot", sim_mdot, "mass flow in kg/s (default: the plant maximum)");
    sim->add_option("--model", sim_model, "bilinear, prelinear, analytical or constant_T")
        ->check(CLI::IsMember({"bilinear", "prelinear", "analytical", "constant_T"}));
    sim->add_option("--every", sim_every, "keep every Nth row");

    // validate
    auto* val = app.add_subcommand("validate", "compare bilinear and analytical runs, write validation.csv");
    add_common(val);
    std::vector<std::string> val_scenarios;
    val->add_option("--scenario", val_scenarios, "scenario label such as C2 (default: all)");

    // interval-study
    auto* ivs = app.add_subcommand("interval-study", "final-state errors against step length, write intervals.csv");
    add_common(ivs);
    std::vector<std::string> ivs_process{"charge", "discharge", "idle"};
    ivs->add_option("--process", ivs_process, "charge, discharge and/or idle")
        ->check(CLI::IsMember({"charge", "discharge", "idle"}));

    // efficiency
    auto* eff = app.add_subcommand("efficiency", "energy audit over chained daily cycles, write efficiency.csv");
    add_common(eff);
    std::string eff_p0 = "46bar", eff_T0 = "35C";
    double eff_charge_h = 7.0, eff_discharge_h = 2.0, eff_dt = 60.0;
    int eff_days = 3;
    eff->add_option("--p0", eff_p0, "initial pressure");
    eff->add_option("--T0", eff_T0, "initial temperature");
    eff->add_option("--charge-hours", eff_charge_h, "hours of full-flow charging per day");
    eff->add_option("--discharge-hours", eff_discharge_h, "hours of discharging per day, flow sized to return the charged mass");
    eff->add_option("--days", eff_days, "number of chained days");
    eff->add_option("--dt", eff_dt, "step in seconds");

    // schedule
    auto* sch = app.add_subcommand("schedule", "solve the self-scheduling problem, write schedule.csv");
    add_common(sch);
    std::string sch_model = "2", sch_prices, sch_p0, sch_T0;
    int sch_nt = 6, sch_levels = 5;
    double sch_dt = 1200.0;
    ScheduleOptions sch_opt;
    bool sch_verify = false;
    sch->add_option("--model", sch_model, "2 (PWL MILP), 4 (constant temperature), 3 (analytical search) or oracle")
        ->check(CLI::IsMember({"2", "3", "4", "oracle"}));
    sch->add_option("--nt", sch_nt, "steps when no price file is given (two-peak synthetic prices)");
    sch->add_option("--prices", sch_prices, "price CSV `t,price_per_MWh`");
    sch->add_option("--dt", sch_dt, "step in seconds");
    sch->add_option("--p0", sch_p0, "initial pressure (default 46bar)");
    sch->add_option("--T0", sch_T0, "initial temperature (default 20C)");
    sch->add_option("--segments", sch_opt.segments, "most PWL segments per square");
    sch->add_option("--gap", sch_opt.rel_gap, "relative MILP gap");
    sch->add_option("--time-limit", sch_opt.time_limit, "seconds");
    sch->add_option("--node-limit", sch_opt.node_limit, "B&B nodes");
    sch->add_option("--levels", sch_levels, "power levels per range for model 3 and the oracle");
    sch->add_flag("--terminal-mass", sch_opt.terminal_mass, "end with at least the initial mass");
    sch->add_flag("--verify", sch_verify, "re-simulate with the bilinear model and write violations.csv");

    // verify
    auto* ver = app.add_subcommand("verify", "re-simulate a schedule CSV, write violations.csv");
    add_common(ver);
    std::string ver_file, ver_truth = "bilinear";
    double ver_dt = 1200.0;
    ver->add_option("--schedule", ver_file, "schedule CSV")->required();
    ver->add_option("--dt", ver_dt, "step in seconds");
    ver->add_option("--truth", ver_truth, "bilinear or analytical")->check(CLI::IsMember({"bilinear", "analytical"}));

    // print-coefficients
    auto* pc = app.add_subcommand("print-coefficients", "write coefficients.csv for one step length");
    add_common(pc);
    double pc_dt = 1.0;
    pc->add_option("--dt", pc_dt, "step in seconds");

    // export-mps
    auto* mps = app.add_subcommand("export-mps", "write the schedule model as model.mps");
    add_common(mps);
    std::string mps_model = "2", mps_prices;
    int mps_nt = 6;
    double mps_dt = 1200.0;
    int mps_segments = 8;
    mps->add_option("--model", mps_model, "2 or 4")->check(CLI::IsMember({"2", "4"}));
    mps->add_option("--nt", mps_nt, "steps when no price file is given");
    mps->add_option("--prices", mps_prices, "price CSV");
    mps->add_option("--dt", mps_dt, "step in seconds");
    mps->add_option("--segments", mps_segments, "most PWL segments per square");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    const fs::path out(common.out_dir);
    auto prices_for = [&](const std::string& file, int nt, double dt) {
        if (file.empty()) return two_peak_prices(nt, dt);
        auto f = open_in(file);
        return read_prices_csv(f, dt);
    };

    try {
        if (!sch_prices.empty()) common.inputs.push_back(sch_prices);
        if (!mps_prices.empty()) common.inputs.push_back(mps_prices);
        if (!ver_file.empty()) common.inputs.push_back(ver_file);
        const PlantConfig cfg = load(common);
        write_manifest(common, command, args);

        if (command == "simulate") {
            const Mode m = parse_mode(sim_mode);
            const CavernState s0 = state_from_pT(parse_pressure(sim_p0), parse_temperature(sim_T0), cfg);
            double mdot = sim_mdot;
            if (mdot < 0.0) mdot = m == Mode::charge ? cfg.mdot_in_max : m == Mode::discharge ? cfg.mdot_out_max : 0.0;
            if (!(sim_dt > 0.0) || !(sim_hours > 0.0)) throw std::invalid_argument("--dt and --hours must be positive");
            const long n = std::lround(sim_hours * 3600.0 / sim_dt);
            std::vector<StepMode> modes(static_cast<size_t>(n), StepMode{m, m == Mode::idle ? 0.0 : mdot});
            const Model model = parse_model(sim_model);
            const Trajectory tr = simulate(s0, modes, cfg, compute_coefficients(cfg, sim_dt), model, sim_dt);
            auto f = open_out(out / "trajectory.csv");
            write_trajectory_csv(f, tr, sim_every, model_name(model));
        } else if (command == "validate") {
            std::vector<ScenarioSpec> specs;
            if (val_scenarios.empty()) specs = table_scenarios();
            for (auto& l : val_scenarios) specs.push_back(find_scenario(l));
            auto f = open_out(out / "validation.csv");
            write_comparison_header(f);
            write_comparison_header(std::cout);
            for (auto& sp : specs) {
                const ComparisonReport r = run_scenario(sp, cfg);
                write_comparison_row(f, sp, r);
                write_comparison_row(std::cout, sp, r);
            }
        } else if (command == "interval-study") {
            auto f = open_out(out / "intervals.csv");
            bool first = true;
            for (auto& p : ivs_process) {
                const Mode m = parse_mode(p);
                std::ostringstream block;
                write_interval_csv(block, m, interval_study(m, default_intervals(), cfg));
                std::string text = block.str();
                if (!first) text = text.substr(text.find('\n') + 1);  // one header for the whole file
                f << text;
                first = false;
            }
        } else if (command == "efficiency") {
            const auto cycle = balanced_day_cycle(cfg, eff_charge_h, eff_discharge_h, eff_dt);
            const CavernState s0 = state_from_pT(parse_pressure(eff_p0), parse_temperature(eff_T0), cfg);
            const auto reps = chained_efficiency(s0, cycle, eff_days, cfg, compute_coefficients(cfg, eff_dt));
            auto f = open_out(out / "efficiency.csv");
            f << "day,U_in_J,U_out_J,Q_wall_J,dU_cavern_J,efficiency,closure_J\n";
            for (size_t d = 0; d < reps.size(); ++d) {
                const auto& r = reps[d];
                f << d + 1 << ',' << fmt(r.U_in) << ',' << fmt(r.U_out) << ',' << fmt(r.Q_wall) << ','
                  << fmt(r.delta_U_cavern) << ',' << fmt(r.efficiency) << ',' << fmt(r.closure) << '\n';
            }
        } else if (command == "schedule") {
            const PriceSeries prices = prices_for(sch_prices, sch_nt, sch_dt);
            if (!sch_p0.empty() || !sch_T0.empty())
                sch_opt.initial = state_from_pT(parse_pressure(sch_p0.empty() ? "46bar" : sch_p0),
                                                parse_temperature(sch_T0.empty() ? "20C" : sch_T0), cfg);
            ScheduleSolution sol;
            if (sch_model == "3") sol = solve_model3_heuristic(cfg, prices, sch_levels, sch_opt);
            else if (sch_model == "oracle") sol = oracle_enumerate(cfg, prices, sch_levels, sch_opt);
            else sol = solve_schedule(cfg, prices, parse_schedule_model(sch_model), sch_opt);
            print_report(sol);
            auto f = open_out(out / "schedule.csv");
            write_schedule_csv(f, sol, prices, cfg);
            if (sch_verify) {
                const FeasibilityReport rep = verify_schedule(sol, cfg, TruthModel::bilinear);
                auto v = open_out(out / "violations.csv");
                write_violation_csv(v, rep);
                std::printf("worst excursion %s bar over %d steps\n", fmt(pa_to_bar(rep.worst_excursion)).c_str(),
                            rep.violations);
            }
            if (sol.alpha.empty()) return 1;
        } else if (command == "verify") {
            auto in = open_in(ver_file);
            const ScheduleSolution sol = read_schedule_csv(in, ver_dt, cfg);
            TruthModel truth;
            if (ver_truth == "bilinear") truth = TruthModel::bilinear;
            else if (ver_truth == "analytical") truth = TruthModel::analytical;
            else throw std::invalid_argument("unknown truth model '" + ver_truth + "'");
            const FeasibilityReport rep = verify_schedule(sol, cfg, truth);
            auto v = open_out(out / "violations.csv");
            write_violation_csv(v, rep);
            std::printf("worst excursion %s bar over %d steps\n", fmt(pa_to_bar(rep.worst_excursion)).c_str(),
                        rep.violations);
        } else if (command == "print-coefficients") {
            const CoefficientSet co = compute_coefficients(cfg, pc_dt);
            auto f = open_out(out / "coefficients.csv");
            f << "name,value\n";
            const std::pair<const char*, double> rows[] = {
                {"dt", co.dt},   {"a1", co.a1},   {"a2", co.a2},   {"a3", co.a3},   {"a4", co.a4},   {"a5", co.a5},
                {"a6", co.a6},   {"a7", co.a7},   {"a8", co.a8},   {"a9", co.a9},   {"a10", co.a10}, {"a11", co.a11},
                {"a12", co.a12}, {"a13", co.a13}, {"l1", co.l1},   {"l2", co.l2},   {"l3", co.l3},   {"l4", co.l4},
                {"c2", co.c2},   {"c3", co.c3},   {"c4", co.c4},   {"c5", co.c5},   {"c6", co.c6},   {"c7", co.c7},
                {"c8", co.c8},   {"c9", co.c9},   {"c10", co.c10}, {"c11", co.c11}, {"c12", co.c12}, {"c13", co.c13},
                {"c14", co.c14}, {"c15", co.c15}, {"c16", co.c16}, {"c17", co.c17}, {"c18", co.c18}, {"c19", co.c19},
                {"c20", co.c20}, {"c21", co.c21}, {"c22", co.c22}, {"c23", co.c23}, {"c24", co.c24}, {"c25", co.c25},
                {"c26", co.c26}, {"c27", co.c27}, {"c28", co.c28}, {"c29", co.c29}, {"c30", co.c30}, {"c31", co.c31},
                {"c32", co.c32}, {"m_av0", co.m_av0}};
            for (auto& [name, v] : rows) f << name << ',' << fmt(v) << '\n';
        } else if (command == "export-mps") {
            const PriceSeries prices = prices_for(mps_prices, mps_nt, mps_dt);
            ScheduleOptions o;
            o.segments = mps_segments;
            const MILPProblem p = build_model(cfg, prices, parse_schedule_model(mps_model), o);
            auto f = open_out(out / "model.mps");
            export_mps(p, f);
            if (!f) throw IoError("write failed: " + (out / "model.mps").string());
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
