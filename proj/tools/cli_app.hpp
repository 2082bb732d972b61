#pragma once

// Scenario runner behind the decohere executable. run() takes argv-style
// arguments and writes to the given streams, so tests can drive it in-process.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <new>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "decohere/decohere.hpp"

namespace decohere::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_resource = 3;
inline constexpr int exit_numeric = 4;

namespace impl {

using environment::BathMode;
using environment::DiscreteBath;
using environment::ThermalState;

struct TimeGrid {
    double t_min = 0.0;
    double t_max = 10.0;
    std::size_t points = 201;
    std::string spacing = "linear";

    void attach(CLI::App* sub) {
        sub->add_option("--t-min", t_min, "first sample time")->check(CLI::NonNegativeNumber);
        sub->add_option("--t-max", t_max, "last sample time")->check(CLI::PositiveNumber);
        sub->add_option("--points", points, "number of samples")->check(CLI::Range(2, 10'000'000));
        sub->add_option("--grid", spacing, "linear or geometric")->check(CLI::IsMember({"linear", "geometric"}));
    }

    std::vector<double> build() const {
        detail::require(t_max > t_min, "--t-max must exceed --t-min");
        if (spacing == "geometric") {
            detail::require(t_min > 0.0, "--t-min must be > 0 for a geometric grid");
            return decoherence::geometric_grid(t_min, t_max, points);
        }
        return decoherence::linear_grid(t_min, t_max, points);
    }
};

struct BathOptions {
    double omega = 1.0;
    double g = 0.1;
    std::size_t n_modes = 1;
    std::string bath_file;

    void attach(CLI::App* sub) {
        sub->add_option("--omega", omega, "mode frequency of a uniform bath");
        sub->add_option("--g", g, "mode coupling of a uniform bath");
        sub->add_option("--n-modes", n_modes, "modes in a uniform bath")->check(CLI::Range(1, 100'000'000));
        sub->add_option("--bath", bath_file, "two-column (omega g) bath file; overrides the uniform bath");
    }

    DiscreteBath build() const {
        if (!bath_file.empty()) return io::load_bath(bath_file);
        return environment::build_uniform_bath(n_modes, omega, g);
    }
};

inline ThermalState thermal_from(const std::optional<double>& beta) {
    return beta ? ThermalState::gibbs(*beta) : ThermalState::ground();
}

/// Destination for CSV output: a file when --out is set, otherwise `fallback`.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw domain_error("--out: cannot open '" + path + "' for writing");
            stream_ = file_.get();
        }
    }
    std::ostream& get() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

/// Converts a JSON config object into option tokens. Keys the user also
/// passes on the command line are dropped so that flags win.
inline std::vector<std::string> config_tokens(const nlohmann::json& cfg, const std::set<std::string>& user_keys) {
    std::vector<std::string> tokens;
    for (const auto& [key, value] : cfg.items()) {
        if (key == "scenario" || user_keys.count(key)) continue;
        const std::string flag = "--" + key;
        if (value.is_boolean()) {
            if (value.get<bool>()) tokens.push_back(flag);
        } else if (value.is_number_integer() || value.is_number_unsigned()) {
            tokens.push_back(flag);
            tokens.push_back(value.dump());
        } else if (value.is_number()) {
            tokens.push_back(flag);
            tokens.push_back(io::format_number(value.get<double>()));
        } else if (value.is_string()) {
            tokens.push_back(flag);
            tokens.push_back(value.get<std::string>());
        } else if (value.is_array()) {
            std::string joined;
            for (std::size_t i = 0; i < value.size(); ++i) {
                const auto& e = value[i];
                if (!e.is_number()) throw domain_error("config: '" + key + "' must be an array of numbers");
                joined += (i ? "," : "") + (e.is_number_float() ? io::format_number(e.get<double>()) : e.dump());
            }
            tokens.push_back(flag);
            tokens.push_back(joined);
        } else {
            throw domain_error("config: '" + key + "' has an unsupported value type");
        }
    }
    return tokens;
}

inline std::string key_of(const std::string& token) {
    if (token.rfind("--", 0) != 0 || token.size() <= 2) return {};
    const auto eq = token.find('=');
    return token.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
}

} // namespace impl

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    using namespace impl;
    static const std::vector<std::string> scenarios = {"factor", "spectrum", "dfs", "density", "shor",
                                                       "efficiency", "feasibility", "inspect"};

    CLI::App app{"Decoherence simulator for qubit registers coupled to spin and oscillator baths", "decohere"};
    app.set_version_flag("--version", std::string(io::version));
    app.require_subcommand(1);
    std::string out_path;

    auto add = [&](const std::string& name, const std::string& help) {
        auto* sub = app.add_subcommand(name, help);
        if (name != "inspect" && name != "feasibility") sub->add_option("--out", out_path, "CSV output path (default stdout)");
        return sub;
    };

    // factor
    std::string model = "exact";
    double xi_a = 2.0, xi_b = -2.0;
    std::optional<double> beta;
    BathOptions factor_bath;
    TimeGrid factor_grid;
    auto* factor = add("factor", "sweep a decohering factor F(t) over a time grid");
    factor->add_option("--model", model, "exact, thermal, weak or oscillator")
        ->check(CLI::IsMember({"exact", "thermal", "weak", "oscillator"}));
    factor->add_option("--xi-a", xi_a, "coupling eigenvalue of the first branch (f_a for oscillator)");
    factor->add_option("--xi-b", xi_b, "coupling eigenvalue of the second branch (f_b for oscillator)");
    factor->add_option("--beta", beta, "inverse temperature of the bath")->check(CLI::NonNegativeNumber);
    factor_bath.attach(factor);
    factor_grid.attach(factor);
    factor->callback([&] {
        const auto bath = factor_bath.build();
        const auto times = factor_grid.build();
        if (model == "exact" && beta) throw domain_error("--beta requires --model thermal or weak");
        if (model == "thermal" && !beta) throw domain_error("--model thermal requires --beta");
        const auto th = thermal_from(beta);
        const environment::OscillatorCoupling oc(xi_a, xi_b);
        std::vector<decoherence::DecoherenceFactor> values(times.size());
        parallel_for(times.size(), [&](std::size_t i) {
            const double t = times[i];
            values[i] = decoherence::product_factor(bath, [&](const BathMode& m) {
                if (model == "weak") return decoherence::factor_weak_coupling(m, xi_a, xi_b, t, beta);
                if (model == "oscillator") return decoherence::factor_oscillator(m, oc, t);
                return decoherence::factor_two_level_thermal(m, xi_a, xi_b, t, th);
            });
        });
        Sink sink(out_path, out);
        io::CsvWriter csv(sink.get(), {"t", "re_F", "im_F", "abs_F", "S"});
        for (std::size_t i = 0; i < times.size(); ++i) {
            const auto v = values[i].value();
            csv.row({times[i], v.real(), v.imag(), values[i].modulus(), values[i].dephasing()});
        }
    });

    // spectrum
    std::string density_kind = "flat-gamma", table_file, save_bath;
    double gamma = 0.5, eta = 0.1, cutoff = 1000.0;
    std::size_t sample_modes = 0;
    bool fit = false;
    decoherence::QuadratureOptions quad;
    TimeGrid spectrum_grid;
    auto* spectrum = add("spectrum", "continuous-spectrum dephasing S(t) by quadrature");
    spectrum->add_option("--density", density_kind, "flat-gamma, ohmic or tabulated")
        ->check(CLI::IsMember({"flat-gamma", "ohmic", "tabulated"}));
    spectrum->add_option("--gamma", gamma, "flat-gamma rate");
    spectrum->add_option("--eta", eta, "ohmic strength");
    spectrum->add_option("--table", table_file, "two-column (omega weight) file for --density tabulated");
    spectrum->add_option("--cutoff", cutoff, "spectral cutoff Omega_max");
    spectrum->add_option("--rel-tol", quad.rel_tol, "quadrature relative tolerance")->check(CLI::PositiveNumber);
    spectrum->add_option("--max-panels", quad.max_panels, "quadrature panel cap");
    spectrum->add_option("--max-depth", quad.max_depth, "adaptive refinement depth per panel");
    spectrum->add_option("--periods-per-panel", quad.periods_per_panel, "oscillation periods per quadrature panel")
        ->check(CLI::PositiveNumber);
    spectrum->add_option("--sample-modes", sample_modes, "also evaluate a midpoint-sampled bath of this size");
    spectrum->add_option("--save-bath", save_bath, "write the sampled bath to this file");
    spectrum->add_flag("--fit", fit, "fit S = t / t_d and report t_d");
    spectrum_grid.attach(spectrum);
    spectrum->callback([&] {
        if (density_kind == "tabulated" && table_file.empty()) throw domain_error("--table is required");
        const auto sd = density_kind == "flat-gamma" ? environment::SpectralDensity::flat_gamma(gamma, cutoff)
                        : density_kind == "ohmic"    ? environment::SpectralDensity::ohmic(eta, cutoff)
                                                     : io::load_tabulated_density(table_file, cutoff);
        const auto times = spectrum_grid.build();
        const auto curve = decoherence::dephasing_curve(sd, times, quad);
        std::optional<DiscreteBath> sampled;
        if (sample_modes > 0) sampled = environment::sample_bath(sd, sample_modes);
        if (!save_bath.empty()) {
            if (!sampled) throw domain_error("--save-bath requires --sample-modes");
            std::ofstream f(save_bath);
            if (!f) throw domain_error("--save-bath: cannot open '" + save_bath + "'");
            io::write_bath(f, *sampled);
        }
        Sink sink(out_path, out);
        std::vector<std::string> cols = {"t", "S", "abs_F"};
        if (sampled) cols.push_back("S_sampled");
        io::CsvWriter csv(sink.get(), cols);
        std::vector<double> moduli;
        for (std::size_t i = 0; i < times.size(); ++i) {
            std::vector<double> row = {times[i], curve.s_values[i], std::exp(-curve.s_values[i])};
            if (sampled) row.push_back(decoherence::discrete_s(*sampled, times[i]));
            csv.row(row);
            moduli.push_back(std::exp(-curve.s_values[i]));
        }
        if (fit) {
            const auto f = decoherence::estimate_decoherence_time(times, moduli);
            err << "t_d=" << io::format_number(f.t_d) << " rate=" << io::format_number(f.rate)
                << " residual=" << io::format_number(f.residual) << '\n';
        }
    });

    // dfs
    std::string matrix_file;
    std::vector<double> lambdas, etas, mode_couplings;
    double signature_tol = registers::default_signature_tol;
    auto* dfs = add("dfs", "group system labels with identical couplings to the bath");
    dfs->add_option("--matrix", matrix_file, "coupling matrix file, one row per system label");
    dfs->add_option("--lambdas", lambdas, "per-qubit couplings of a collective register")->delimiter(',');
    dfs->add_option("--couplings", mode_couplings, "per-mode couplings of a collective register")->delimiter(',');
    dfs->add_option("--tol", signature_tol, "row comparison tolerance")->check(CLI::NonNegativeNumber);
    dfs->callback([&] {
        std::optional<registers::CouplingMatrix<double>> cm;
        std::optional<registers::RegisterSpec> spec;
        if (!matrix_file.empty()) {
            cm = io::load_coupling_matrix(matrix_file);
        } else {
            detail::require(!lambdas.empty(), "dfs: give --matrix or --lambdas");
            if (mode_couplings.empty()) mode_couplings = {1.0};
            spec = registers::RegisterSpec(lambdas, std::vector<double>(lambdas.size(), 0.0));
            cm = registers::collective_coupling(*spec, mode_couplings);
        }
        const auto dec = registers::decompose_subspaces(*cm, signature_tol);
        Sink sink(out_path, out);
        io::CsvWriter csv(sink.get(), {"label", "group", "group_size", "xi"});
        std::size_t largest = 0;
        for (std::size_t g = 0; g < dec.groups.size(); ++g) {
            largest = std::max(largest, dec.groups[g].dimension());
            for (auto m : dec.groups[g].members) {
                const double x = spec ? registers::xi(m, *spec) : std::nan("");
                csv.row({static_cast<double>(m), static_cast<double>(g),
                         static_cast<double>(dec.groups[g].dimension()), x});
            }
        }
        err << "groups=" << dec.groups.size() << " largest=" << largest << '\n';
    });

    // density
    std::vector<double> amps_re, amps_im;
    std::optional<double> density_beta, snapshot;
    bool use_oracle = false;
    BathOptions density_bath;
    TimeGrid density_grid;
    auto* dens = add("density", "reduced density matrix of a register under dephasing");
    dens->add_option("--lambdas", lambdas, "per-qubit couplings")->delimiter(',')->required();
    dens->add_option("--etas", etas, "per-qubit level splittings (default 0)")->delimiter(',');
    dens->add_option("--amps-re", amps_re, "real parts of the 2^L initial amplitudes")->delimiter(',')->required();
    dens->add_option("--amps-im", amps_im, "imaginary parts of the initial amplitudes")->delimiter(',');
    dens->add_option("--beta", density_beta, "inverse temperature of the bath")->check(CLI::NonNegativeNumber);
    dens->add_option("--snapshot", snapshot, "emit rho(t) at this time as (row, col, re, im)")
        ->check(CLI::NonNegativeNumber);
    dens->add_flag("--oracle", use_oracle, "trace out the full global state instead of the closed form");
    density_bath.attach(dens);
    density_grid.attach(dens);
    dens->callback([&] {
        if (etas.empty()) etas.assign(lambdas.size(), 0.0);
        const registers::RegisterSpec spec(lambdas, etas);
        const auto dim = static_cast<std::size_t>(spec.dimension());
        detail::require(amps_re.size() == dim, "--amps-re must have 2^L = " + std::to_string(dim) + " entries");
        if (amps_im.empty()) amps_im.assign(dim, 0.0);
        detail::require(amps_im.size() == dim, "--amps-im must have 2^L = " + std::to_string(dim) + " entries");
        std::vector<std::pair<std::size_t, std::complex<double>>> terms;
        for (std::size_t i = 0; i < dim; ++i) terms.emplace_back(i, std::complex<double>{amps_re[i], amps_im[i]});
        const auto state = density::SystemState::superposition(dim, terms);
        const auto bath = density_bath.build();
        if (use_oracle && density_beta) throw domain_error("--oracle supports only the vacuum bath; drop --beta");
        const auto th = thermal_from(density_beta);
        auto evolve = [&](double t) {
            return use_oracle ? density::oracle_full_evolution(state, spec, bath.modes(), t)
                              : density::evolve_reduced(state, spec, bath, th, t);
        };
        Sink sink(out_path, out);
        if (snapshot) {
            const auto rho = evolve(*snapshot);
            io::CsvWriter csv(sink.get(), {"row", "col", "re", "im"});
            for (std::size_t r = 0; r < rho.dim(); ++r) {
                for (std::size_t c = 0; c < rho.dim(); ++c) {
                    csv.row({static_cast<double>(r), static_cast<double>(c), rho(r, c).real(), rho(r, c).imag()});
                }
            }
            return;
        }
        const auto times = density_grid.build();
        std::vector<double> purities(times.size());
        parallel_for(times.size(), [&](std::size_t i) { purities[i] = density::purity(evolve(times[i])); });
        io::CsvWriter csv(sink.get(), {"t", "purity"});
        for (std::size_t i = 0; i < times.size(); ++i) csv.row({times[i], purities[i]});
    });

    // shor
    std::uint64_t shor_n = 15, shor_x = 7, shor_q = 256;
    std::string kernel_kind = "isolated";
    double kernel_t = 1.0;
    std::optional<double> shor_beta;
    double work_cap = shor::default_work_cap;
    BathOptions shor_bath;
    auto* shor_cmd = add("shor", "period-finding outcome distribution with a decohering first register");
    shor_cmd->add_option("--n", shor_n, "number to factor")->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1} << 62));
    shor_cmd->add_option("--x", shor_x, "base coprime to n");
    shor_cmd->add_option("--q", shor_q, "first-register dimension")->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 62));
    shor_cmd->add_option("--kernel", kernel_kind, "isolated, complete or bath")
        ->check(CLI::IsMember({"isolated", "complete", "bath"}));
    shor_cmd->add_option("--t", kernel_t, "interaction time for --kernel bath")->check(CLI::NonNegativeNumber);
    shor_cmd->add_option("--beta", shor_beta, "bath inverse temperature for --kernel bath")
        ->check(CLI::NonNegativeNumber);
    shor_cmd->add_option("--work-cap", work_cap, "operation budget")->check(CLI::PositiveNumber);
    shor_bath.attach(shor_cmd);
    shor_cmd->callback([&] {
        const shor::ShorInstance inst(shor_n, shor_x, shor_q);
        shor::ShorDistribution dist;
        if (kernel_kind == "isolated") {
            dist = shor::shor_distribution(inst, work_cap);
        } else if (kernel_kind == "complete") {
            dist = shor::shor_distribution_decohered(inst, shor::CompleteDelta{}, work_cap);
        } else {
            dist = shor::shor_distribution_decohered(
                inst, shor::TwoLevelBath{shor::unit_register_for(shor_q), shor_bath.build(), kernel_t, thermal_from(shor_beta)},
                work_cap);
        }
        Sink sink(out_path, out);
        io::CsvWriter csv(sink.get(), {"c", "k", "p"});
        for (std::uint64_t c = 0; c < dist.q; ++c) {
            for (std::uint64_t k = 0; k < dist.r; ++k) {
                csv.row({static_cast<double>(c), static_cast<double>(k), dist(c, k)});
            }
        }
        const auto rep = shor::success_probability(dist, inst);
        const auto ceiling = shor::decohered_ceiling(inst);
        const auto as = inst.assumptions();
        err << "r=" << inst.r() << " kernel=" << kernel_kind;
        if (rep.defined) {
            err << " success=" << io::format_number(rep.success) << " lower_bound=" << io::format_number(rep.lower_bound)
                << " good_c=" << rep.good_c.size();
        } else {
            err << " success=undefined";
        }
        err << " ceiling=" << io::format_number(ceiling.ceiling) << " total=" << io::format_number(dist.total())
            << " clipped=" << dist.clipped << '\n';
        if (!as.n_odd_composite) err << "note: n is not an odd composite\n";
        if (!as.q_at_least_n_squared) err << "note: q < n^2, the ceiling chain through phi(r)/n^2 does not apply\n";
    });

    // efficiency
    std::string f_kind = "reciprocal-log", f_table;
    double f_c = 3.0, n_min = 10.0, n_max = 1e12;
    std::size_t per_decade = 8;
    std::vector<double> poly = {0.0, 3.0};
    shor::ClassifierOptions copts;
    auto* eff = add("efficiency", "limit of (1 - f(N))^p(ln N) for a success probability f");
    eff->add_option("--f", f_kind, "reciprocal-log, reciprocal or table")
        ->check(CLI::IsMember({"reciprocal-log", "reciprocal", "table"}));
    eff->add_option("--c", f_c, "c in f = 1/(c ln N)");
    eff->add_option("--table", f_table, "two-column (N f) file for --f table");
    eff->add_option("--poly", poly, "coefficients of p in ascending powers")->delimiter(',');
    eff->add_option("--n-min", n_min, "smallest N on the grid");
    eff->add_option("--n-max", n_max, "largest N on the grid");
    eff->add_option("--per-decade", per_decade, "grid points per decade of N")->check(CLI::Range(1, 10000));
    eff->add_option("--margin", copts.margin, "distance from 1 that counts as efficient")->check(CLI::PositiveNumber);
    eff->callback([&] {
        shor::EfficiencySpec::Success f = shor::ReciprocalLog{f_c};
        if (f_kind == "reciprocal") f = shor::Reciprocal{};
        if (f_kind == "table") {
            detail::require(!f_table.empty(), "--table is required for --f table");
            std::ifstream in(f_table);
            if (!in) throw domain_error("--table: cannot open '" + f_table + "'");
            shor::SampledSuccess s;
            for (const auto& row : io::impl::read_rows(in, f_table)) {
                detail::require(row.size() == 2, f_table + ": rows must have 2 columns (N f)");
                s.n.push_back(row[0]);
                s.f.push_back(row[1]);
            }
            f = s;
        }
        const shor::EfficiencySpec spec(f, poly);
        const auto verdict = shor::classify_efficiency(spec, shor::geometric_n_grid(n_min, n_max, per_decade), copts);
        Sink sink(out_path, out);
        io::CsvWriter csv(sink.get(), {"N", "Lambda"});
        for (const auto& [n, lambda] : verdict.trace) csv.row({n, lambda});
        err << to_string(verdict.verdict) << " limit=" << io::format_number(verdict.limit)
            << (verdict.power_law_tail ? " tail=power-law" : "") << (verdict.degenerate ? " degenerate" : "") << '\n';
    });

    // feasibility
    decoherence::FeasibilityInput fin{10, 1e-6, 1000, 1};
    auto* feas = add("feasibility", "check L^2 tau K < t_d");
    feas->add_option("--L", fin.qubits, "qubit count")->required();
    feas->add_option("--tau", fin.tau, "time per elementary step")->required();
    feas->add_option("--K", fin.steps, "number of steps")->required();
    feas->add_option("--td", fin.t_d, "single-qubit decoherence time")->required();
    feas->callback([&] {
        const auto v = decoherence::feasibility(fin);
        out << (v.feasible ? "FEASIBLE" : "INFEASIBLE") << " margin=" << io::format_number(v.margin) << '\n';
    });

    // inspect
    std::string inspect_file;
    auto* inspect = add("inspect", "parse a CSV written by this tool and summarise it");
    inspect->add_option("file", inspect_file, "CSV file")->required();
    inspect->callback([&] {
        std::ifstream in(inspect_file);
        if (!in) throw domain_error("inspect: cannot open '" + inspect_file + "'");
        const auto table = io::read_csv(in, inspect_file);
        out << "producer=" << table.producer << " rows=" << table.rows.size() << " columns=" << table.columns.size()
            << '\n';
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            double lo = INFINITY, hi = -INFINITY;
            for (const auto& row : table.rows) {
                lo = std::min(lo, row[c]);
                hi = std::max(hi, row[c]);
            }
            out << table.columns[c];
            if (!table.rows.empty()) out << " min=" << io::format_number(lo) << " max=" << io::format_number(hi);
            out << '\n';
        }
    });

    try {
        // Split off --config, merge its keys in front of the user's flags.
        std::vector<std::string> user;
        std::string config_path;
        for (std::size_t i = 1; i < args.size(); ++i) {
            if (args[i] == "--config") {
                if (i + 1 >= args.size()) throw domain_error("--config needs a file path");
                config_path = args[++i];
            } else if (args[i].rfind("--config=", 0) == 0) {
                config_path = args[i].substr(9);
            } else {
                user.push_back(args[i]);
            }
        }
        std::vector<std::string> merged = {args.empty() ? "decohere" : args[0]};
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw domain_error("--config: cannot open '" + config_path + "'");
            nlohmann::json cfg;
            try {
                cfg = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw domain_error("--config: " + std::string(e.what()));
            }
            if (!cfg.is_object()) throw domain_error("--config: top level must be an object");
            std::string scenario;
            if (cfg.contains("scenario")) {
                if (!cfg["scenario"].is_string()) throw domain_error("config: 'scenario' must be a string");
                scenario = cfg["scenario"].get<std::string>();
                if (scenario == "factor-sweep") scenario = "factor";
                if (std::find(scenarios.begin(), scenarios.end(), scenario) == scenarios.end()) {
                    throw domain_error("config: unknown scenario '" + scenario + "'");
                }
            }
            auto sub_pos = std::find_if(user.begin(), user.end(), [](const std::string& s) {
                return std::find(scenarios.begin(), scenarios.end(), s) != scenarios.end();
            });
            if (sub_pos == user.end()) {
                if (scenario.empty()) throw domain_error("config: 'scenario' is missing and no subcommand was given");
                user.insert(user.begin(), scenario);
                sub_pos = user.begin();
            } else if (!scenario.empty() && *sub_pos != scenario) {
                throw domain_error("config: 'scenario' is '" + scenario + "' but the subcommand is '" + *sub_pos + "'");
            }
            std::set<std::string> user_keys;
            for (const auto& tok : user) {
                if (auto k = key_of(tok); !k.empty()) user_keys.insert(k);
            }
            const auto tokens = config_tokens(cfg, user_keys);
            merged.insert(merged.end(), user.begin(), sub_pos + 1);
            merged.insert(merged.end(), tokens.begin(), tokens.end());
            merged.insert(merged.end(), sub_pos + 1, user.end());
        } else {
            merged.insert(merged.end(), user.begin(), user.end());
        }

        std::vector<const char*> argv;
        for (const auto& s : merged) argv.push_back(s.c_str());
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::CallForHelp&) {
            out << app.help();
            return exit_ok;
        } catch (const CLI::CallForAllHelp&) {
            out << app.help("", CLI::AppFormatMode::All);
            return exit_ok;
        } catch (const CLI::CallForVersion&) {
            out << io::version << '\n';
            return exit_ok;
        } catch (const CLI::ParseError& e) {
            err << "error: " << e.what() << '\n';
            return exit_validation;
        }
    } catch (const domain_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const resource_error& e) {
        err << "resource limit: " << e.what() << '\n';
        return exit_resource;
    } catch (const numeric_error& e) {
        err << "numeric failure: " << e.what() << '\n';
        return exit_numeric;
    } catch (const std::bad_alloc&) {
        err << "resource limit: out of memory\n";
        return exit_resource;
    } catch (const std::exception& e) {
        err << "numeric failure: " << e.what() << '\n';
        return exit_numeric;
    }
    return exit_ok;
}

} // namespace decohere::cli
