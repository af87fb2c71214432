#include "fran/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <tuple>

#include "fran/det_xchannel.hpp"
#include "fran/fran_schemes.hpp"
#include "fran/mutation.hpp"
#include "fran/ndt_formulas.hpp"
#include "fran/parallel.hpp"
#include "fran/properties.hpp"
#include "fran/real_ia.hpp"
#include "fran/verify.hpp"

namespace fran::cli {

using json = nlohmann::ordered_json;

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& text, std::string_view what)
{
    if (text.empty()) throw std::invalid_argument(std::string(what) + ": empty value");
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || !std::isfinite(v))
        throw std::invalid_argument(std::string(what) + ": cannot parse '" + text + "'");
    return v;
}

std::vector<std::string> split(std::string_view text, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        out.push_back(trim(text.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

void put_ndt(json& j, const std::string& key, NdtValue v)
{
    if (v.is_infinite())
        j[key] = nullptr;
    else
        j[key] = v.value();
    j[key + "_inf"] = v.is_infinite();
}

void emit(const std::string& text, const std::string& path, std::ostream& out)
{
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    f.close();
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

// ---- simulate --------------------------------------------------------------

struct SimOptions {
    std::string scheme;
    int n_d = 5;
    double r_d = 1.0;
    double r_f = 1.0;
    std::optional<double> mu;
    std::string power = "2^20";
    double eps_prime = 0.05;
    std::int64_t file_bits = 4000;
    int seeds = 10;
    int n_uses = 20;
    bool noiseless = false;
    std::string out;
};

struct RunRecord {
    bool feasible = true;
    std::string error;
    json fields;
    NdtValue ndt;
    double error_rate = 0.0;
    bool exact = false;
};

schemes::Bits random_bits(std::mt19937_64& rng, std::int64_t n)
{
    schemes::Bits b(static_cast<std::size_t>(n));
    for (auto& x : b) x = static_cast<std::uint8_t>(rng() & 1u);
    return b;
}

json latency_json(const LatencyBreakdown& l)
{
    return json{{"t_f", l.t_f}, {"t_e", l.t_e}, {"t_d", l.t_d}};
}

RunRecord simulate_det(const SimOptions& o, std::uint64_t seed)
{
    std::seed_seq ss{seed, std::uint64_t{1}};
    std::mt19937_64 rng(ss);
    const det::BitVector a(random_bits(rng, o.file_bits)), b(random_bits(rng, o.file_bits));
    const auto r = det::run_det_delivery(a, b, det::DetConfig::make(o.n_d), o.r_d);
    RunRecord rec;
    std::int64_t errors = 0;
    for (std::size_t i = 0; i < a.size(); ++i) errors += (r.decoded_a[i] != a[i]) + (r.decoded_b[i] != b[i]);
    rec.exact = errors == 0;
    rec.error_rate = static_cast<double>(errors) / (2.0 * static_cast<double>(a.size()));
    rec.ndt = r.ndt;
    rec.fields["exact"] = rec.exact;
    rec.fields["bit_errors"] = errors;
    rec.fields["bit_error_rate"] = rec.error_rate;
    rec.fields["channel_uses"] = r.channel_uses;
    rec.fields["d2d_bits_per_use"] = r.d2d_bits_per_use;
    rec.fields["latency"] = latency_json(r.latency);
    return rec;
}

RunRecord simulate_ia(const SimOptions& o, std::uint64_t seed, double power)
{
    const auto r = ia::run_ia_delivery(seed, o.n_d, o.eps_prime, power, o.r_d, o.n_uses, o.noiseless);
    RunRecord rec;
    rec.exact = r.symbol_errors == 0;
    rec.error_rate = r.symbol_error_rate;
    rec.ndt = r.ndt_estimate;
    rec.fields["q"] = r.config.q;
    rec.fields["a"] = r.config.a;
    rec.fields["rho"] = r.config.rho;
    rec.fields["exact"] = rec.exact;
    rec.fields["symbol_errors"] = r.symbol_errors;
    rec.fields["symbols"] = r.symbols;
    rec.fields["symbol_error_rate"] = r.symbol_error_rate;
    rec.fields["decode_failures"] = r.decode_failures;
    rec.fields["latency"] = latency_json(r.latency);
    rec.fields["ndt_identity"] = ia::ia_ndt_identity(o.n_d, r.config.q, power, o.r_d);
    return rec;
}

RunRecord simulate_zf_soft(const SimOptions& o, std::uint64_t seed, double power, bool soft)
{
    std::seed_seq ss{seed, std::uint64_t{1}};
    std::mt19937_64 rng(ss);
    const std::array<schemes::Bits, 2> payload{random_bits(rng, o.file_bits), random_bits(rng, o.file_bits)};
    const Csi csi = draw_csi(seed);
    const auto noise = o.noiseless ? std::nullopt : std::optional<std::uint64_t>(seed);
    const auto r = soft ? schemes::soft_transfer_delivery(csi, payload, power, o.r_f, noise)
                        : schemes::cache_zf_delivery(csi, payload, power, noise);
    RunRecord rec;
    rec.exact = r.bit_errors == 0;
    rec.error_rate = static_cast<double>(r.bit_errors) / (2.0 * static_cast<double>(o.file_bits));
    rec.ndt = r.ndt_estimate;
    rec.fields["levels_per_dim"] = r.levels_per_dim;
    rec.fields["bits_per_use"] = r.bits_per_use;
    rec.fields["exact"] = rec.exact;
    rec.fields["bit_errors"] = r.bit_errors;
    rec.fields["bit_error_rate"] = rec.error_rate;
    rec.fields["sinr_db"] = r.sinr_db;
    rec.fields["max_tx_power"] = r.max_tx_power;
    rec.fields["max_leakage"] = r.max_leakage;
    if (soft) rec.fields["quant_noise_power"] = r.quant_noise_power;
    rec.fields["latency"] = latency_json(r.latency);
    put_ndt(rec.fields, "ndt_accounting", r.ndt);
    return rec;
}

int cmd_simulate(const SimOptions& o, std::ostream& out, std::ostream& err)
{
    static const std::vector<std::string> names{"det", "ia", "zf", "soft"};
    if (std::find(names.begin(), names.end(), o.scheme) == names.end())
        throw std::invalid_argument("unknown scheme '" + o.scheme + "' (det, ia, zf, soft)");
    const double corner = o.scheme == "zf" ? 1.0 : o.scheme == "soft" ? 0.0 : 0.5;
    if (o.mu && *o.mu != corner)
        throw std::invalid_argument("scheme " + o.scheme + " runs at mu = " + format_number(corner));
    if (o.seeds < 1) throw std::invalid_argument("--seeds must be >= 1");
    if (o.file_bits < 1) throw std::invalid_argument("--L must be >= 1");
    if (o.n_uses < 1) throw std::invalid_argument("--n-uses must be >= 1");

    NdtValue reference;
    if (o.scheme == "det")
        reference = ndt::det_ndt(o.n_d, o.r_d);
    else if (o.scheme == "ia")
        reference = ndt::delta_nd(o.n_d, o.r_d);
    else if (o.scheme == "zf")
        reference = NdtValue(1.0);
    else
        reference = NdtValue(1.0 + ndt::limit_ratio(1.0, o.r_f));

    // det is power-free; one pseudo level keeps the layout uniform.
    const bool uses_power = o.scheme != "det";
    const std::vector<double> powers = uses_power ? parse_power_list(o.power) : std::vector<double>{0.0};

    const std::size_t per = static_cast<std::size_t>(o.seeds);
    const auto records = parallel_map(powers.size() * per, [&](std::size_t k) {
        const double p = powers[k / per];
        const auto seed = static_cast<std::uint64_t>(k % per);
        try {
            if (o.scheme == "det") return simulate_det(o, seed);
            if (o.scheme == "ia") return simulate_ia(o, seed, p);
            return simulate_zf_soft(o, seed, p, o.scheme == "soft");
        } catch (const InfeasibleError& e) {
            RunRecord rec;
            rec.feasible = false;
            rec.error = e.what();
            return rec;
        }
    });

    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["scheme"] = o.scheme;
    json params;
    params["mu"] = corner;
    params["rf"] = o.r_f;
    params["rd"] = o.r_d;
    if (o.scheme == "det" || o.scheme == "ia") params["nd"] = o.n_d;
    if (o.scheme == "ia") {
        params["eps_prime"] = o.eps_prime;
        params["n_uses"] = o.n_uses;
    } else {
        params["L"] = o.file_bits;
    }
    params["seeds"] = o.seeds;
    params["noiseless"] = o.noiseless;
    doc["params"] = params;
    put_ndt(doc, "reference_ndt", reference);

    json runs = json::array();
    json summary = json::array();
    std::size_t infeasible_total = 0;
    for (std::size_t pi = 0; pi < powers.size(); ++pi) {
        std::size_t feasible = 0, exact = 0;
        double ndt_sum = 0.0, err_sum = 0.0, max_dev = 0.0;
        bool ndt_inf = false;
        for (std::size_t s = 0; s < per; ++s) {
            const auto& rec = records[pi * per + s];
            json run;
            if (uses_power)
                run["power"] = powers[pi];
            else
                run["power"] = nullptr;
            run["seed"] = s;
            run["feasible"] = rec.feasible;
            if (!rec.feasible) {
                run["error"] = rec.error;
                ++infeasible_total;
                runs.push_back(std::move(run));
                continue;
            }
            put_ndt(run, "ndt_estimate", rec.ndt);
            for (auto it = rec.fields.begin(); it != rec.fields.end(); ++it) run[it.key()] = it.value();
            runs.push_back(std::move(run));
            ++feasible;
            exact += rec.exact;
            err_sum += rec.error_rate;
            if (rec.ndt.is_infinite() || reference.is_infinite()) {
                ndt_inf = true;
            } else {
                ndt_sum += rec.ndt.value();
                max_dev = std::max(max_dev, std::abs(rec.ndt.value() - reference.value()));
            }
        }
        json row;
        if (uses_power)
            row["power"] = powers[pi];
        else
            row["power"] = nullptr;
        row["runs"] = per;
        row["feasible"] = feasible;
        row["exact"] = exact;
        if (feasible > 0) {
            const double n = static_cast<double>(feasible);
            row["mean_error_rate"] = err_sum / n;
            put_ndt(row, "mean_ndt", ndt_inf ? NdtValue::infinite() : NdtValue(ndt_sum / n));
            if (ndt_inf) {
                row["mean_deviation"] = nullptr;
                row["max_deviation"] = nullptr;
            } else {
                row["mean_deviation"] = ndt_sum / n - reference.value();
                row["max_deviation"] = max_dev;
            }
        }
        summary.push_back(std::move(row));
    }
    doc["runs"] = std::move(runs);
    doc["summary"] = std::move(summary);
    emit(doc.dump(2) + "\n", o.out, out);

    if (infeasible_total == records.size()) {
        err << "error: every run was infeasible: " << records.front().error << "\n";
        return 2;
    }
    return 0;
}

}  // namespace

double parse_power(std::string_view text)
{
    const std::string t = trim(text);
    double v = 0.0;
    if (const auto caret = t.find('^'); caret != std::string::npos) {
        const double base = parse_double(t.substr(0, caret), "power base");
        const double exp = parse_double(t.substr(caret + 1), "power exponent");
        v = std::pow(base, exp);
    } else {
        v = parse_double(t, "power");
    }
    if (!(v > 1.0) || !std::isfinite(v)) throw std::invalid_argument("power must be finite and > 1, got '" + t + "'");
    return v;
}

std::vector<double> parse_power_list(std::string_view text)
{
    std::vector<double> out;
    for (const auto& part : split(text, ',')) out.push_back(parse_power(part));
    return out;
}

std::vector<double> parse_grid(std::string_view text)
{
    const std::string t = trim(text);
    std::vector<double> out;
    if (t.find(':') != std::string::npos) {
        const auto parts = split(t, ':');
        if (parts.size() != 3) throw std::invalid_argument("grid '" + t + "': expected start:stop:step");
        out = props::inclusive_range(parse_double(parts[0], "grid start"), parse_double(parts[1], "grid stop"),
                                     parse_double(parts[2], "grid step"));
    } else {
        for (const auto& part : split(t, ',')) out.push_back(parse_double(part, "grid value"));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.empty()) throw std::invalid_argument("grid '" + t + "' is empty");
    return out;
}

std::string format_number(double v)
{
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    if (v == 0.0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<SweepRow> sweep_rows(const std::vector<double>& mu_grid, const std::vector<double>& rf_grid,
                                 const std::vector<double>& rd_grid)
{
    std::vector<SystemParams> pts;
    for (double mu : mu_grid)
        for (double rf : rf_grid)
            for (double rd : rd_grid) {
                auto p = SystemParams::make(mu, rf, rd);
                p.validate();
                pts.push_back(p);
            }
    std::sort(pts.begin(), pts.end(), [](const SystemParams& a, const SystemParams& b) {
        return std::tie(a.mu, a.r_f, a.r_d) < std::tie(b.mu, b.r_f, b.r_d);
    });
    return parallel_map(pts.size(), [&](std::size_t i) {
        const auto& p = pts[i];
        const auto mix = schemes::best_achievable(p);
        return SweepRow{p, std::string(ndt::to_string(ndt::classify_regime(p))), ndt::minimum_ndt(p),
                        ndt::lower_bound(p), mix.ndt, schemes::mix_label(mix)};
    });
}

std::string sweep_csv(const std::vector<SweepRow>& rows)
{
    std::string s = "mu,rf,rd,regime,ndt_min,ndt_lower,ndt_achievable,mix\n";
    for (const auto& r : rows) {
        s += format_number(r.params.mu) + ',' + format_number(r.params.r_f) + ',' + format_number(r.params.r_d) + ',' +
             r.regime + ',' + format_number(r.ndt_min.value()) + ',' + format_number(r.ndt_lower.value()) + ',' +
             format_number(r.ndt_achievable.value()) + ',' + r.mix + '\n';
    }
    return s;
}

std::string sweep_json(const std::vector<SweepRow>& rows)
{
    json doc;
    doc["schema_version"] = kSchemaVersion;
    json arr = json::array();
    for (const auto& r : rows) {
        json row;
        row["mu"] = r.params.mu;
        row["rf"] = r.params.r_f;
        row["rd"] = r.params.r_d;
        row["regime"] = r.regime;
        put_ndt(row, "ndt_min", r.ndt_min);
        put_ndt(row, "ndt_lower", r.ndt_lower);
        put_ndt(row, "ndt_achievable", r.ndt_achievable);
        row["mix"] = r.mix;
        arr.push_back(std::move(row));
    }
    doc["rows"] = std::move(arr);
    return doc.dump(2) + "\n";
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Delivery-time analysis and simulation for a 2x2 fog radio access network with D2D links", "fran"};
    app.require_subcommand(1);

    double mu = 0.0, rf = 0.0, rd = 0.0;
    std::string format = "text";
    auto* ndt_cmd = app.add_subcommand("ndt", "Closed-form minimum NDT at one operating point");
    ndt_cmd->add_option("--mu", mu, "Fractional cache size")->required();
    ndt_cmd->add_option("--rf", rf, "Fronthaul rate")->required();
    ndt_cmd->add_option("--rd", rd, "D2D rate")->required();
    ndt_cmd->add_option("--format", format, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));

    std::string mu_grid = "0:1:0.05", rf_grid = "0", rd_grid = "0", sweep_out, sweep_format = "csv";
    auto* sweep_cmd = app.add_subcommand("sweep", "Minimum NDT over a parameter grid");
    sweep_cmd->add_option("--mu", mu_grid, "Grid start:stop:step or a,b,c")->capture_default_str();
    sweep_cmd->add_option("--rf", rf_grid, "Grid start:stop:step or a,b,c")->capture_default_str();
    sweep_cmd->add_option("--rd", rd_grid, "Grid start:stop:step or a,b,c")->capture_default_str();
    sweep_cmd->add_option("--out", sweep_out, "Output file (stdout when omitted)");
    sweep_cmd->add_option("--format", sweep_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    SimOptions sim;
    double sim_mu = 0.0;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo runs of one delivery scheme");
    sim_cmd->add_option("scheme", sim.scheme, "det, ia, zf or soft")->required();
    sim_cmd->add_option("--nd", sim.n_d, "Layers (odd, >= 3)")->capture_default_str();
    sim_cmd->add_option("--rd", sim.r_d, "D2D rate")->capture_default_str();
    sim_cmd->add_option("--rf", sim.r_f, "Fronthaul rate")->capture_default_str();
    auto* sim_mu_opt = sim_cmd->add_option("--mu", sim_mu, "Cache size; must match the scheme corner");
    sim_cmd->add_option("--power", sim.power, "Comma-separated P values, 2^k accepted")->capture_default_str();
    sim_cmd->add_option("--eps-prime", sim.eps_prime, "Alignment margin exponent")->capture_default_str();
    sim_cmd->add_option("--L", sim.file_bits, "File length in bits")->capture_default_str();
    sim_cmd->add_option("--seeds", sim.seeds, "Seeds 0..n-1")->capture_default_str();
    sim_cmd->add_option("--n-uses", sim.n_uses, "Channel uses per IA run")->capture_default_str();
    sim_cmd->add_flag("--noiseless", sim.noiseless, "Skip receiver noise");
    sim_cmd->add_option("--out", sim.out, "Output file (stdout when omitted)");

    std::string inject = "none";
    auto* verify_cmd = app.add_subcommand("verify", "Run the invariant suite");
    verify_cmd->add_option("--inject", inject)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*ndt_cmd) {
            const auto rows = sweep_rows({mu}, {rf}, {rd});
            const auto& r = rows.front();
            if (format == "csv") {
                out << sweep_csv(rows);
            } else if (format == "json") {
                out << sweep_json(rows);
            } else {
                out << "mu: " << format_number(r.params.mu) << "\n"
                    << "rf: " << format_number(r.params.r_f) << "\n"
                    << "rd: " << format_number(r.params.r_d) << "\n"
                    << "regime: " << r.regime << "\n"
                    << "ndt_min: " << format_number(r.ndt_min.value()) << "\n"
                    << "ndt_lower: " << format_number(r.ndt_lower.value()) << "\n"
                    << "ndt_achievable: " << format_number(r.ndt_achievable.value()) << "\n"
                    << "mix: " << r.mix << "\n";
            }
            return 0;
        }
        if (*sweep_cmd) {
            const auto rows = sweep_rows(parse_grid(mu_grid), parse_grid(rf_grid), parse_grid(rd_grid));
            emit(sweep_format == "json" ? sweep_json(rows) : sweep_csv(rows), sweep_out, out);
            return 0;
        }
        if (*sim_cmd) {
            if (*sim_mu_opt) sim.mu = sim_mu;
            return cmd_simulate(sim, out, err);
        }
        if (*verify_cmd) {
            ScopedMutation guard(parse_mutation(inject));
            const int failed = verify::report(verify::run_all(), out);
            return failed == 0 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace fran::cli
