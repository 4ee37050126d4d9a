#include "risfas/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "risfas/channel.hpp"
#include "risfas/rng.hpp"

namespace risfas::sweep {

namespace {

constexpr const char* kVersion = "0.1.0";

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// path gain term of the budget in dB: 10 alpha log10(d_ar * d_rn)
double path_db(double d_ar, double d_rn, double alpha) {
    return 10.0 * alpha * std::log10(d_ar * d_rn);
}

// ---- config parsing ---------------------------------------------------------

using nlohmann::json;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> valid,
                         const std::string& scope) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* v : valid)
            if (key == v) ok = true;
        if (!ok) {
            std::ostringstream msg;
            msg << "unknown key \"" << key << "\"" << (scope.empty() ? "" : " in " + scope)
                << "; valid keys:";
            for (const char* v : valid) msg << " " << v;
            throw ConfigError(msg.str());
        }
    }
}

double require_number(const json& j, const char* field) {
    if (!j.is_number()) throw ConfigError(std::string{"field \""} + field + "\" must be a number");
    return j.get<double>();
}

int require_int(const json& j, const char* field) {
    if (!j.is_number_integer())
        throw ConfigError(std::string{"field \""} + field + "\" must be an integer");
    return j.get<int>();
}

PortGrid parse_grid(const json& j, const std::string& scope, const PortGrid& defaults) {
    reject_unknown_keys(j, {"n1", "n2", "w1", "w2"}, scope);
    PortGrid g = defaults;
    if (j.contains("n1")) g.n1 = require_int(j["n1"], "n1");
    if (j.contains("n2")) g.n2 = require_int(j["n2"], "n2");
    if (j.contains("w1")) g.w1 = require_number(j["w1"], "w1");
    if (j.contains("w2")) g.w2 = require_number(j["w2"], "w2");
    try {
        g.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(scope + ": " + e.what());
    }
    return g;
}

Axis parse_axis(const std::string& name) {
    for (Axis a : {Axis::avg_snr_b_db, Axis::ris_elements, Axis::ports_b, Axis::area_b,
                   Axis::ports_e, Axis::area_e, Axis::rate_bits})
        if (name == axis_name(a)) return a;
    throw ConfigError("field \"sweep.axis\": unknown axis \"" + name +
                      "\"; valid: avg_snr_b_db ris_elements ports_b area_b ports_e area_e "
                      "rate_bits");
}

Output parse_output(const std::string& name) {
    for (Output o : {Output::sop_glq, Output::sop_reference, Output::sop_mc, Output::cdf_table,
                     Output::pdf_table})
        if (name == output_name(o)) return o;
    throw ConfigError("field \"sweep.outputs\": unknown output \"" + name +
                      "\"; valid: sop_glq sop_reference sop_mc cdf_table pdf_table");
}

// N ports -> (n1, n2) with n1 the largest divisor <= sqrt(N); squares stay square.
PortGrid grid_for_ports(const PortGrid& base, int ports) {
    if (ports < 1) throw ConfigError("ports axis values must be positive integers");
    int n1 = static_cast<int>(std::sqrt(static_cast<double>(ports)));
    while (n1 > 1 && ports % n1 != 0) --n1;
    PortGrid g = base;
    g.n1 = n1;
    g.n2 = ports / n1;
    if (g.n1 > 1 && g.w1 <= 0.0) g.w1 = g.w2 > 0.0 ? g.w2 : 1.0;
    return g;
}

PortGrid grid_for_area(const PortGrid& base, double area) {
    if (!(area > 0.0)) throw ConfigError("area axis values must be positive");
    PortGrid g = base;
    const double side = std::sqrt(area);
    g.w1 = side;
    g.w2 = side;
    return g;
}

void apply_axis(ScenarioConfig& cfg, Axis axis, double value) {
    switch (axis) {
    case Axis::avg_snr_b_db:
        cfg.avg_snr_b_db = value;
        cfg.power_dbm.reset(); // the swept SNR drives the power
        break;
    case Axis::ris_elements:
        if (value != std::floor(value)) throw ConfigError("ris_elements axis must be integral");
        cfg.ris_elements = static_cast<int>(value);
        break;
    case Axis::ports_b:
        if (value != std::floor(value)) throw ConfigError("ports_b axis must be integral");
        cfg.bob_grid = grid_for_ports(cfg.bob_grid, static_cast<int>(value));
        break;
    case Axis::area_b:
        cfg.bob_grid = grid_for_area(cfg.bob_grid, value);
        break;
    case Axis::ports_e:
        if (value != std::floor(value)) throw ConfigError("ports_e axis must be integral");
        cfg.eve_grid = grid_for_ports(cfg.eve_grid, static_cast<int>(value));
        break;
    case Axis::area_e:
        cfg.eve_grid = grid_for_area(cfg.eve_grid, value);
        break;
    case Axis::rate_bits:
        cfg.rate_bits = value;
        break;
    }
}

std::string format_prob(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.5e", p);
    return buf;
}

std::string format_axis(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

bool wants(const SweepSpec& spec, Output o) {
    return std::find(spec.outputs.begin(), spec.outputs.end(), o) != spec.outputs.end();
}

} // namespace

const char* axis_name(Axis a) {
    switch (a) {
    case Axis::avg_snr_b_db: return "avg_snr_b_db";
    case Axis::ris_elements: return "ris_elements";
    case Axis::ports_b: return "ports_b";
    case Axis::area_b: return "area_b";
    case Axis::ports_e: return "ports_e";
    case Axis::area_e: return "area_e";
    case Axis::rate_bits: return "rate_bits";
    }
    return "?";
}

const char* output_name(Output o) {
    switch (o) {
    case Output::sop_glq: return "sop_glq";
    case Output::sop_reference: return "sop_reference";
    case Output::sop_mc: return "sop_mc";
    case Output::cdf_table: return "cdf_table";
    case Output::pdf_table: return "pdf_table";
    }
    return "?";
}

double ScenarioConfig::resolved_power_dbm() const {
    if (power_dbm) return *power_dbm;
    return avg_snr_b_db + noise_b_dbm + path_db(dist_ar_m, dist_rb_m, pathloss_exp);
}

double ScenarioConfig::resolved_avg_snr_b_db() const {
    return resolved_power_dbm() - noise_b_dbm - path_db(dist_ar_m, dist_rb_m, pathloss_exp);
}

double ScenarioConfig::resolved_avg_snr_e_db() const {
    if (avg_snr_e_db) return *avg_snr_e_db;
    return resolved_power_dbm() - noise_e_dbm - path_db(dist_ar_m, dist_re_m, pathloss_exp);
}

SecrecyScenario ScenarioConfig::build() const {
    if (!(pathloss_exp > 2.0)) throw ConfigError("field \"link.pathloss_exp\" must exceed 2");
    SecrecyScenario s;
    s.ris_elements = ris_elements;
    s.rate_bits = rate_bits;
    s.glq_order = glq_order;
    s.mvn_acc = mvn;
    try {
        s.bob = NodeModel::legitimate(bob_grid, ris_elements,
                                      db_to_linear(resolved_avg_snr_b_db()));
        s.eve = NodeModel::eavesdropper(eve_grid, ris_elements,
                                        db_to_linear(resolved_avg_snr_e_db()));
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return s;
}

void SweepSpec::validate() const {
    if (values.empty()) throw ConfigError("field \"sweep.values\" must be non-empty");
    const bool increasing = values.size() < 2 || values[1] > values[0];
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (increasing ? values[i] <= values[i - 1] : values[i] >= values[i - 1])
            throw ConfigError("field \"sweep.values\" must be strictly monotone");
    }
    if (outputs.empty()) throw ConfigError("field \"sweep.outputs\" must be non-empty");
    if (workers < 1) throw ConfigError("field \"workers\" must be positive");
    if (dist_points < 1) throw ConfigError("field \"dist.points\" must be positive");
    if (wants(*this, Output::sop_mc) && !mc_cfg)
        throw ConfigError("output sop_mc requires an \"mc\" block");
    try {
        base.mvn.validate();
        if (mc_cfg) mc_cfg->validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

SweepSpec parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    reject_unknown_keys(j,
                        {"ris_elements", "rate_bits", "glq_order", "workers", "master_seed",
                         "mvn", "link", "avg_snr_b_db", "avg_snr_e_db", "bob", "eve", "sweep",
                         "mc", "dist"},
                        "");

    SweepSpec spec;
    ScenarioConfig& c = spec.base;

    if (j.contains("ris_elements")) c.ris_elements = require_int(j["ris_elements"], "ris_elements");
    if (c.ris_elements < 1) throw ConfigError("field \"ris_elements\" must be >= 1");
    if (j.contains("rate_bits")) c.rate_bits = require_number(j["rate_bits"], "rate_bits");
    if (c.rate_bits < 0.0) throw ConfigError("field \"rate_bits\" must be nonnegative");
    if (j.contains("glq_order")) c.glq_order = require_int(j["glq_order"], "glq_order");
    if (c.glq_order < 1 || c.glq_order > 64)
        throw ConfigError("field \"glq_order\" must lie in [1, 64]");
    if (j.contains("workers")) spec.workers = require_int(j["workers"], "workers");
    if (j.contains("master_seed")) spec.master_seed = j["master_seed"].get<std::uint64_t>();

    if (j.contains("mvn")) {
        const json& m = j["mvn"];
        reject_unknown_keys(m, {"target_abs_error", "max_samples", "seed"}, "\"mvn\"");
        if (m.contains("target_abs_error"))
            c.mvn.target_abs_error = require_number(m["target_abs_error"], "mvn.target_abs_error");
        if (m.contains("max_samples")) c.mvn.max_samples = m["max_samples"].get<std::uint64_t>();
        if (m.contains("seed")) c.mvn.seed = m["seed"].get<std::uint64_t>();
        try {
            c.mvn.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string{"field \"mvn\": "} + e.what());
        }
    }

    if (j.contains("link")) {
        const json& l = j["link"];
        reject_unknown_keys(l,
                            {"power_dbm", "noise_b_dbm", "noise_e_dbm", "dist_ar_m", "dist_rb_m",
                             "dist_re_m", "pathloss_exp"},
                            "\"link\"");
        if (l.contains("power_dbm")) c.power_dbm = require_number(l["power_dbm"], "power_dbm");
        if (l.contains("noise_b_dbm"))
            c.noise_b_dbm = require_number(l["noise_b_dbm"], "noise_b_dbm");
        if (l.contains("noise_e_dbm"))
            c.noise_e_dbm = require_number(l["noise_e_dbm"], "noise_e_dbm");
        if (l.contains("dist_ar_m")) c.dist_ar_m = require_number(l["dist_ar_m"], "dist_ar_m");
        if (l.contains("dist_rb_m")) c.dist_rb_m = require_number(l["dist_rb_m"], "dist_rb_m");
        if (l.contains("dist_re_m")) c.dist_re_m = require_number(l["dist_re_m"], "dist_re_m");
        if (l.contains("pathloss_exp"))
            c.pathloss_exp = require_number(l["pathloss_exp"], "pathloss_exp");
        if (!(c.pathloss_exp > 2.0))
            throw ConfigError("field \"link.pathloss_exp\" must exceed 2");
        if (!(c.dist_ar_m > 0.0) || !(c.dist_rb_m > 0.0) || !(c.dist_re_m > 0.0))
            throw ConfigError("field \"link\": distances must be positive");
    }

    if (j.contains("avg_snr_b_db")) {
        c.avg_snr_b_db = require_number(j["avg_snr_b_db"], "avg_snr_b_db");
        c.power_dbm.reset(); // explicit Bob SNR wins over a configured power
    }
    if (j.contains("avg_snr_e_db"))
        c.avg_snr_e_db = require_number(j["avg_snr_e_db"], "avg_snr_e_db");

    if (j.contains("bob")) c.bob_grid = parse_grid(j["bob"], "\"bob\"", c.bob_grid);
    if (j.contains("eve")) c.eve_grid = parse_grid(j["eve"], "\"eve\"", c.eve_grid);

    if (j.contains("mc")) {
        const json& m = j["mc"];
        reject_unknown_keys(m, {"trials", "seed", "fidelity", "batch_size", "workers"}, "\"mc\"");
        mc::McConfig cfg;
        if (m.contains("trials")) cfg.trials = m["trials"].get<std::uint64_t>();
        if (m.contains("seed")) cfg.seed = m["seed"].get<std::uint64_t>();
        if (m.contains("batch_size")) cfg.batch_size = m["batch_size"].get<std::uint64_t>();
        if (m.contains("workers")) cfg.workers = require_int(m["workers"], "mc.workers");
        if (m.contains("fidelity")) {
            const std::string f = m["fidelity"].get<std::string>();
            if (f == "full")
                cfg.fidelity = mc::Fidelity::full;
            else if (f == "surrogate")
                cfg.fidelity = mc::Fidelity::surrogate;
            else
                throw ConfigError("field \"mc.fidelity\" must be \"full\" or \"surrogate\"");
        }
        try {
            cfg.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string{"field \"mc\": "} + e.what());
        }
        spec.mc_cfg = cfg;
    }

    if (j.contains("dist")) {
        const json& d = j["dist"];
        reject_unknown_keys(d, {"points", "gamma_max"}, "\"dist\"");
        if (d.contains("points")) spec.dist_points = require_int(d["points"], "dist.points");
        if (d.contains("gamma_max"))
            spec.dist_gamma_max = require_number(d["gamma_max"], "dist.gamma_max");
    }

    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        reject_unknown_keys(s, {"axis", "values", "outputs"}, "\"sweep\"");
        if (s.contains("axis")) spec.axis = parse_axis(s["axis"].get<std::string>());
        if (s.contains("values")) {
            spec.values.clear();
            for (const auto& v : s["values"])
                spec.values.push_back(require_number(v, "sweep.values"));
        }
        if (s.contains("outputs")) {
            spec.outputs.clear();
            for (const auto& o : s["outputs"])
                spec.outputs.push_back(parse_output(o.get<std::string>()));
        }
    }
    if (spec.values.empty()) spec.values = {spec.base.avg_snr_b_db};

    spec.validate();
    return spec;
}

SweepSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        return parse_config(json::object());
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string{"config parse error: "} + e.what());
    }
    return parse_config(j);
}

// ---- sweep evaluation -------------------------------------------------------

namespace {

void evaluate_point(const SweepSpec& spec, std::size_t idx, SweepRow& row) {
    const auto t0 = std::chrono::steady_clock::now();
    row.axis_value = spec.values[idx];
    try {
        ScenarioConfig cfg = spec.base;
        apply_axis(cfg, spec.axis, spec.values[idx]);
        SecrecyScenario sc = cfg.build();
        sc.mvn_acc.seed = mix_seed(spec.master_seed, 3 * idx + 1);

        const auto fill = [](Cell& cell, const SopResult& r) {
            cell.present = true;
            cell.value = r.value;
            cell.error = r.error;
            if (r.below_numerical_floor)
                cell.flag = "below_numerical_floor";
            else if (!r.accuracy_met)
                cell.flag = "accuracy";
        };
        if (wants(spec, Output::sop_glq)) fill(row.sop_glq, sop(sc, SopPath::glq));
        if (wants(spec, Output::sop_reference))
            fill(row.sop_reference, sop(sc, SopPath::reference));
        if (wants(spec, Output::sop_mc)) {
            mc::McConfig m = *spec.mc_cfg;
            m.seed = mix_seed(spec.master_seed, 3 * idx + 2);
            m.workers = 1; // points already run concurrently
            const mc::SopEstimate est = mc::empirical_sop(sc, m);
            row.sop_mc.present = true;
            row.sop_mc.value = est.estimate;
            row.sop_mc.error = 0.5 * (est.ci_hi - est.ci_lo);
            row.mc_ci_lo = est.ci_lo;
            row.mc_ci_hi = est.ci_hi;
            if (est.rule_of_three) row.sop_mc.flag = "rule_of_three";
        }
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    std::vector<SweepRow> rows(spec.values.size());
    const int workers = std::min<int>(spec.workers, static_cast<int>(spec.values.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            evaluate_point(spec, i, rows[i]);
            std::fprintf(stderr, "point %zu/%zu: %s=%g done (%.2fs)\n", i + 1, rows.size(),
                         axis_name(spec.axis), rows[i].axis_value, rows[i].wall_seconds);
        }
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= rows.size()) break;
                evaluate_point(spec, i, rows[i]);
            }
        });
    }
    for (auto& th : pool) th.join();
    return rows;
}

std::vector<DistRow> run_dist(const SweepSpec& spec) {
    SecrecyScenario sc = spec.base.build();
    sc.mvn_acc.seed = mix_seed(spec.master_seed, 1);

    double hi = spec.dist_gamma_max;
    if (!(hi > 0.0)) {
        // automatic range: past the 0.9999 quantile of both nodes
        const auto expand = [](const std::function<double(double)>& cdf, double start) {
            double x = start;
            while (cdf(x) < 0.9999) x *= 1.5;
            return x;
        };
        const double hb =
            expand([&](double g) { return cdf_gamma_b(g, sc).value; },
                   sc.bob.avg_snr * (sc.bob.clt.noncentrality + sc.bob.clt.variance));
        const double he = expand([&](double g) { return cdf_gamma_e(g, sc).value; },
                                 sc.eve.avg_snr * sc.ris_elements);
        hi = std::max(hb, he);
    }

    std::optional<mc::EmpiricalDistribution> mc_b, mc_e;
    if (spec.mc_cfg) {
        mc::McConfig m = *spec.mc_cfg;
        m.seed = mix_seed(spec.master_seed, 2);
        mc_b = mc::empirical_snr_cdf(sc.bob, sc.ris_elements, m);
        m.seed = mix_seed(spec.master_seed, 3);
        mc_e = mc::empirical_snr_cdf(sc.eve, sc.ris_elements, m);
    }

    std::vector<DistRow> rows(static_cast<std::size_t>(spec.dist_points));
    for (int i = 0; i < spec.dist_points; ++i) {
        DistRow& r = rows[static_cast<std::size_t>(i)];
        r.gamma = hi * (i + 1) / spec.dist_points;
        r.cdf_b = cdf_gamma_b(r.gamma, sc).value;
        r.pdf_b_paper = pdf_gamma_b(r.gamma, sc, PdfMode::paper);
        r.pdf_b_derivative = pdf_gamma_b(r.gamma, sc, PdfMode::derivative);
        r.cdf_e = cdf_gamma_e(r.gamma, sc).value;
        r.pdf_e_paper = pdf_gamma_e(r.gamma, sc, PdfMode::paper);
        r.pdf_e_derivative = pdf_gamma_e(r.gamma, sc, PdfMode::derivative);
        if (mc_b) r.mc_cdf_b = mc_b->cdf(r.gamma);
        if (mc_e) r.mc_cdf_e = mc_e->cdf(r.gamma);
    }
    return rows;
}

std::vector<ValidateRow> run_validate(const SweepSpec& spec) {
    SecrecyScenario sc = spec.base.build();
    sc.mvn_acc.seed = mix_seed(spec.master_seed, 1);
    mc::McConfig m = spec.mc_cfg.value_or(mc::McConfig{});

    std::vector<ValidateRow> rows;
    const auto ks_row = [&](const char* name, const NodeModel& node, mc::Fidelity fid,
                            const std::function<double(double)>& cdf, std::uint64_t salt) {
        mc::McConfig cfg = m;
        cfg.fidelity = fid;
        cfg.seed = mix_seed(spec.master_seed, salt);
        const auto emp = mc::empirical_snr_cdf(node, sc.ris_elements, cfg);
        ValidateRow r;
        r.metric = name;
        r.value = mc::ks_distance(emp, cdf);
        r.note = std::to_string(cfg.trials) + " trials";
        rows.push_back(r);
    };
    const auto cdf_b = [&](double x) { return cdf_gamma_b(x, sc).value; };
    const auto cdf_e = [&](double x) { return cdf_gamma_e(x, sc).value; };
    ks_row("ks_gamma_b_surrogate", sc.bob, mc::Fidelity::surrogate, cdf_b, 11);
    ks_row("ks_gamma_e_surrogate", sc.eve, mc::Fidelity::surrogate, cdf_e, 12);
    ks_row("ks_gamma_b_full", sc.bob, mc::Fidelity::full, cdf_b, 13);
    ks_row("ks_gamma_e_full", sc.eve, mc::Fidelity::full, cdf_e, 14);

    const SopResult glq = sop(sc, SopPath::glq);
    const SopResult ref = sop(sc, SopPath::reference);
    rows.push_back({"sop_glq", glq.value, glq.value - glq.error, glq.value + glq.error,
                    glq.below_numerical_floor ? "below_numerical_floor" : ""});
    rows.push_back({"sop_reference", ref.value, ref.value - ref.error, ref.value + ref.error,
                    ref.below_numerical_floor ? "below_numerical_floor" : ""});

    mc::McConfig sop_cfg = m;
    sop_cfg.seed = mix_seed(spec.master_seed, 15);
    const mc::SopEstimate est = mc::empirical_sop(sc, sop_cfg);
    rows.push_back({"sop_mc", est.estimate, est.ci_lo, est.ci_hi,
                    sop_cfg.fidelity == mc::Fidelity::full ? "full" : "surrogate"});
    if (est.estimate > 0.0)
        rows.push_back({"rel_error_reference_vs_mc",
                        std::abs(ref.value - est.estimate) / est.estimate, 0.0, 0.0, ""});
    return rows;
}

// ---- serialization ----------------------------------------------------------

std::string to_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << axis_name(spec.axis);
    if (wants(spec, Output::sop_glq)) out << ",sop_glq,sop_glq_err";
    if (wants(spec, Output::sop_reference)) out << ",sop_reference,sop_reference_err";
    if (wants(spec, Output::sop_mc)) out << ",sop_mc,sop_mc_ci_lo,sop_mc_ci_hi";
    out << ",flags\n";
    for (const auto& r : rows) {
        out << csv_field(format_axis(r.axis_value));
        std::string flags;
        const auto join = [&flags](const std::string& f) {
            if (f.empty()) return;
            if (!flags.empty()) flags += ';';
            flags += f;
        };
        if (wants(spec, Output::sop_glq)) {
            out << ',' << format_prob(r.sop_glq.value) << ',' << format_prob(r.sop_glq.error);
            if (!r.sop_glq.flag.empty()) join("sop_glq:" + r.sop_glq.flag);
        }
        if (wants(spec, Output::sop_reference)) {
            out << ',' << format_prob(r.sop_reference.value) << ','
                << format_prob(r.sop_reference.error);
            if (!r.sop_reference.flag.empty()) join("sop_reference:" + r.sop_reference.flag);
        }
        if (wants(spec, Output::sop_mc)) {
            out << ',' << format_prob(r.sop_mc.value) << ',' << format_prob(r.mc_ci_lo) << ','
                << format_prob(r.mc_ci_hi);
            if (!r.sop_mc.flag.empty()) join("sop_mc:" + r.sop_mc.flag);
        }
        if (!r.error.empty()) join("error:" + r.error);
        out << ',' << csv_field(flags) << '\n';
    }
    return out.str();
}

std::string to_csv(const std::vector<DistRow>& rows, bool with_mc) {
    std::ostringstream out;
    out << "gamma,cdf_gamma_b,pdf_gamma_b_paper,pdf_gamma_b_derivative,cdf_gamma_e,"
           "pdf_gamma_e_paper,pdf_gamma_e_derivative";
    if (with_mc) out << ",mc_cdf_gamma_b,mc_cdf_gamma_e";
    out << "\n";
    for (const auto& r : rows) {
        out << format_axis(r.gamma) << ',' << format_prob(r.cdf_b) << ','
            << format_prob(r.pdf_b_paper) << ',' << format_prob(r.pdf_b_derivative) << ','
            << format_prob(r.cdf_e) << ',' << format_prob(r.pdf_e_paper) << ','
            << format_prob(r.pdf_e_derivative);
        if (with_mc) out << ',' << format_prob(r.mc_cdf_b) << ',' << format_prob(r.mc_cdf_e);
        out << '\n';
    }
    return out.str();
}

std::string to_csv(const std::vector<ValidateRow>& rows) {
    std::ostringstream out;
    out << "metric,value,detail_lo,detail_hi,note\n";
    for (const auto& r : rows) {
        out << csv_field(r.metric) << ',' << format_prob(r.value) << ','
            << format_prob(r.detail_lo) << ',' << format_prob(r.detail_hi) << ','
            << csv_field(r.note) << '\n';
    }
    return out.str();
}

nlohmann::json meta_block(const SweepSpec& spec) {
    const ScenarioConfig& c = spec.base;
    json link{{"power_dbm", c.resolved_power_dbm()},
              {"noise_b_dbm", c.noise_b_dbm},
              {"noise_e_dbm", c.noise_e_dbm},
              {"dist_ar_m", c.dist_ar_m},
              {"dist_rb_m", c.dist_rb_m},
              {"dist_re_m", c.dist_re_m},
              {"pathloss_exp", c.pathloss_exp}};
    json meta{
        {"version", kVersion},
        {"ris_elements", c.ris_elements},
        {"rate_bits", c.rate_bits},
        {"glq_order", c.glq_order},
        {"link", link},
        {"avg_snr_b_db", c.resolved_avg_snr_b_db()},
        {"avg_snr_e_db", c.resolved_avg_snr_e_db()},
        {"avg_snr_e_mode", c.avg_snr_e_db ? "explicit" : "derived_from_link_budget"},
        {"bob",
         {{"n1", c.bob_grid.n1}, {"n2", c.bob_grid.n2}, {"w1", c.bob_grid.w1}, {"w2", c.bob_grid.w2}}},
        {"eve",
         {{"n1", c.eve_grid.n1}, {"n2", c.eve_grid.n2}, {"w1", c.eve_grid.w1}, {"w2", c.eve_grid.w2}}},
        {"mvn",
         {{"target_abs_error", c.mvn.target_abs_error},
          {"max_samples", c.mvn.max_samples},
          {"seed", c.mvn.seed}}},
        {"master_seed", spec.master_seed},
        {"workers", spec.workers},
        {"axis", axis_name(spec.axis)},
        {"axis_units", spec.axis == Axis::avg_snr_b_db
                           ? "dB"
                           : (spec.axis == Axis::area_b || spec.axis == Axis::area_e
                                  ? "wavelength^2 (square aperture)"
                                  : "count")},
        {"timestamp_utc", []() {
             char buf[32];
             const std::time_t now = std::time(nullptr);
             std::tm tm{};
             gmtime_r(&now, &tm);
             std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
             return std::string(buf);
         }()}};
    if (spec.mc_cfg) {
        meta["mc"] = {{"trials", spec.mc_cfg->trials},
                      {"seed", spec.mc_cfg->seed},
                      {"fidelity",
                       spec.mc_cfg->fidelity == mc::Fidelity::full ? "full" : "surrogate"},
                      {"batch_size", spec.mc_cfg->batch_size}};
    }
    json outs = json::array();
    for (Output o : spec.outputs) outs.push_back(output_name(o));
    meta["outputs"] = outs;
    return meta;
}

namespace {

json cell_json(const Cell& c) {
    json j{{"value", c.value}, {"error", c.error}};
    if (!c.flag.empty()) j["flag"] = c.flag;
    return j;
}

} // namespace

std::string to_json(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
    json root{{"meta", meta_block(spec)}};
    json jrows = json::array();
    for (const auto& r : rows) {
        json row{{axis_name(spec.axis), r.axis_value}, {"wall_seconds", r.wall_seconds}};
        if (r.sop_glq.present) row["sop_glq"] = cell_json(r.sop_glq);
        if (r.sop_reference.present) row["sop_reference"] = cell_json(r.sop_reference);
        if (r.sop_mc.present) {
            row["sop_mc"] = {
                {"value", r.sop_mc.value}, {"ci_lo", r.mc_ci_lo}, {"ci_hi", r.mc_ci_hi}};
            if (!r.sop_mc.flag.empty()) row["sop_mc"]["flag"] = r.sop_mc.flag;
        }
        if (!r.error.empty()) row["error"] = r.error;
        jrows.push_back(row);
    }
    root["rows"] = jrows;
    return root.dump(2) + "\n";
}

std::string to_json(const SweepSpec& spec, const std::vector<DistRow>& rows, bool with_mc) {
    json root{{"meta", meta_block(spec)}};
    json jrows = json::array();
    for (const auto& r : rows) {
        json row{{"gamma", r.gamma},
                 {"cdf_gamma_b", r.cdf_b},
                 {"pdf_gamma_b_paper", r.pdf_b_paper},
                 {"pdf_gamma_b_derivative", r.pdf_b_derivative},
                 {"cdf_gamma_e", r.cdf_e},
                 {"pdf_gamma_e_paper", r.pdf_e_paper},
                 {"pdf_gamma_e_derivative", r.pdf_e_derivative}};
        if (with_mc) {
            row["mc_cdf_gamma_b"] = r.mc_cdf_b;
            row["mc_cdf_gamma_e"] = r.mc_cdf_e;
        }
        jrows.push_back(row);
    }
    root["rows"] = jrows;
    return root.dump(2) + "\n";
}

std::string to_json(const SweepSpec& spec, const std::vector<ValidateRow>& rows) {
    json root{{"meta", meta_block(spec)}};
    json jrows = json::array();
    for (const auto& r : rows) {
        jrows.push_back({{"metric", r.metric},
                         {"value", r.value},
                         {"detail_lo", r.detail_lo},
                         {"detail_hi", r.detail_hi},
                         {"note", r.note}});
    }
    root["rows"] = jrows;
    return root.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output path: " + path);
    out << content;
    if (!out) throw ConfigError("failed writing output path: " + path);
}

} // namespace risfas::sweep
