#include "twolevel/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "twolevel/dephasing.hpp"
#include "twolevel/evolution.hpp"
#include "twolevel/volterra.hpp"

namespace twolevel {

using config::Location;
using config::Value;
using json = nlohmann::ordered_json;

const char* model_name(Model m) {
    switch (m) {
        case Model::SigmaPM: return "sigma_pm";
        case Model::SigmaZ: return "sigma_z";
        case Model::Both: return "both";
        case Model::JCOracle: return "jc_oracle";
        case Model::SingleExcitationOracle: return "single_excitation_oracle";
    }
    return "?";
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

const std::set<std::string> kTables = {"", "atom", "initial", "grid", "environment", "dephasing", "jc", "sweep"};

std::string key_path(const std::string& table, const std::string& key) {
    return table.empty() ? key : table + "." + key;
}

// Typed, consumption-tracking access to a parsed document.
class Reader {
public:
    explicit Reader(const config::Document& doc) : doc_(doc) {}

    const config::Document& doc() const { return doc_; }

    [[noreturn]] void fail(Location loc, const std::string& message) const { doc_.fail(loc, message); }

    bool has_table(const std::string& t) const { return doc_.find_table(t) != nullptr; }

    bool consumed(const std::string& t, const std::string& k) const { return consumed_.count({t, k}) > 0; }

    Location table_loc(const std::string& t) const {
        const auto* tab = doc_.find_table(t);
        return tab ? tab->loc : Location{1, 1};
    }

    const Value* get(const std::string& t, const std::string& k) {
        consumed_.insert({t, k});
        return doc_.find(t, k);
    }

    const Value& require(const std::string& t, const std::string& k) {
        const Value* v = get(t, k);
        if (!v) fail(table_loc(t), "missing required key '" + key_path(t, k) + "'");
        return *v;
    }

    double as_number(const std::string& t, const std::string& k, const Value& v) const {
        if (!v.is_number()) fail(v.loc, key_path(t, k) + ": expected a number, got " + v.type_name());
        const double x = std::get<double>(v.data);
        if (!std::isfinite(x)) fail(v.loc, key_path(t, k) + ": value must be finite");
        return x;
    }

    double number(const std::string& t, const std::string& k) { return as_number(t, k, require(t, k)); }

    std::optional<double> opt_number(const std::string& t, const std::string& k) {
        const Value* v = get(t, k);
        if (!v) return std::nullopt;
        return as_number(t, k, *v);
    }

    double positive(const std::string& t, const std::string& k) {
        const double x = number(t, k);
        if (!(x > 0.0)) fail(require(t, k).loc, key_path(t, k) + " must be positive");
        return x;
    }

    std::size_t as_count(const std::string& t, const std::string& k, const Value& v) const {
        const double x = as_number(t, k, v);
        if (x < 0.0 || x != std::floor(x) || x > 1e12)
            fail(v.loc, key_path(t, k) + ": expected a non-negative integer");
        return static_cast<std::size_t>(x);
    }

    std::size_t count(const std::string& t, const std::string& k) { return as_count(t, k, require(t, k)); }

    std::optional<std::size_t> opt_count(const std::string& t, const std::string& k) {
        const Value* v = get(t, k);
        if (!v) return std::nullopt;
        return as_count(t, k, *v);
    }

    std::string string(const std::string& t, const std::string& k) {
        const Value& v = require(t, k);
        if (!v.is_string()) fail(v.loc, key_path(t, k) + ": expected a string, got " + v.type_name());
        return std::get<std::string>(v.data);
    }

    std::optional<std::string> opt_string(const std::string& t, const std::string& k) {
        if (!doc_.find(t, k)) {
            get(t, k);
            return std::nullopt;
        }
        return string(t, k);
    }

    std::vector<double> numbers(const std::string& t, const std::string& k) {
        const Value& v = require(t, k);
        if (!v.is_array()) fail(v.loc, key_path(t, k) + ": expected an array of numbers");
        std::vector<double> out;
        for (const auto& e : std::get<config::Array>(v.data)) out.push_back(as_number(t, k, e));
        return out;
    }

    std::vector<std::string> strings(const std::string& t, const std::string& k) {
        const Value& v = require(t, k);
        if (!v.is_array()) fail(v.loc, key_path(t, k) + ": expected an array of strings");
        std::vector<std::string> out;
        for (const auto& e : std::get<config::Array>(v.data)) {
            if (!e.is_string()) fail(e.loc, key_path(t, k) + ": expected a string, got " + e.type_name());
            out.push_back(std::get<std::string>(e.data));
        }
        return out;
    }

    // Runs a constructor; std::invalid_argument becomes a located config error.
    // The location is the first key of `table` that the message mentions.
    template <class F>
    auto guard(const std::string& table, F&& f) -> decltype(f()) {
        try {
            return f();
        } catch (const std::invalid_argument& e) {
            const std::string msg = e.what();
            Location loc = table_loc(table);
            std::string path = table.empty() ? "config" : "[" + table + "]";
            if (const auto* tab = doc_.find_table(table)) {
                std::size_t best = 0;
                for (const auto& [k, v] : tab->entries) {
                    if (k.size() > best && msg.find(k) != std::string::npos) {
                        best = k.size();
                        loc = v.loc;
                        path = key_path(table, k);
                    }
                }
            }
            fail(loc, path + ": " + msg);
        }
    }

    void check_all_consumed() const {
        for (const auto& [name, tab] : doc_.tables) {
            if (!kTables.count(name)) fail(tab.loc, "unknown table [" + name + "]");
            for (const auto& [k, v] : tab.entries)
                if (!consumed(name, k)) fail(v.loc, "unknown key '" + key_path(name, k) + "'");
        }
    }

private:
    const config::Document& doc_;
    std::set<std::pair<std::string, std::string>> consumed_;
};

Model parse_model(Reader& r) {
    const auto name = r.opt_string("", "model");
    if (!name) return Model::SigmaPM;
    for (Model m : {Model::SigmaPM, Model::SigmaZ, Model::Both, Model::JCOracle, Model::SingleExcitationOracle})
        if (*name == model_name(m)) return m;
    r.fail(r.get("", "model")->loc,
           "model: unknown model '" + *name + "' (expected sigma_pm, sigma_z, both, jc_oracle or single_excitation_oracle)");
}

TimeGrid parse_grid(Reader& r, const LoadOptions& opt) {
    const double t_max = r.positive("grid", "t_max");
    const auto n = r.opt_count("grid", "n_steps");
    const auto h = r.opt_number("grid", "step");
    if (n && h) r.fail(r.get("grid", "step")->loc, "give either grid.n_steps or grid.step, not both");
    if (!n && !h && !opt.step_override) r.fail(r.table_loc("grid"), "grid needs n_steps or step");
    double step = opt.step_override ? *opt.step_override : h.value_or(0.0);
    std::size_t steps = n.value_or(0);
    if (opt.step_override || h) {
        if (!(step > 0.0)) r.fail(h ? r.get("grid", "step")->loc : r.table_loc("grid"), "grid.step must be positive");
        steps = static_cast<std::size_t>(std::ceil(t_max / step - 1e-9));
    }
    if (steps < 2) r.fail(r.table_loc("grid"), "grid needs at least 2 steps");
    return TimeGrid(t_max, steps);
}

TwoLevelState parse_initial(Reader& r) {
    TwoLevelState s;
    s.x = r.opt_number("initial", "x").value_or(0.0);
    s.y = cplx(r.opt_number("initial", "y_re").value_or(0.0), r.opt_number("initial", "y_im").value_or(0.0));
    if (!validate_state(s))
        r.fail(r.table_loc("initial"),
               "initial: state is not a density matrix (need 0 <= x <= 1 and |y|^2 <= x(1 - x))");
    return s;
}

Environment parse_environment(Reader& r) {
    const std::string t = "environment";
    const std::string type = r.string(t, "type");
    if (type == "modes") {
        const auto omegas = r.numbers(t, "omegas");
        const auto couplings = r.numbers(t, "couplings");
        if (omegas.size() != couplings.size())
            r.fail(r.get(t, "couplings")->loc, "environment.couplings: length differs from environment.omegas");
        std::vector<Mode> modes;
        for (std::size_t k = 0; k < omegas.size(); ++k) modes.push_back({omegas[k], couplings[k]});
        try {
            return ModeSet(std::move(modes));
        } catch (const std::invalid_argument& e) {
            r.fail(r.get(t, "omegas")->loc, std::string("environment.omegas: ") + e.what());
        }
    }
    if (type == "lorentzian") {
        Lorentzian l{r.number(t, "center"), r.number(t, "width"), r.number(t, "weight")};
        return r.guard(t, [&] { return SpectralDensity(l); });
    }
    if (type == "flat_band") {
        FlatBand f{r.number(t, "omega_min"), r.number(t, "omega_max"), r.number(t, "density"), r.number(t, "g")};
        return r.guard(t, [&] { return SpectralDensity(f); });
    }
    if (type == "ohmic") {
        OhmicFamily o{r.number(t, "exponent"), r.number(t, "scale"), r.number(t, "cutoff")};
        if (!(o.exponent > -1.0))
            r.fail(r.get(t, "exponent")->loc, "environment.exponent: must exceed -1 (non-integrable density)");
        return r.guard(t, [&] { return SpectralDensity(o); });
    }
    if (type == "cavity") {
        const double length = r.positive(t, "length");
        const double lambda = r.number(t, "lambda");
        const auto x = r.opt_number(t, "x_atom");
        const auto frac = r.opt_number(t, "x_atom_fraction");
        if (x.has_value() == frac.has_value())
            r.fail(r.table_loc(t), "environment: give exactly one of x_atom or x_atom_fraction");
        const auto n = r.opt_count(t, "n_modes");
        const auto cut = r.opt_number(t, "omega_cutoff");
        if (n.has_value() == cut.has_value())
            r.fail(r.table_loc(t), "environment: give exactly one of n_modes or omega_cutoff");
        const double x_atom = x ? *x : *frac * length;
        const std::size_t modes = n ? *n : static_cast<std::size_t>(std::floor(*cut * length / std::numbers::pi));
        return r.guard(t, [&] { return CavityConfig(length, x_atom, lambda, modes); });
    }
    r.fail(r.get(t, "type")->loc,
           "environment.type: unknown type '" + type + "' (expected modes, lorentzian, flat_band, ohmic or cavity)");
}

JCConfig parse_jc(Reader& r, double omega0) {
    const std::string t = "jc";
    const double g = r.number(t, "g");
    const double omega_c = r.opt_number(t, "omega_c").value_or(omega0);
    const std::string field = r.string(t, "field");
    const std::size_t cutoff = r.count(t, "fock_cutoff");
    std::variant<FockState, CoherentState> state;
    if (field == "fock") {
        state = FockState{r.count(t, "n")};
    } else if (field == "coherent") {
        state = CoherentState{r.number(t, "n_bar")};
    } else {
        r.fail(r.get(t, "field")->loc, "jc.field: expected \"fock\" or \"coherent\"");
    }
    return r.guard(t, [&] { return JCConfig(g, omega0, omega_c, state, cutoff); });
}

std::optional<SweepSpec> parse_sweep(Reader& r) {
    const std::string t = "sweep";
    if (!r.has_table(t)) return std::nullopt;
    SweepSpec s;
    s.parameter = r.string(t, "parameter");
    if (r.doc().find(t, "values")) {
        s.values = r.numbers(t, "values");
        if (r.doc().find(t, "start") || r.doc().find(t, "stop") || r.doc().find(t, "count"))
            r.fail(r.get(t, "values")->loc, "sweep: give either values or start/stop/count");
    } else {
        const double a = r.number(t, "start"), b = r.number(t, "stop");
        const std::size_t n = r.count(t, "count");
        if (n < 1) r.fail(r.get(t, "count")->loc, "sweep.count must be at least 1");
        for (std::size_t j = 0; j < n; ++j)
            s.values.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(j) / static_cast<double>(n - 1));
    }
    if (s.values.empty()) r.fail(r.get(t, "parameter")->loc, "sweep: values must be nonempty");
    return s;
}

struct Built {
    Scenario scenario;
    std::optional<SweepSpec> sweep;
};

Built build(Reader& r, const LoadOptions& opt, const std::string& default_name) {
    Built b;
    Scenario& s = b.scenario;
    s.name = r.opt_string("", "name").value_or(default_name);
    if (s.name.empty() || s.name.find_first_of("/\\") != std::string::npos)
        r.fail(r.table_loc(""), "name must be a non-empty file-name-safe string");
    s.model = opt.force_model ? *opt.force_model : parse_model(r);
    if (opt.force_model) r.get("", "model");

    s.atom = r.guard("atom", [&] { return TwoLevelParams(r.number("atom", "omega0")); });
    s.initial = parse_initial(r);
    s.grid = parse_grid(r, opt);

    if (s.model == Model::JCOracle) {
        if (r.has_table("environment"))
            r.fail(r.table_loc("environment"), "model jc_oracle takes its field from [jc], not [environment]");
        s.jc = parse_jc(r, s.atom.omega0);
    } else {
        if (!r.has_table("environment")) r.fail(r.table_loc(""), "missing [environment] table");
        s.environment = parse_environment(r);
        if (const auto k = r.opt_count("environment", "discretization_modes")) {
            if (*k < 1) r.fail(r.get("environment", "discretization_modes")->loc,
                               "environment.discretization_modes must be at least 1");
            s.discretization_modes = *k;
        }
    }

    if (const auto c = r.opt_number("dephasing", "z_coupling_scale")) s.z_coupling_scale = *c;
    if (const auto f = r.opt_number("", "amplitude_floor")) {
        if (!(*f > 0.0)) r.fail(r.get("", "amplitude_floor")->loc, "amplitude_floor must be positive");
        s.amplitude_floor = *f;
    }
    if (r.doc().find("", "outputs")) {
        s.write_csv = s.write_summary = false;
        for (const auto& o : r.strings("", "outputs")) {
            if (o == "csv")
                s.write_csv = true;
            else if (o == "summary")
                s.write_summary = true;
            else
                r.fail(r.get("", "outputs")->loc, "outputs: unknown entry '" + o + "' (expected csv or summary)");
        }
    } else {
        r.get("", "outputs");
    }
    b.sweep = parse_sweep(r);
    return b;
}

std::pair<std::string, std::string> split_path(const std::string& p) {
    const auto dot = p.find('.');
    if (dot == std::string::npos) return {"", p};
    return {p.substr(0, dot), p.substr(dot + 1)};
}

}  // namespace

ScenarioPlan load_plan(const config::Document& doc, const LoadOptions& opt) {
    std::string default_name = std::filesystem::path(doc.source).stem().string();
    if (default_name.empty() || default_name.front() == '<') default_name = "scenario";

    Reader base(doc);
    Built b = build(base, opt, default_name);

    ScenarioPlan plan;
    plan.name = b.scenario.name;
    plan.sweep = b.sweep;
    if (!b.sweep) {
        base.check_all_consumed();
        plan.points.push_back(std::move(b.scenario));
        return plan;
    }

    const Location sweep_loc = doc.find("sweep", "parameter")->loc;
    const auto [table, key] = split_path(b.sweep->parameter);
    if (table == "sweep") doc.fail(sweep_loc, "sweep.parameter cannot refer to the [sweep] table");
    if (const Value* existing = doc.find(table, key); existing && !existing->is_number())
        doc.fail(sweep_loc, "sweep.parameter '" + b.sweep->parameter + "' is not a numeric key");
    if (!kTables.count(table)) doc.fail(sweep_loc, "sweep over unknown parameter path '" + b.sweep->parameter + "'");

    for (double v : b.sweep->values) {
        config::Document d = doc;
        d.set_number(table, key, v, sweep_loc);
        Reader r(d);
        Built point = build(r, opt, default_name);
        if (!r.consumed(table, key) || (table.empty() && (key == "name" || key == "model")))
            doc.fail(sweep_loc, "sweep over unknown parameter path '" + b.sweep->parameter + "'");
        r.check_all_consumed();
        plan.points.push_back(std::move(point.scenario));
    }
    return plan;
}

ScenarioPlan load_plan_file(const std::string& path, const LoadOptions& opt) {
    return load_plan(config::parse_file(path), opt);
}

namespace {

ModeSet resolved_modes(const Scenario& s) {
    const Environment& env = *s.environment;
    if (const auto* m = std::get_if<ModeSet>(&env)) return *m;
    if (const auto* c = std::get_if<CavityConfig>(&env)) return cavity_mode_set(*c);
    return discretize(std::get<SpectralDensity>(env), s.discretization_modes);
}

MemoryKernel resolved_kernel(const Scenario& s) {
    const Environment& env = *s.environment;
    if (const auto* d = std::get_if<SpectralDensity>(&env)) return kernel_from_spectral_density(*d, s.grid);
    return kernel_from_modes(resolved_modes(s));
}

void append_modes(std::ostringstream& os, const ModeSet& m) {
    for (const auto& md : m.modes()) os << " (" << format_double(md.omega) << "," << format_double(md.g) << ")";
}

std::string fnv1a(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json finite_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void add_timescales(json& rec, const Trajectory& tr) {
    try {
        const Timescales ts = extract_timescales(tr);
        rec["T1"] = optional_json(ts.t1);
        rec["T2"] = optional_json(ts.t2);
        rec["T1_over_T2"] = (ts.t1 && ts.t2 && *ts.t2 > 0.0) ? json(*ts.t1 / *ts.t2) : json(nullptr);
        rec["Gamma_fit"] = optional_json(ts.gamma_fit());
        rec["Gamma_fit_raw"] = finite_json(ts.gamma_fit_raw);
        rec["fit_quality"] = ts.fit_quality;
    } catch (const NumericalError& e) {
        for (const char* k : {"T1", "T2", "T1_over_T2", "Gamma_fit", "Gamma_fit_raw", "fit_quality"}) rec[k] = nullptr;
        rec["warnings"].push_back(e.what());
    }
}

void null_timescales(json& rec) {
    for (const char* k : {"T1", "T2", "T1_over_T2", "Gamma_fit", "Gamma_fit_raw", "fit_quality"}) rec[k] = nullptr;
}

std::string amplitude_csv(const Amplitude& a, const Trajectory& tr, const RateFunctions& rates) {
    const auto p = emission_probability(a);
    std::string out = "t,u_re,u_im,abs_u,P_emission,rho_ee,rho_eg_re,rho_eg_im,gamma_t,omega_t,masked\n";
    for (std::size_t j = 0; j < a.u().size(); ++j) {
        const cplx u = a.u()[j];
        const cplx y = tr.states[j].y;
        for (double v : {a.grid().at(j), u.real(), u.imag(), std::abs(u), p[j], tr.rho_ee[j], y.real(), y.imag(),
                         rates.gamma[j], rates.omega[j]}) {
            out += format_double(v);
            out += ',';
        }
        out += rates.mask[j] ? "1\n" : "0\n";
    }
    return out;
}

std::string dephasing_csv(const DephasingResult& z, const TwoLevelState& s0) {
    std::string out = "t,coherence,phase,rho_ee,rho_eg_re,rho_eg_im\n";
    for (std::size_t j = 0; j < z.coherence.size(); ++j) {
        const cplx y = s0.y * z.coherence[j] * std::polar(1.0, z.phase[j]);
        for (double v : {z.grid.at(j), z.coherence[j], z.phase[j], s0.rho_ee(), y.real()}) {
            out += format_double(v);
            out += ',';
        }
        out += format_double(y.imag());
        out += '\n';
    }
    return out;
}

std::string jc_csv(const JCResult& r) {
    std::string out = "t,P_e,W,norm,excitation_number\n";
    for (std::size_t j = 0; j < r.inversion.size(); ++j) {
        out += format_double(r.grid.at(j)) + ',' + format_double(r.excited_population[j]) + ',' +
               format_double(r.inversion[j]) + ',' + format_double(r.norm[j]) + ',' +
               format_double(r.excitation_number[j]) + '\n';
    }
    return out;
}

void run_jc(const Scenario& s, const std::string& stem, PointResult& out) {
    const JCConfig& c = *s.jc;
    const JCResult r = jc_evolve(c, s.grid);
    out.files.push_back({stem + ".csv", jc_csv(r)});
    json& rec = out.record;
    null_timescales(rec);
    double norm_err = 0.0, exc_drift = 0.0;
    for (std::size_t j = 0; j < r.norm.size(); ++j) {
        norm_err = std::max(norm_err, std::abs(r.norm[j] - 1.0));
        exc_drift = std::max(exc_drift, std::abs(r.excitation_number[j] - r.excitation_number.front()));
    }
    rec["max_norm_error"] = norm_err;
    rec["excitation_number_drift"] = exc_drift;
    if (const auto* f = std::get_if<FockState>(&c.field)) {
        rec["field"] = "fock";
        rec["n"] = f->n;
        rec["expected_rabi_frequency"] = c.g * std::sqrt(static_cast<double>(f->n) + 1.0);
        try {
            rec["rabi_frequency"] = rabi_frequency(r);
        } catch (const NumericalError& e) {
            rec["rabi_frequency"] = nullptr;
            rec["warnings"].push_back(e.what());
        }
    } else {
        const double nb = std::get<CoherentState>(c.field).n_bar;
        const CollapseRevival cr = analyze_collapse_revival(r, c.g, nb);
        rec["field"] = "coherent";
        rec["n_bar"] = nb;
        rec["expected_revival_time"] = cr.expected_revival;
        rec["revival_time"] = finite_json(cr.revival_time);
        rec["collapse_time"] = optional_json(cr.collapse_time);
    }
}

}  // namespace

std::string environment_description(const Scenario& s) {
    std::ostringstream os;
    if (s.jc) {
        const JCConfig& c = *s.jc;
        os << "jc g=" << format_double(c.g) << " omega_c=" << format_double(c.omega_c) << " cutoff=" << c.fock_cutoff;
        if (const auto* f = std::get_if<FockState>(&c.field))
            os << " fock=" << f->n;
        else
            os << " coherent=" << format_double(std::get<CoherentState>(c.field).n_bar);
        return os.str();
    }
    const Environment& env = *s.environment;
    if (const auto* m = std::get_if<ModeSet>(&env)) {
        os << "modes";
        append_modes(os, *m);
    } else if (const auto* c = std::get_if<CavityConfig>(&env)) {
        os << "cavity L=" << format_double(c->length) << " x=" << format_double(c->x_atom)
           << " lambda=" << format_double(c->lambda) << " N=" << c->n_modes;
    } else {
        const auto& kind = std::get<SpectralDensity>(env).kind();
        if (const auto* l = std::get_if<Lorentzian>(&kind))
            os << "lorentzian center=" << format_double(l->center) << " width=" << format_double(l->width)
               << " weight=" << format_double(l->weight);
        else if (const auto* f = std::get_if<FlatBand>(&kind))
            os << "flat_band omega_min=" << format_double(f->omega_min) << " omega_max=" << format_double(f->omega_max)
               << " density=" << format_double(f->density) << " g=" << format_double(f->g);
        else {
            const auto& o = std::get<OhmicFamily>(kind);
            os << "ohmic exponent=" << format_double(o.exponent) << " scale=" << format_double(o.scale)
               << " cutoff=" << format_double(o.cutoff);
        }
        if (s.model == Model::SigmaZ || s.model == Model::Both || s.model == Model::SingleExcitationOracle)
            os << " discretization_modes=" << s.discretization_modes;
    }
    return os.str();
}

std::string environment_digest(const Scenario& s) { return fnv1a(environment_description(s)); }

PointResult run_point(const Scenario& s, const std::string& stem) {
    PointResult out;
    json& rec = out.record;
    rec["name"] = stem;
    rec["model"] = model_name(s.model);
    rec["environment_digest"] = environment_digest(s);
    rec["csv"] = stem + ".csv";
    rec["warnings"] = json::array();

    if (s.model == Model::JCOracle) {
        run_jc(s, stem, out);
        return out;
    }

    if (s.model == Model::SigmaZ) {
        const DephasingResult z =
            dephasing_coherence(resolved_modes(s), s.grid, {s.z_coupling_scale, s.atom.omega0});
        out.files.push_back({stem + ".csv", dephasing_csv(z, s.initial)});
        null_timescales(rec);
        rec["T2"] = optional_json(first_crossing(s.grid, z.coherence, std::exp(-1.0)));
        rec["population_drift"] = z.population_drift;
        return out;
    }

    const Amplitude a = s.model == Model::SingleExcitationOracle
                            ? single_excitation_evolve(SingleExcitationSystem(s.atom, resolved_modes(s)), s.grid)
                            : solve_u(resolved_kernel(s), s.atom, s.grid);
    const Trajectory tr = propagate(a, s.initial);
    const RateFunctions rates = rates_from_u(a, s.amplitude_floor);
    out.files.push_back({stem + ".csv", amplitude_csv(a, tr, rates)});
    add_timescales(rec, tr);

    if (s.model == Model::Both) {
        const DephasingResult z =
            dephasing_coherence(resolved_modes(s), s.grid, {s.z_coupling_scale, s.atom.omega0});
        out.files.push_back({stem + "_sigma_z.csv", dephasing_csv(z, s.initial)});
        const ComparisonReport rep = compare_models(tr, z);
        rec["sigma_z"] = {{"csv", stem + "_sigma_z.csv"},
                          {"T2", optional_json(rep.sigma_z.t2)},
                          {"population_drift", rep.sigma_z_population_drift}};
        rec["coherence_time_ratio"] = optional_json(rep.coherence_time_ratio);
        out.comparison = rep.render();
    }
    return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> local_extrema(const std::vector<double>& v) {
    std::vector<std::size_t> maxima, minima;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (!(std::isfinite(v[i - 1]) && std::isfinite(v[i]) && std::isfinite(v[i + 1]))) continue;
        if (v[i] > v[i - 1] && v[i] > v[i + 1]) maxima.push_back(i);
        if (v[i] < v[i - 1] && v[i] < v[i + 1]) minima.push_back(i);
    }
    return {maxima, minima};
}

PlanResult run_plan(const ScenarioPlan& plan, unsigned threads) {
    const std::size_t n = plan.points.size();
    std::vector<std::string> stems(n);
    const std::size_t width = std::to_string(n > 0 ? n - 1 : 0).size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!plan.sweep) {
            stems[i] = plan.name;
        } else {
            std::string idx = std::to_string(i);
            stems[i] = plan.name + "_" + std::string(width - idx.size(), '0') + idx;
        }
    }

    std::vector<std::optional<PointResult>> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                results[i] = run_point(plan.points[i], stems[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned workers = static_cast<unsigned>(std::clamp<std::size_t>(threads == 0 ? 1 : threads, 1, std::max<std::size_t>(n, 1)));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    PlanResult out;
    for (auto& r : results) out.points.push_back(std::move(*r));

    const MasterEquationConvention& conv = calibrated_convention();
    json summary;
    summary["name"] = plan.name;
    summary["units"] = "hbar = c = 1";
    summary["me_convention"] = {{"gamma_sign", conv.gamma_sign}, {"omega_sign", conv.omega_sign},
                                {"description", conv.describe()}};
    if (plan.sweep) {
        std::vector<double> metric;
        for (const auto& p : out.points) {
            const auto& g = p.record["Gamma_fit_raw"];
            metric.push_back(g.is_number() ? g.get<double>() : std::numeric_limits<double>::quiet_NaN());
        }
        const auto [maxima, minima] = local_extrema(metric);
        json sw;
        sw["parameter"] = plan.sweep->parameter;
        sw["values"] = plan.sweep->values;
        sw["extrema_metric"] = "Gamma_fit_raw";
        sw["local_maxima"] = json::array();
        sw["local_minima"] = json::array();
        for (auto i : maxima) sw["local_maxima"].push_back(plan.sweep->values[i]);
        for (auto i : minima) sw["local_minima"].push_back(plan.sweep->values[i]);
        for (std::size_t i = 0; i < n; ++i) {
            json& rec = out.points[i].record;
            rec["sweep_value"] = plan.sweep->values[i];
            rec["local_max"] = std::find(maxima.begin(), maxima.end(), i) != maxima.end();
            rec["local_min"] = std::find(minima.begin(), minima.end(), i) != minima.end();
        }
        summary["sweep"] = std::move(sw);
    } else {
        summary["sweep"] = nullptr;
    }
    summary["records"] = json::array();
    for (const auto& p : out.points) summary["records"].push_back(p.record);
    out.summary = std::move(summary);
    return out;
}

void write_outputs(const ScenarioPlan& plan, const PlanResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        f << text;
    };
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        if (!plan.points[i].write_csv) continue;
        for (const auto& file : result.points[i].files) write(file.name, file.contents);
    }
    if (plan.points.empty() || plan.points.front().write_summary) write("summary.json", result.summary.dump(2) + "\n");
}

}  // namespace twolevel
