#include <doctest.h>

#include <cmath>

#include "twolevel/scenario.hpp"

using namespace twolevel;

namespace {

const char* kBase = R"(name = "t"
[atom]
omega0 = 1.0
[grid]
t_max = 20.0
n_steps = 2000
[environment]
type = "modes"
omegas = [1.0]
couplings = [0.2]
)";

std::string load_error(const std::string& text, LoadOptions opt = {}) {
    try {
        load_plan(config::parse(text, "s.toml"), opt);
    } catch (const config::ConfigError& e) {
        return e.what();
    }
    return "no error";
}

}  // namespace

TEST_CASE("loads a plain scenario") {
    const auto plan = load_plan(config::parse(kBase, "s.toml"));
    REQUIRE(plan.points.size() == 1);
    const Scenario& s = plan.points[0];
    CHECK(s.name == "t");
    CHECK(s.model == Model::SigmaPM);
    CHECK(s.grid == TimeGrid(20.0, 2000));
    CHECK(s.initial.x == 0.0);
    CHECK(std::holds_alternative<ModeSet>(*s.environment));
}

TEST_CASE("schema errors name the field and its position") {
    CHECK(load_error(std::string(kBase) + "bogus = 1\n") == "s.toml:11:9: unknown key 'environment.bogus'");
    std::string neg = kBase;
    neg.replace(neg.find("omega0 = 1.0"), 12, "omega0 = -1.0");
    CHECK(load_error(neg) == "s.toml:3:10: atom.omega0: omega0 must be positive");
    std::string negw = kBase;
    negw.replace(negw.find("[1.0]"), 5, "[-1.0]");
    CHECK(load_error(negw) == "s.toml:9:10: environment.omegas: mode 0: frequency must be positive");
    CHECK(load_error("[atom]\nomega0 = 1\n") == "s.toml:1:1: missing required key 'grid.t_max'");
    CHECK(load_error(std::string(kBase) + "[initial]\nx = 0.5\ny_re = 0.9\n") ==
          "s.toml:11:1: initial: state is not a density matrix (need 0 <= x <= 1 and |y|^2 <= x(1 - x))");
    CHECK(load_error(std::string(kBase) + "[extra]\n").find("unknown table [extra]") != std::string::npos);
    std::string lor = R"([atom]
omega0 = 1
[grid]
t_max = 1
n_steps = 10
[environment]
type = "lorentzian"
center = 1
width = 0
weight = 1
)";
    CHECK(load_error(lor) == "s.toml:9:9: environment.width: lorentzian width must be positive");
}

TEST_CASE("sweeps") {
    const std::string sweep = std::string(kBase) + "[sweep]\nparameter = \"environment.couplings\"\nvalues = [0.1]\n";
    CHECK(load_error(sweep).find("is not a numeric key") != std::string::npos);

    const std::string unknown = std::string(kBase) + "[sweep]\nparameter = \"atom.frequency\"\nvalues = [1, 2]\n";
    CHECK(load_error(unknown) == "s.toml:12:13: sweep over unknown parameter path 'atom.frequency'");
    const std::string bad_table = std::string(kBase) + "[sweep]\nparameter = \"nowhere.x\"\nvalues = [1]\n";
    CHECK(load_error(bad_table).find("sweep over unknown parameter path") != std::string::npos);

    const std::string ok = std::string(kBase) + "[sweep]\nparameter = \"atom.omega0\"\nstart = 0.9\nstop = 1.1\ncount = 3\n";
    const auto plan = load_plan(config::parse(ok, "s.toml"));
    REQUIRE(plan.points.size() == 3);
    CHECK(plan.points[0].atom.omega0 == 0.9);
    CHECK(plan.points[2].atom.omega0 == doctest::Approx(1.1));
    CHECK(plan.sweep->parameter == "atom.omega0");

    const std::string empty = std::string(kBase) + "[sweep]\nparameter = \"atom.omega0\"\nvalues = []\n";
    CHECK(load_error(empty).find("values must be nonempty") != std::string::npos);
}

TEST_CASE("cavity environment resolution") {
    const std::string text = R"([atom]
omega0 = 100
[grid]
t_max = 1
step = 0.001
[environment]
type = "cavity"
length = 6.0
x_atom_fraction = 0.02
lambda = 10
omega_cutoff = 300
)";
    const auto plan = load_plan(config::parse(text, "c.toml"));
    const auto& c = std::get<CavityConfig>(*plan.points[0].environment);
    CHECK(c.x_atom == doctest::Approx(0.12));
    CHECK(c.n_modes == static_cast<std::size_t>(std::floor(300 * 6.0 / M_PI)));
    CHECK(plan.points[0].grid.n_steps() == 1000);

    std::string both = text + "x_atom = 0.1\n";
    CHECK(load_error(both).find("exactly one of x_atom or x_atom_fraction") != std::string::npos);
}

TEST_CASE("step override and forced model") {
    LoadOptions opt;
    opt.step_override = 0.05;
    opt.force_model = Model::Both;
    const auto plan = load_plan(config::parse(kBase, "s.toml"), opt);
    CHECK(plan.points[0].grid.n_steps() == 400);
    CHECK(plan.points[0].model == Model::Both);
}

TEST_CASE("run_point produces the documented CSV and record") {
    const auto plan = load_plan(config::parse(kBase, "s.toml"));
    const auto r = run_point(plan.points[0], "t");
    REQUIRE(r.files.size() == 1);
    const std::string& csv = r.files[0].contents;
    CHECK(csv.substr(0, csv.find('\n')) ==
          "t,u_re,u_im,abs_u,P_emission,rho_ee,rho_eg_re,rho_eg_im,gamma_t,omega_t,masked");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2002);
    CHECK(r.record["model"] == "sigma_pm");
    CHECK(r.record["T1"].is_number());
    CHECK(r.record["environment_digest"].get<std::string>().size() == 16);
}

TEST_CASE("digest follows the physics") {
    auto plan_a = load_plan(config::parse(kBase, "s.toml"));
    std::string other = kBase;
    other.replace(other.find("[0.2]"), 5, "[0.3]");
    auto plan_b = load_plan(config::parse(other, "s.toml"));
    CHECK(environment_digest(plan_a.points[0]) == environment_digest(load_plan(config::parse(kBase, "x.toml")).points[0]));
    CHECK(environment_digest(plan_a.points[0]) != environment_digest(plan_b.points[0]));
}

TEST_CASE("local extrema") {
    const auto [mx, mn] = local_extrema({1, 3, 2, NAN, 5, 1, 0, 4, 2});
    CHECK(mx == std::vector<std::size_t>{1, 7});
    CHECK(mn == std::vector<std::size_t>{6});
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e22}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(NAN) == "nan");
}
