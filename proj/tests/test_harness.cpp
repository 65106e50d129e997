#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wqed/errors.hpp"
#include "wqed/harness/compare.hpp"
#include "wqed/harness/config.hpp"
#include "wqed/harness/io.hpp"
#include "wqed/harness/run.hpp"

using namespace wqed;
using namespace wqed::harness;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test");
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("wqed_harness_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string meta_value(const CsvTable& t, const std::string& key) {
    for (const auto& [k, v] : t.meta)
        if (k == key) return v;
    return {};
}

Eigen::MatrixXd read_map(const fs::path& p) {
    const auto t = read_csv(p);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(t.rows.front().size()));
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (std::size_t j = 0; j < t.rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t.rows[i][j];
    return m;
}

} // namespace

TEST_CASE("configuration defaults and explicit keys") {
    const auto cfg = parse("engine = mps\ncoupling = chiral\nphotons = 1, 2, 4\nt_c = 2.5\n# comment\ndt = 0.01\n");
    CHECK(cfg.engine == Engine::Mps);
    CHECK(cfg.system.mode == Coupling::ChiralRight);
    CHECK(cfg.system.gamma_R == 1.0);
    CHECK(cfg.system.gamma_L == 0.0);
    CHECK(cfg.photons == std::vector<int>{1, 2, 4});
    CHECK(cfg.t_c == 2.5);
    CHECK(cfg.dt == 0.01);

    const auto sym = parse("coupling = symmetric\n");
    CHECK(sym.system.gamma_R == 0.5);
    CHECK(sym.system.gamma_L == 0.5);
}

TEST_CASE("bad configurations are rejected with ConfigError") {
    CHECK_THROWS_AS(parse("frobnicate = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse("coupling = chiral\ngamma_l = 0.2\n"), ConfigError);
    CHECK_THROWS_AS(parse("engine = compare\nphotons = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse("coupling = chiral\nchannels = LL\n"), ConfigError);
    CHECK_THROWS_AS(parse("dt = banana\n"), ConfigError);
    CHECK_THROWS_AS(parse("engine\n"), ConfigError);
    try {
        parse("coupling = symmetric\nbogus = 1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        // The message points at the offending line.
        CHECK(std::string(e.what()).find("test") != std::string::npos);
        CHECK(std::string(e.what()).find('2') != std::string::npos);
    }
}

TEST_CASE("series comparison metrics") {
    const Axis axis{"t", 0.0, 0.1, 50};
    std::vector<double> a(50);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::sin(0.1 * static_cast<double>(i)) + 2.0;
    const auto same = compare_series("same", axis, a, axis, a, 0.02);
    CHECK(same.linf == 0.0);
    CHECK(same.l2 == 0.0);
    CHECK(same.pass);

    std::vector<double> b = a;
    for (auto& v : b) v *= 1.05;
    const auto scaled = compare_series("scaled", axis, a, axis, b, 0.02);
    CHECK(scaled.linf == doctest::Approx(0.05 / 1.05).epsilon(1e-9));
    CHECK_FALSE(scaled.pass);

    const Axis shifted{"t", 0.05, 0.1, 50};
    CHECK_THROWS_AS(compare_series("shift", axis, a, shifted, a, 0.02), AxisMismatch);
    CHECK_NOTHROW(compare_series("shift", axis, a, shifted, a, 0.02, Resample::Linear));
}

TEST_CASE("map comparison can use the modulus") {
    const Axis ax{"t", 0.0, 1.0, 3};
    ComplexMap2D a(ax, ax, Eigen::MatrixXcd::Constant(3, 3, {1.0, 0.0}));
    ComplexMap2D b(ax, ax, Eigen::MatrixXcd::Constant(3, 3, {0.0, 1.0}));
    CHECK_FALSE(compare_maps("phase", a, b, 0.02).pass);
    CHECK(compare_maps("modulus", a, b, 0.02, Resample::None, true).pass);
}

TEST_CASE("number formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 12345.678, 0.0}) CHECK(std::stod(format_number(v)) == v);
    CHECK(format_number(0.5) == "0.5");
}

TEST_CASE("a scattering run writes self-describing files and is reproducible") {
    const auto cfg = parse("engine = scatter\ncoupling = chiral\nphotons = 1\noutputs = envelope, populations, g1\n");
    const auto d1 = scratch("run1"), d2 = scratch("run2");
    std::ostringstream log;
    const auto o1 = run(cfg, RunOptions{d1, 0, 1}, log);
    const auto o2 = run(cfg, RunOptions{d2, 0, 1}, log);
    CHECK(o1.exit_code == 0);
    REQUIRE(fs::exists(d1 / "g1_RR_scatter_N1_re.csv"));
    REQUIRE(fs::exists(d1 / "populations_scatter_N1.csv"));
    REQUIRE(o1.files.size() == o2.files.size());
    for (std::size_t i = 0; i < o1.files.size(); ++i)
        CHECK(slurp(o1.files[i]) == slurp(d2 / o1.files[i].filename()));

    const auto pop = read_csv(d1 / "populations_scatter_N1.csv");
    CHECK(meta_value(pop, "coupling").find("chiral") != std::string::npos);
    CHECK(meta_value(pop, "photons") == "1");
    CHECK_FALSE(meta_value(pop, "units").empty());
    CHECK(pop.names.front() == "t");
    CHECK(pop.rows.size() == 751);
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("compare mode agrees for two photons with symmetric coupling") {
    const auto cfg = parse("engine = compare\ncoupling = symmetric\nphotons = 2\noutputs = populations, g2\n");
    std::ostringstream log;
    const auto dir = scratch("compare");
    const auto out = compare(cfg, RunOptions{dir, 0, 1}, log);
    MESSAGE(out.report.to_text());
    CHECK(out.report.all_pass());
    CHECK(out.exit_code == 0);
    CHECK_FALSE(out.report.entries.empty());

    // A tolerance no real engine pair can meet must produce the failure code.
    auto strict = cfg;
    strict.tolerance = 1e-9;
    const auto failing = compare(strict, RunOptions{dir, 0, 1}, log);
    CHECK(failing.exit_code == 1);
    fs::remove_all(dir);
}

TEST_CASE("frequency-map export has the expected symmetries") {
    auto cfg = parse("fig3_sigmas = 1\nfig3_omega_max = 4\nfig3_points = 41\n");
    std::ostringstream log;
    const auto dir = scratch("fig3");
    const auto out = export_fig3_maps(cfg, RunOptions{dir, 0, 1}, log);
    CHECK(out.files.size() == 4);
    const auto lin_re = read_map(dir / "ilin_RR_sigma1_re.csv");
    const auto lin_im = read_map(dir / "ilin_RR_sigma1_im.csv");
    const auto nl_re = read_map(dir / "inlin_sigma1_re.csv");
    const auto nl_im = read_map(dir / "inlin_sigma1_im.csv");
    REQUIRE(lin_re.rows() == 41);

    // Real-valued envelope centred at zero: reversing both frequencies conjugates the maps.
    const Eigen::MatrixXd lin_im_rev = lin_im.reverse();
    const Eigen::MatrixXd nl_im_rev = nl_im.reverse();
    const Eigen::MatrixXd nl_re_rev = nl_re.reverse();
    CHECK((lin_im + lin_im_rev).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((nl_im + nl_im_rev).cwiseAbs().maxCoeff() < 1e-9 * nl_re.cwiseAbs().maxCoeff());
    CHECK((nl_re - nl_re_rev).cwiseAbs().maxCoeff() < 1e-9 * nl_re.cwiseAbs().maxCoeff());

    // The linear part vanishes when either photon sits on resonance (index 20 is omega = 0).
    CHECK(lin_re.row(20).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(lin_re.col(20).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(lin_im.row(20).cwiseAbs().maxCoeff() < 1e-14);
    fs::remove_all(dir);
}

TEST_CASE("output directory resolution order") {
    auto cfg = parse("output_dir = from_config\n");
    CHECK(resolve_output_dir(cfg, RunOptions{}) == fs::path("from_config"));
    CHECK(resolve_output_dir(cfg, RunOptions{fs::path("explicit"), 0, 1}) == fs::path("explicit"));
}

TEST_CASE("shipped configurations parse") {
    const fs::path root = WQED_SOURCE_DIR;
    for (const auto& e : fs::directory_iterator(root / "configs"))
        if (e.path().extension() == ".cfg") CHECK_NOTHROW(load_config(e.path()));
}
