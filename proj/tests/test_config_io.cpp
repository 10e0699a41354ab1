#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "imt/config.hpp"
#include "imt/error.hpp"
#include "imt/io.hpp"
#include "imt/runner.hpp"
#include "support.hpp"

using namespace imt;
using imt::test::pi;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("imt_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("quantities convert to internal units") {
    const double g = 2 * pi * 6e6;
    CHECK(parse_quantity("1 Gamma", "frequency", g) == doctest::Approx(1.0));
    CHECK(parse_quantity("2pi*6 MHz", "frequency", g) == doctest::Approx(1.0));
    CHECK(parse_quantity("37.699111843 /s", "frequency", g) == doctest::Approx(1e-6));
    CHECK(parse_quantity("150 us", "time", g) == doctest::Approx(150e-6 * g));
    CHECK(parse_quantity("1.5 mm", "length") == doctest::Approx(1.5));
    CHECK(parse_quantity("780 nm", "length") == doctest::Approx(780e-6));
    CHECK(parse_quantity("2 w0", "length", g, 1.5) == doctest::Approx(3.0));
    CHECK(parse_quantity("0.12 pi", "angle") == doctest::Approx(0.12 * pi));
    CHECK(parse_quantity("90 deg", "angle") == doctest::Approx(pi / 2));
    CHECK(parse_quantity("80", "dimensionless") == doctest::Approx(80.0));
    CHECK_THROWS_AS(parse_quantity("1.5", "length"), ConfigError);
    CHECK_THROWS_AS(parse_quantity("1.5 furlong", "length"), ConfigError);
    CHECK_THROWS_AS(parse_quantity("3 mm", "time"), ConfigError);
    CHECK_THROWS_AS(parse_quantity("abc mm", "length"), ConfigError);
}

TEST_CASE("config parsing, errors and overrides") {
    const Config c = parse_config("physics: {alpha: -0.25, delta_p: 1 Gamma, w0: 1.5 mm, xi: 80}\n"
                                  "grid: {nz: 128, ny: 64}\n"
                                  "run: {duration: 10 us, detunings: [-1 Gamma, 1 Gamma]}\n");
    CHECK(c.params.w0 == 1.5);
    CHECK(c.params.grid.nz == 128);
    CHECK(c.run.detunings == RVec{-1.0, 1.0});
    CHECK(c.run.duration == doctest::Approx(10e-6 * c.params.gamma_si));
    CHECK_THROWS_AS(parse_config("physics: {w0: 1.5}\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("physics: {beta: 1}\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("extras: {a: 1}\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("grid: {nz: 12.5}\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("physics: {alpha: -1.5}\n"), ValidationError);

    const Config o = parse_config("physics: {w0: 1 mm}\n", {"physics.w0=2 mm", "xi=200", "grid.nz=64"});
    CHECK(o.params.w0 == 2.0);
    CHECK(o.params.xi == 200.0);
    CHECK(o.params.grid.nz == 64);
    CHECK_THROWS_AS(parse_config("", {"nonsense"}), ConfigError);
    CHECK_THROWS_AS(parse_config("", {"physics.nope=3"}), ConfigError);
}

TEST_CASE("presets") {
    const Config f1 = preset("fig1");
    CHECK(f1.params.alpha == -0.25);
    CHECK(f1.params.w0 == 1.0);
    const Config f3 = preset("fig3");
    CHECK(f3.params.w0 == 1.5);
    CHECK(f3.run.detunings.size() == 5);
    CHECK(f3.run.snapshot_times.size() == 3);
    const Config f4 = preset("fig4");
    CHECK(f4.params.xi == 200.0);
    CHECK(f4.run.sweep_values.size() == 31);
    CHECK(f4.run.sweep_values.back() == doctest::Approx(0.3 * pi));
    CHECK_THROWS_AS(preset("fig9"), ConfigError);
    CHECK(preset("fig2", {"xi=100"}).params.xi == 100.0);
}

TEST_CASE("config hash is stable under key reordering and sensitive to values") {
    const Config a = parse_config("physics: {alpha: -0.25, w0: 1.5 mm, xi: 80}\nrun: {z0: 0.5 mm, modes: 3}\n");
    const Config b = parse_config("run: {modes: 3, z0: 0.5 mm}\nphysics: {xi: 80, w0: 1.5 mm, alpha: -0.25}\n");
    const Config c = parse_config("physics: {alpha: -0.25, w0: 1500 um, xi: 80}\nrun: {z0: 0.5 mm, modes: 3}\n");
    const Config d = parse_config("physics: {alpha: -0.25, w0: 1.5 mm, xi: 81}\nrun: {z0: 0.5 mm, modes: 3}\n");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a) == config_hash(c));
    CHECK(config_hash(a) != config_hash(d));
    CHECK(config_hash(a).size() == 64);
}

TEST_CASE("config file loading") {
    const fs::path d = scratch("cfg");
    std::ofstream(d / "c.yaml") << preset_yaml("fig3");
    const Config c = load_config((d / "c.yaml").string(), {"delta_p=2 Gamma"});
    CHECK(c.params.delta_p == 2.0);
    CHECK(c.run.detunings == preset("fig3").run.detunings);
    CHECK_THROWS_AS(load_config((d / "missing.yaml").string()), Error);
    fs::remove_all(d);
}

TEST_CASE("CSV round trip and schema checks") {
    const fs::path d = scratch("csv");
    CsvTable t{"imt.test/v1", {"a", "b"}, {{1.0, -2.5e-300}, {pi, std::nan("")}, {1e20, 0.1}}};
    write_csv((d / "t.csv").string(), t);
    std::ifstream in(d / "t.csv");
    std::string first;
    std::getline(in, first);
    CHECK(first == "# schema: imt.test/v1");
    const CsvTable r = read_csv((d / "t.csv").string());
    CHECK(r.schema == t.schema);
    CHECK(r.columns == t.columns);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[1][0] == doctest::Approx(pi).epsilon(1e-11));
    CHECK(std::isnan(r.rows[1][1]));
    CHECK(r.rows[2][0] == 1e20);
    CHECK(column(r, "b")[2] == 0.1);
    CHECK_THROWS_AS(column(r, "c"), SchemaMismatchError);

    CsvTable p{"imt.profile/v1", {"z_mm", "re", "im"}, {}};
    for (int i = 0; i < 50; ++i) {
        const double z = -2 + 4.0 * i / 49;
        p.rows.push_back({z, std::exp(-z * z), 0.2 * z * std::exp(-z * z)});
    }
    write_csv((d / "p1.csv").string(), p);
    for (auto& row : p.rows) {
        const cplx v = cplx(row[1], row[2]) * std::polar(2.0, 0.7);
        row[1] = v.real();
        row[2] = v.imag();
    }
    write_csv((d / "p2.csv").string(), p);
    const CompareReport c = compare((d / "p1.csv").string(), (d / "p2.csv").string(), "overlap");
    CHECK(c.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.deviation < 1e-6);
    CHECK_THROWS_AS(compare((d / "p1.csv").string(), (d / "t.csv").string(), "overlap"), SchemaMismatchError);
    CHECK_THROWS_AS(compare((d / "p1.csv").string(), (d / "t.csv").string(), "relative"), SchemaMismatchError);
    const CompareReport self = compare((d / "t.csv").string(), (d / "t.csv").string(), "relative");
    CHECK(self.value == 0.0);
    fs::remove_all(d);
}

TEST_CASE("snapshot round trip") {
    const fs::path d = scratch("snap");
    const Grid2D g(16, 8, 3.0, 2.5);
    ComplexField2D f(g);
    for (int i = 0; i < g.nz; ++i)
        for (int j = 0; j < g.ny; ++j) f(i, j) = cplx(i - 0.5 * j, 1.0 / (1 + i + j));
    write_snapshot((d / "s.bin").string(), f, 42.25);
    double t = 0;
    const ComplexField2D r = read_snapshot((d / "s.bin").string(), &t);
    CHECK(t == 42.25);
    CHECK(r.grid().nz == 16);
    CHECK(r.grid().ny == 8);
    CHECK(r.grid().dz() == g.dz());
    for (int i = 0; i < g.nz; ++i)
        for (int j = 0; j < g.ny; ++j) CHECK(r(i, j) == f(i, j));
    CHECK(fs::file_size(d / "s.bin") == 4 + 4 + 8 + 8 + 8 + 8 + 8 + 16 * 16 * 8);
    std::ofstream(d / "bad.bin") << "nope";
    CHECK_THROWS_AS(read_snapshot((d / "bad.bin").string()), Error);
    fs::remove_all(d);
}
