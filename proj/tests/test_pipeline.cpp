#include "doctest.h"

#include "porehom/config.hpp"
#include "porehom/errors.hpp"
#include "porehom/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <unistd.h>

using namespace porehom;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("porehom_test_" + tag + "_" +
                                            std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

// small, fast configuration for pipeline round trips
PipelineConfig small_config() {
    return parse_config(
        "[geometry]\nresolution = 32\n"
        "[cell]\ntol = 1e-11\n"
        "[stokes]\ntol = 1e-10\n"
        "[macro]\ncells_x = 8\ncells_y = 6\npoints_per_cell = 4\n"
        "t_end = 0\nsnapshot_every = 0\n"
        "[output]\nwrite_vtk = false\n");
}

} // namespace

TEST_CASE("empty config text yields the full default configuration") {
    PipelineConfig cfg = parse_config("");
    CHECK(cfg.pe_mic == 0.04);
    CHECK(cfg.cross_section == 0.46);
    CHECK(cfg.resolution == 128);
    CHECK(cfg.cells_x == 50);
    CHECK(cfg.cells_y == 35);
    CHECK(cfg.dx == 0.01);
    CHECK(cfg.inlet_strength == 1.0);
    CHECK(cfg.mobility.a11 == 1.0);
    CHECK(cfg.mu == 1.0);
}

TEST_CASE("config parsing: values, unknown keys, ranges") {
    CHECK(parse_config("[transport]\npe_mic = 0.04\n").pe_mic == 0.04);
    CHECK_THROWS_AS(parse_config("[transport]\npe_mic = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[transport]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("pe_mic = 0.04\n"), ConfigError); // missing section
    CHECK_THROWS_AS(parse_config("[transport\npe_mic = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[transport]\npe_mic 0.04\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[geometry]\namplitude = 0.7\ncross_section = 0.5\n"),
                    ConfigError);
    try {
        parse_config("[transport]\n\npe_mic = oops\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 3); // errors name the offending line
    }
}

TEST_CASE("config hash is stable and value-sensitive") {
    PipelineConfig a = parse_config("");
    PipelineConfig b = parse_config("[transport]\npe_mic = 0.04\n"); // the default, spelled out
    CHECK(a.hash() == b.hash());
    PipelineConfig c = parse_config("[transport]\npe_mic = 0.05\n");
    CHECK(a.hash() != c.hash());
}

TEST_CASE("stage chain produces artifacts, stages fail without dependencies") {
    TempDir dir("chain");
    PipelineConfig cfg = small_config();

    SUBCASE("tensors without correctors is a dependency error") {
        CHECK_THROWS_AS(run_stage_tensors(cfg, dir.str()), DependencyError);
    }
    SUBCASE("stokes without a mask is a dependency error") {
        CHECK_THROWS_AS(run_stage_stokes(cfg, dir.str()), DependencyError);
    }
    SUBCASE("macro without a tensor report is a dependency error") {
        CHECK_THROWS_AS(run_stage_macro(cfg, dir.str()), DependencyError);
    }
    SUBCASE("full chain") {
        run_pipeline(cfg, dir.str());
        for (const char* f : {artifacts::mask, artifacts::cell_summary, artifacts::flow_u,
                              artifacts::stokes_summary, artifacts::tensor_report,
                              artifacts::diagnostics})
            CHECK(file_exists(dir.file(f)));
        CHECK(file_exists(dir.file(artifacts::snapshot_csv(0))));
        CHECK(file_exists(dir.file(artifacts::interface_csv(0))));

        TensorReport rep = read_tensor_report(dir.file(artifacts::tensor_report));
        CHECK(rep.tensors.porosity == doctest::Approx(0.46).epsilon(0.05));
        CHECK(rep.config_hash == cfg.hash());
    }
}

TEST_CASE("cell stage twice produces bit-identical corrector files") {
    TempDir a("det_a"), b("det_b");
    PipelineConfig cfg = small_config();
    run_stage_cell(cfg, a.str());
    run_stage_cell(cfg, b.str());
    for (int k = 1; k <= 2; ++k) {
        CHECK(read_text_file(a.file(artifacts::xi_phi_csv(k))) ==
              read_text_file(b.file(artifacts::xi_phi_csv(k))));
        CHECK(read_text_file(a.file(artifacts::xi_w_csv(k))) ==
              read_text_file(b.file(artifacts::xi_w_csv(k))));
    }
    CHECK(read_text_file(a.file(artifacts::mask)) == read_text_file(b.file(artifacts::mask)));
}

TEST_CASE("empty-cell config: identity D, zero C, macro runs standard CH") {
    TempDir dir("empty");
    PipelineConfig cfg = small_config();
    cfg = parse_config(
        "[geometry]\nkind = empty\nresolution = 32\n"
        "[cell]\ntol = 1e-11\n"
        "[macro]\ncells_x = 8\ncells_y = 6\npoints_per_cell = 4\nbc = periodic\n"
        "ic = strip\nt_end = 1e-5\nsnapshot_every = 0\n"
        "[output]\nwrite_vtk = false\n");
    run_pipeline(cfg, dir.str());
    TensorReport rep = read_tensor_report(dir.file(artifacts::tensor_report));
    CHECK(std::abs(rep.tensors.D.a11 - 1.0) <= 1e-10);
    CHECK(std::abs(rep.tensors.D.a22 - 1.0) <= 1e-10);
    CHECK(rep.tensors.C.a11 == 0.0);
    CHECK(rep.tensors.C.a22 == 0.0);
    CHECK(rep.tensors.porosity == 1.0);
}

TEST_CASE("hand-edited tensor report drives the macro stage (file round trip)") {
    TempDir dir("edit");
    PipelineConfig cfg = small_config();
    cfg.macro_bc = "periodic";
    cfg.macro_ic = "uniform";
    cfg.ic_value = 0.5;
    cfg.t_end = 0.0;
    run_stage_cell(cfg, dir.str());
    run_stage_stokes(cfg, dir.str());
    run_stage_tensors(cfg, dir.str());

    // edit: double d11 in the report
    TensorReport rep = read_tensor_report(dir.file(artifacts::tensor_report));
    rep.tensors.D.a11 *= 2.0;
    write_tensor_report(dir.file(artifacts::tensor_report), rep);
    TensorReport back = read_tensor_report(dir.file(artifacts::tensor_report));
    CHECK(back.tensors.D.a11 == rep.tensors.D.a11); // 17-digit round trip is lossless

    run_stage_macro(cfg, dir.str());
    CHECK(file_exists(dir.file(artifacts::diagnostics)));
}

TEST_CASE("straight-channel config reproduces the analytic tensor limits") {
    TempDir dir("straight");
    PipelineConfig cfg = parse_config(
        "[geometry]\namplitude = 0\ncross_section = 0.5\nresolution = 64\n"
        "[cell]\ntol = 1e-12\n"
        "[stokes]\ntol = 1e-11\n"
        "[macro]\ncells_x = 4\ncells_y = 4\nt_end = 0\nsnapshot_every = 0\n"
        "[output]\nwrite_vtk = false\n");
    run_stage_cell(cfg, dir.str());
    run_stage_stokes(cfg, dir.str());
    run_stage_tensors(cfg, dir.str());
    TensorReport rep = read_tensor_report(dir.file(artifacts::tensor_report));
    CHECK(std::abs(rep.tensors.D.a11 - rep.tensors.porosity) <= 1e-9);
    CHECK(std::abs(rep.tensors.D.a22) <= 1e-9);
    CHECK(std::abs(rep.tensors.C.a11) <= 1e-6);
    CHECK(std::abs(rep.tensors.C.a22) <= 1e-6);
}

TEST_CASE("field csv round trip preserves values bit-exactly") {
    TempDir dir("csv");
    ScalarField f(8, 6);
    for (int j = 0; j < 6; ++j)
        for (int i = 0; i < 8; ++i)
            f(i, j) = std::sin(i * 1.7 + j * 0.3) * 1e-7 + i;
    write_field_csv(dir.file("f.csv"), f, 0.125, 1.0 / 6, "deadbeef");
    ScalarField g = read_field_csv(dir.file("f.csv"));
    REQUIRE(g.nx() == 8);
    REQUIRE(g.ny() == 6);
    for (std::size_t k = 0; k < f.size(); ++k)
        CHECK(f.data()[k] == g.data()[k]);
}
