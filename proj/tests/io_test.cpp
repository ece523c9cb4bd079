#include "reproj/io.hpp"

#include "test_support.hpp"

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include <unistd.h>

using namespace reproj;
using namespace reproj::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir
{
    fs::path path;

    TempDir()
    {
        static int counter = 0;
        path = fs::temp_directory_path() / ("reproj_io_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream(path, std::ios::binary) << text;
}

std::string error_message(const std::function<void()>& f)
{
    try {
        f();
    } catch (const io::FormatError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("voxl round trips")
{
    std::mt19937_64 rng(1);
    SUBCASE("binary grid is reproduced exactly")
    {
        const VoxelGrid g = random_binary_grid(rng, 30);
        std::stringstream ss;
        io::write_voxl(ss, g);
        CHECK(ss.str().rfind("voxl 1\ndim 30\ndata binary\n\n", 0) == 0);
        CHECK(io::read_voxl(ss) == g);
    }
    SUBCASE("float grid keeps nine significant digits")
    {
        const VoxelGrid g = random_grid(rng, 6);
        std::stringstream ss;
        io::write_voxl(ss, g);
        CHECK(ss.str().find("data float") != std::string::npos);
        const VoxelGrid back = io::read_voxl(ss);
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            CHECK(std::abs(back.values()[i] - g.values()[i]) <= 5e-9 * std::max(g.values()[i], 1e-300) + 1e-300);
        }
    }
    SUBCASE("files")
    {
        TempDir dir;
        const VoxelGrid g = random_binary_grid(rng, 5);
        io::write_voxl(dir.path / "g.voxl", g);
        CHECK(io::read_voxl(dir.path / "g.voxl") == g);
        CHECK_THROWS_AS(io::read_voxl(dir.path / "missing.voxl"), io::FormatError);
    }
}

TEST_CASE("voxl parsing")
{
    std::istringstream minimal("voxl 1\ndim 2\ndata binary\n\n1 0 0 0\n0 0 0 1\n");
    const VoxelGrid g = io::read_voxl(minimal);
    CHECK(g.q() == 2);
    CHECK(g(0, 0, 0) == 1.0);
    CHECK(g(1, 1, 1) == 1.0);
    CHECK(g.mass() == 2.0);

    std::istringstream ordering("voxl 1\ndim 2\ndata float\n\n0 0.5 0 0 0 0 0 0\n");
    CHECK(io::read_voxl(ordering)(1, 0, 0) == 0.5);

    const std::string short_file = "voxl 1\ndim 2\ndata binary\n\n1 0 0\n";
    const std::string msg = error_message([&] {
        std::istringstream in(short_file);
        io::read_voxl(in);
    });
    CHECK(msg.find("expected 8") != std::string::npos);
    CHECK(msg.find("found 3") != std::string::npos);

    for (const std::string bad : {"voxl 2\ndim 2\ndata binary\n\n0 0 0 0 0 0 0 0\n",
                                  "voxel 1\ndim 2\ndata binary\n\n0 0 0 0 0 0 0 0\n",
                                  "voxl 1\ndim 2\ndata bits\n\n0 0 0 0 0 0 0 0\n",
                                  "voxl 1\ndim 2\ndata float\n\n0 0 0 0 0 0 0 1.5\n",
                                  "voxl 1\ndim 2\ndata float\n\n0 0 0 0 0 0 0 -0.1\n",
                                  "voxl 1\ndim 2\ndata binary\n\n0 0 0 0 0 0 0 0.5\n",
                                  "voxl 1\ndim 2\ndata binary\n\n0 0 0 0 0 0 0 x\n",
                                  "voxl 1\ndim 2\ndata binary\n\n0 0 0 0 0 0 0 0 1\n",
                                  "voxl 1\ndim 0\ndata binary\n\n",
                                  "voxl 1\ndim 2\ndata binary\n0 0 0 0 0 0 0 0\n"}) {
        std::istringstream in(bad);
        CHECK_THROWS_AS(io::read_voxl(in), io::FormatError);
    }
}

TEST_CASE("pgm")
{
    std::mt19937_64 rng(2);
    SUBCASE("all ones writes maxval")
    {
        std::stringstream ss;
        io::write_pgm(ss, Silhouette(3, Eigen::VectorXd::Ones(9)));
        CHECK(ss.str() == "P2\n3 3\n255\n255 255 255\n255 255 255\n255 255 255\n");
    }
    SUBCASE("round trip within the quantization bound")
    {
        for (int trial = 0; trial < 20; ++trial) {
            const Silhouette s = random_silhouette(rng, 7);
            for (auto enc : {io::PgmEncoding::ascii, io::PgmEncoding::raw}) {
                std::stringstream ss;
                io::write_pgm(ss, s, enc);
                const Silhouette back = io::read_pgm(ss);
                CHECK((back.values() - s.values()).cwiseAbs().maxCoeff() <= 1.0 / 510.0 + 1e-15);
            }
        }
    }
    SUBCASE("ascii and raw decode identically")
    {
        const Silhouette s = random_silhouette(rng, 9);
        std::stringstream a, b;
        io::write_pgm(a, s, io::PgmEncoding::ascii);
        io::write_pgm(b, s, io::PgmEncoding::raw);
        CHECK(b.str().rfind("P5\n9 9\n255\n", 0) == 0);
        CHECK(io::read_pgm(a) == io::read_pgm(b));
    }
    SUBCASE("row order and other maxvals")
    {
        std::istringstream in("P2\n# comment\n2 2\n4\n0 1\n2 4\n");
        const Silhouette s = io::read_pgm(in);
        CHECK(s(1, 0) == 0.25);
        CHECK(s(0, 1) == 0.5);
        CHECK(s(1, 1) == 1.0);
    }
    SUBCASE("errors")
    {
        for (const std::string bad : {"P3\n2 2\n255\n0 0 0 0\n", "P2\n2 3\n255\n0 0 0 0 0 0\n",
                                      "P2\n2 2\n0\n0 0 0 0\n", "P2\n2 2\n256\n0 0 0 0\n",
                                      "P2\n2 2\n255\n0 0 0\n", "P2\n2 2\n255\n0 0 0 300\n", "P2\n2 2\n"}) {
            std::istringstream in(bad);
            CHECK_THROWS_AS(io::read_pgm(in), io::FormatError);
        }
    }
}

TEST_CASE("voxb")
{
    std::mt19937_64 rng(3);
    std::vector<VoxelGrid> shapes;
    for (int i = 0; i < 6; ++i) {
        shapes.push_back(asymmetric_shape(rng, 8));
    }
    SUBCASE("round trip is exact and orthonormal")
    {
        const StyleBasis b = fit_basis(shapes, 4);
        std::stringstream ss;
        io::write_basis(ss, b);
        const StyleBasis back = io::read_basis(ss);
        CHECK(back.q == 8);
        CHECK(back.m() == 4);
        CHECK(back.mu == b.mu);
        CHECK(back.basis == b.basis);
        CHECK(back.singular_values == b.singular_values);
        const Eigen::MatrixXd gram = back.basis.transpose() * back.basis;
        CHECK((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("empty basis")
    {
        const StyleBasis b = fit_basis(shapes, 0);
        std::stringstream ss;
        io::write_basis(ss, b);
        const StyleBasis back = io::read_basis(ss);
        CHECK(back.m() == 0);
        CHECK(back.mu == b.mu);
    }
    SUBCASE("file without singular values")
    {
        std::istringstream in("voxb 1\ndim 2\nm 1\n\n0 0 0 0 0 0 0 0\n1 0 0 0 0 0 0 0\n");
        const StyleBasis b = io::read_basis(in);
        CHECK(b.basis(0, 0) == 1.0);
        CHECK(b.singular_values == Eigen::VectorXd::Zero(1));
    }
    SUBCASE("corrupted column count")
    {
        const StyleBasis b = fit_basis(shapes, 2);
        std::stringstream ss;
        io::write_basis(ss, b);
        std::string text = ss.str();
        text.replace(text.find("m 2"), 3, "m 3");
        std::istringstream bad_sv(text);
        CHECK_THROWS_AS(io::read_basis(bad_sv), io::FormatError);

        std::string missing_sv = ss.str();
        const auto sv = missing_sv.find("sv ");
        missing_sv.erase(sv, missing_sv.find('\n', sv) + 1 - sv);
        missing_sv.replace(missing_sv.find("m 2"), 3, "m 3");
        std::istringstream in(missing_sv);
        CHECK_THROWS_AS(io::read_basis(in), io::FormatError);
    }
}

TEST_CASE("manifest")
{
    TempDir dir;
    io::write_pgm(dir.path / "a.pgm", Silhouette(4));
    io::write_pgm(dir.path / "b.pgm", Silhouette(4));
    io::write_voxl(dir.path / "a.voxl", VoxelGrid(4));
    const fs::path manifest = dir.path / "set.jsonl";

    write_text(manifest, R"({"id": "a", "silhouette_path": "a.pgm", "gt_grid_path": "a.voxl", "gt_pose": [0.1, 0, 0, 1, -1], "gt_style": [0.5]})"
                         "\n\n"
                         R"({"id": "b", "silhouette_path": "b.pgm"})"
                         "\n");
    const auto entries = io::read_manifest(manifest);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].id == "a");
    CHECK(entries[0].silhouette_path == dir.path / "a.pgm");
    CHECK(entries[0].gt_grid_path == dir.path / "a.voxl");
    REQUIRE(entries[0].gt_pose);
    CHECK(entries[0].gt_pose->twist == Eigen::Vector3d(0.1, 0.0, 0.0));
    CHECK(entries[0].gt_pose->translation == Eigen::Vector2d(1.0, -1.0));
    REQUIRE(entries[0].gt_style);
    CHECK((*entries[0].gt_style)[0] == 0.5);
    CHECK_FALSE(entries[1].gt_pose);
    CHECK_FALSE(entries[1].gt_grid_path);

    const std::vector<std::string> bad{
        R"({"id": "a", "silhouette_path": "a.pgm"})"
        "\n"
        R"({"id": "a", "silhouette_path": "b.pgm"})",
        R"({"id": "c", "silhouette_path": "c.pgm"})",
        R"({"id": "a", "silhouette_path": "a.pgm", "gt_grid_path": "none.voxl"})",
        R"({"id": "a", "silhouette_path": "a.pgm", "gt_pose": [1, 2, 3]})",
        R"({"id": "a"})",
        R"({"id": "a", "silhouette_path": )",
    };
    for (const auto& text : bad) {
        write_text(manifest, text + "\n");
        CHECK_THROWS_AS(io::read_manifest(manifest), io::FormatError);
    }
    write_text(manifest, R"({"id": "a", "silhouette_path": "a.pgm"})"
                         "\n"
                         R"({"id": "a", "silhouette_path": "b.pgm"})"
                         "\n");
    CHECK(error_message([&] { io::read_manifest(manifest); }).find("duplicate id 'a'") != std::string::npos);
}

TEST_CASE("fit config")
{
    std::istringstream in("# tuned\nrestarts = 4\niterations=20\nstep_size=0.05\nseed=7\n\nloss_tolerance=0.01\nthreads=2\n");
    const FitConfig c = io::read_fit_config(in);
    CHECK(c.restarts == 4);
    CHECK(c.iterations == 20);
    CHECK(c.step_size == 0.05);
    CHECK(c.seed == 7);
    CHECK(c.loss_tolerance == 0.01);
    CHECK(c.threads == 2);
    CHECK(c.beta1 == FitConfig{}.beta1);

    std::istringstream empty("");
    CHECK(io::read_fit_config(empty).restarts == FitConfig{}.restarts);

    for (const std::string bad : {"restarts=0\n", "colour=red\n", "restarts\n", "seed=-1\n", "step_size=fast\n"}) {
        std::istringstream b(bad);
        CHECK_THROWS_AS(io::read_fit_config(b), io::FormatError);
    }
}

TEST_CASE("fit report round trip")
{
    io::FitReport r;
    r.pose = PoseParams::from_vector(Vector5d(0.1, -0.2, 3.0, 1.5, -0.25));
    r.style = Eigen::Vector3d(1.0 / 3.0, -2.0, 1e-17);
    r.final_loss = 0.123456789012345;
    r.restart_index = 5;
    r.iterations_run = 300;
    r.silhouette_path = "out.sil.pgm";
    r.grid_path = "out.grid.voxl";
    std::stringstream ss;
    io::write_fit_report(ss, r);
    CHECK(ss.str().rfind("reproj-fit 1\n", 0) == 0);
    const io::FitReport back = io::read_fit_report(ss);
    CHECK(back.pose.to_vector() == r.pose.to_vector());
    CHECK(back.style == r.style);
    CHECK(back.final_loss == r.final_loss);
    CHECK(back.restart_index == 5);
    CHECK(back.iterations_run == 300);
    CHECK(back.silhouette_path == r.silhouette_path);
    CHECK(back.grid_path == r.grid_path);

    std::istringstream no_header("pose=0,0,0,0,0\n");
    CHECK_THROWS_AS(io::read_fit_report(no_header), io::FormatError);
    std::istringstream short_pose("reproj-fit 1\npose=0,0\nstyle=\nfinal_loss=1\nsilhouette=a\ngrid=b\n");
    CHECK_THROWS_AS(io::read_fit_report(short_pose), io::FormatError);
    std::istringstream missing("reproj-fit 1\npose=0,0,0,0,0\n");
    CHECK_THROWS_AS(io::read_fit_report(missing), io::FormatError);
}

TEST_CASE("real lists")
{
    CHECK(io::parse_real_list("") == std::vector<double>{});
    CHECK(io::parse_real_list("1,2.5, -3") == std::vector<double>{1.0, 2.5, -3.0});
    CHECK(io::parse_real_list("1e-3") == std::vector<double>{1e-3});
    CHECK_THROWS_AS(io::parse_real_list("1,,2"), io::FormatError);
    CHECK_THROWS_AS(io::parse_real_list("1,x"), io::FormatError);
}
