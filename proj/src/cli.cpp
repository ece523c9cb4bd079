/*
 * reproj - closed-loop pose and style recovery for voxel shapes.
 *
 * Copyright 2026 The reproj Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "reproj/cli.hpp"

#include "reproj/fit.hpp"
#include "reproj/io.hpp"
#include "reproj/loss.hpp"
#include "reproj/metrics.hpp"
#include "reproj/projection.hpp"
#include "reproj/shape.hpp"
#include "reproj/warp.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace reproj {

namespace fs = std::filesystem;

namespace {

constexpr int kInputError = 2;

Eigen::VectorXd to_vector(const std::vector<double>& v)
{
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

PoseParams parse_pose(const std::string& text)
{
    const auto v = io::parse_real_list(text);
    if (v.size() != 5) {
        throw std::invalid_argument("--pose needs 5 comma-separated values (w1,w2,w3,tx,ty), got " +
                                    std::to_string(v.size()));
    }
    PoseParams p = PoseParams::from_vector(Vector5d(v[0], v[1], v[2], v[3], v[4]));
    p.twist = wrap_to_ball(p.twist);
    return p;
}

StyleVector parse_style(const std::string& text, const StyleBasis& basis)
{
    const StyleVector s = to_vector(io::parse_real_list(text));
    if (s.size() != basis.m()) {
        throw std::invalid_argument("--style has " + std::to_string(s.size()) + " values, basis expects " +
                                    std::to_string(basis.m()));
    }
    return s;
}

std::vector<VoxelGrid> load_shape_dir(const fs::path& dir)
{
    if (!fs::is_directory(dir)) {
        throw std::invalid_argument("--shapes: not a directory: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".voxl") {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw std::invalid_argument("--shapes: no .voxl files in " + dir.string());
    }
    std::vector<VoxelGrid> shapes;
    for (const auto& f : files) {
        shapes.push_back(io::read_voxl(f));
        if (!shapes.back().is_binary()) {
            throw std::invalid_argument("--shapes: " + f.string() + " is not a binary grid");
        }
    }
    return shapes;
}

fs::path sibling(const fs::path& out, const std::string& suffix)
{
    fs::path p = out;
    p.replace_extension();
    return fs::path(p.string() + suffix);
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Pose and style recovery from silhouettes via differentiable reprojection", "reproj"};
    app.require_subcommand(1);

    // fit-basis
    std::string shapes_dir, basis_out, scales_text;
    int m = 20;
    std::uint64_t basis_seed = 0;
    auto* fit_basis_cmd = app.add_subcommand("fit-basis", "Fit a logit-space linear style basis to binary shapes");
    fit_basis_cmd->add_option("--shapes", shapes_dir, "Directory of binary .voxl shapes")->required();
    fit_basis_cmd->add_option("--m", m, "Number of style components")->required();
    fit_basis_cmd->add_option("--out", basis_out, "Output .voxb file")->required();
    fit_basis_cmd->add_option("--scales", scales_text, "Comma-separated scale augmentation factors in (0,1]");
    fit_basis_cmd->add_option("--seed", basis_seed, "Seed for the augmentation order");

    // generate
    std::string gen_basis, gen_style, gen_out;
    auto* generate_cmd = app.add_subcommand("generate", "Generate an aligned shape from style coordinates");
    generate_cmd->add_option("--basis", gen_basis, "Style basis (.voxb)")->required();
    generate_cmd->add_option("--style", gen_style, "Comma-separated style coordinates")->required();
    generate_cmd->add_option("--out", gen_out, "Output .voxl file")->required();

    // transform
    std::string tr_in, tr_pose, tr_out;
    auto* transform_cmd = app.add_subcommand("transform", "Apply a rigid pose to a voxel grid");
    transform_cmd->add_option("--in", tr_in, "Input .voxl")->required();
    transform_cmd->add_option("--pose", tr_pose, "w1,w2,w3,tx,ty")->required();
    transform_cmd->add_option("--out", tr_out, "Output .voxl")->required();

    // project
    std::string pr_in, pr_mode = "max", pr_out;
    bool pr_raw = false;
    auto* project_cmd = app.add_subcommand("project", "Reproject a voxel grid to a silhouette along z");
    project_cmd->add_option("--in", pr_in, "Input .voxl")->required();
    project_cmd->add_option("--mode", pr_mode, "max or soft")->check(CLI::IsMember({"max", "soft"}));
    project_cmd->add_option("--out", pr_out, "Output .pgm")->required();
    project_cmd->add_flag("--raw", pr_raw, "Write binary P5 instead of ASCII P2");

    // synth
    std::string sy_basis, sy_style, sy_pose, sy_out;
    double sy_noise = 0.0;
    std::uint64_t sy_seed = 0;
    bool sy_soft = false;
    auto* synth_cmd = app.add_subcommand("synth", "Synthesize a target silhouette from known style and pose");
    synth_cmd->add_option("--basis", sy_basis, "Style basis (.voxb)")->required();
    synth_cmd->add_option("--style", sy_style, "Comma-separated style coordinates")->required();
    synth_cmd->add_option("--pose", sy_pose, "w1,w2,w3,tx,ty")->required();
    synth_cmd->add_option("--noise", sy_noise, "Pixel flip probability in [0,0.5)");
    synth_cmd->add_option("--seed", sy_seed, "Noise seed");
    synth_cmd->add_flag("--soft", sy_soft, "Keep the soft projection instead of binarizing");
    synth_cmd->add_option("--out", sy_out, "Output .pgm")->required();

    // fit
    std::string fit_target, fit_basis_path, fit_config, fit_out;
    auto* fit_cmd = app.add_subcommand("fit", "Recover style and pose from a target silhouette");
    fit_cmd->add_option("--target", fit_target, "Target silhouette (.pgm)")->required();
    fit_cmd->add_option("--basis", fit_basis_path, "Style basis (.voxb)")->required();
    fit_cmd->add_option("--config", fit_config, "key=value optimizer configuration");
    fit_cmd->add_option("--out", fit_out, "Output report")->required();

    // eval
    std::string ev_manifest, ev_pred, ev_out;
    double ev_frame = 30.0;
    auto* eval_cmd = app.add_subcommand("eval", "Score fit reports against a ground-truth manifest");
    eval_cmd->add_option("--manifest", ev_manifest, "JSON-lines manifest")->required();
    eval_cmd->add_option("--pred", ev_pred, "Directory holding <id>.report fit reports")->required();
    eval_cmd->add_option("--out", ev_out, "Output metrics record (tab-separated)")->required();
    eval_cmd->add_option("--frame", ev_frame, "Silhouette frame size for the translation ratio");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        err << app.help();
        return kInputError;
    }

    try {
        if (*fit_basis_cmd) {
            std::vector<VoxelGrid> shapes = load_shape_dir(shapes_dir);
            if (!scales_text.empty()) {
                const auto scales = io::parse_real_list(scales_text);
                shapes = augment_scales(shapes, scales, basis_seed);
            }
            const StyleBasis basis = fit_basis(shapes, m);
            io::write_basis(fs::path(basis_out), basis);
            out << "fitted basis: " << shapes.size() << " shapes, q=" << basis.q << ", m=" << basis.m() << '\n';
        } else if (*generate_cmd) {
            const StyleBasis basis = io::read_basis(fs::path(gen_basis));
            io::write_voxl(fs::path(gen_out), generate(basis, parse_style(gen_style, basis)));
        } else if (*transform_cmd) {
            const VoxelGrid grid = io::read_voxl(fs::path(tr_in));
            io::write_voxl(fs::path(tr_out), transform_grid(grid, parse_pose(tr_pose)));
        } else if (*project_cmd) {
            const VoxelGrid grid = io::read_voxl(fs::path(pr_in));
            const Silhouette sil = pr_mode == "soft" ? project_soft(grid) : project_max(grid);
            io::write_pgm(fs::path(pr_out), sil, pr_raw ? io::PgmEncoding::raw : io::PgmEncoding::ascii);
        } else if (*synth_cmd) {
            const StyleBasis basis = io::read_basis(fs::path(sy_basis));
            const Silhouette sil = synthesize_target(basis, parse_style(sy_style, basis), parse_pose(sy_pose),
                                                     !sy_soft, sy_noise, sy_seed);
            io::write_pgm(fs::path(sy_out), sil);
        } else if (*fit_cmd) {
            const Silhouette target = io::read_pgm(fs::path(fit_target));
            const StyleBasis basis = io::read_basis(fs::path(fit_basis_path));
            const FitConfig config = fit_config.empty() ? FitConfig{} : io::read_fit_config(fs::path(fit_config));
            const FitResult res = fit_pose_style(target, basis, config);

            const fs::path report_path(fit_out);
            const fs::path sil_path = sibling(report_path, ".sil.pgm");
            const fs::path grid_path = sibling(report_path, ".grid.voxl");
            const VoxelGrid posed = transform_grid(generate(basis, res.s), res.p);
            io::write_pgm(sil_path, project_soft(posed));
            io::write_voxl(grid_path, posed);

            io::FitReport rep;
            rep.pose = res.p;
            rep.style = res.s;
            rep.final_loss = res.final_loss;
            rep.restart_index = res.restart_index;
            rep.iterations_run = res.iterations_run;
            rep.silhouette_path = sil_path.filename();
            rep.grid_path = grid_path.filename();
            io::write_fit_report(report_path, rep);
            out << "final loss " << res.final_loss << " (restart " << res.restart_index << ")\n";
        } else if (*eval_cmd) {
            const auto entries = io::read_manifest(fs::path(ev_manifest));
            std::vector<EvalRecord> records;
            for (const auto& e : entries) {
                const fs::path rep_path = fs::path(ev_pred) / (e.id + ".report");
                const io::FitReport rep = io::read_fit_report(rep_path);
                auto near = [&](const fs::path& p) { return p.is_absolute() ? p : rep_path.parent_path() / p; };
                EvalRecord r;
                r.id = e.id;
                r.pred_sil = io::read_pgm(near(rep.silhouette_path));
                r.gt_sil = io::read_pgm(e.silhouette_path);
                if (!r.gt_sil.is_binary()) {
                    throw std::invalid_argument("eval: ground-truth silhouette for '" + e.id + "' is not binary");
                }
                r.pred_pose = rep.pose;
                r.gt_pose = e.gt_pose;
                if (e.gt_grid_path) {
                    r.gt_grid = io::read_voxl(*e.gt_grid_path);
                    r.pred_grid = io::read_voxl(near(rep.grid_path));
                }
                records.push_back(std::move(r));
            }
            const MetricsReport report = evaluate(records, ev_frame);
            std::ofstream os(ev_out);
            if (!os) {
                throw io::FormatError("cannot open " + ev_out + " for writing");
            }
            os << report.to_tsv() << '\n';
            out << report.to_table();
        }
    } catch (const io::FormatError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace reproj
