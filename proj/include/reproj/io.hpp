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
#pragma once

#include "reproj/fit.hpp"
#include "reproj/projection.hpp"
#include "reproj/rotation.hpp"
#include "reproj/shape.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace reproj::io {

// Malformed or inconsistent file contents.
class FormatError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/*
 * VOXL: ASCII header lines "voxl 1", "dim Q", "data float|binary", a blank
 * line, then Q^3 whitespace-separated values in x-fastest order. Binary
 * grids are written as 0/1, float grids with 9 significant digits.
 */
VoxelGrid read_voxl(std::istream& in);
VoxelGrid read_voxl(const std::filesystem::path& path);
void write_voxl(std::ostream& out, const VoxelGrid& grid);
void write_voxl(const std::filesystem::path& path, const VoxelGrid& grid);

/*
 * PGM, P2 (ASCII) or P5 (raw bytes), square, maxval in [1,255]. Writers use
 * maxval 255 and store round(255 * value); rows run top to bottom, y = 0 first.
 */
enum class PgmEncoding { ascii, raw };

Silhouette read_pgm(std::istream& in);
Silhouette read_pgm(const std::filesystem::path& path);
void write_pgm(std::ostream& out, const Silhouette& sil, PgmEncoding encoding = PgmEncoding::ascii);
void write_pgm(const std::filesystem::path& path, const Silhouette& sil, PgmEncoding encoding = PgmEncoding::ascii);

/*
 * VOXB: "voxb 1", "dim Q", "m M", an optional "sv s_1 ... s_M" line, a blank
 * line, then mu (Q^3 values) followed by the M basis columns (Q^3 values
 * each). Values are written in shortest round-trip form.
 */
StyleBasis read_basis(std::istream& in);
StyleBasis read_basis(const std::filesystem::path& path);
void write_basis(std::ostream& out, const StyleBasis& basis);
void write_basis(const std::filesystem::path& path, const StyleBasis& basis);

struct ManifestEntry
{
    std::string id;
    std::filesystem::path silhouette_path;
    std::optional<std::filesystem::path> gt_grid_path;
    std::optional<PoseParams> gt_pose;
    std::optional<Eigen::VectorXd> gt_style;
};

/*
 * One JSON object per line: {"id", "silhouette_path", optional
 * "gt_grid_path", optional "gt_pose" (5 numbers), optional "gt_style"}.
 * Relative paths resolve against base_dir. Ids must be unique and every
 * referenced file must exist.
 */
std::vector<ManifestEntry> read_manifest(std::istream& in, const std::filesystem::path& base_dir);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

// key=value lines, '#' comments; every key optional.
FitConfig read_fit_config(std::istream& in);
FitConfig read_fit_config(const std::filesystem::path& path);

struct FitReport
{
    PoseParams pose;
    Eigen::VectorXd style;
    double final_loss = 0.0;
    int restart_index = 0;
    int iterations_run = 0;
    std::filesystem::path silhouette_path;
    std::filesystem::path grid_path;
};

// "reproj-fit 1" followed by key=value lines.
void write_fit_report(std::ostream& out, const FitReport& report);
void write_fit_report(const std::filesystem::path& path, const FitReport& report);
FitReport read_fit_report(std::istream& in);
FitReport read_fit_report(const std::filesystem::path& path);

// Comma-separated reals ("1,2.5,-3"); an empty string gives an empty vector.
std::vector<double> parse_real_list(const std::string& text);

} // namespace reproj::io
