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
#include "reproj/io.hpp"

#include "reproj/detail/format.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <set>
#include <sstream>

namespace reproj::io {

namespace fs = std::filesystem;

namespace {

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in)
{
    std::ifstream in(path, mode);
    if (!in) {
        throw FormatError("cannot open " + path.string() + " for reading");
    }
    return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out)
{
    std::ofstream out(path, mode);
    if (!out) {
        throw FormatError("cannot open " + path.string() + " for writing");
    }
    return out;
}

double parse_double(std::string_view tok, const std::string& context)
{
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (!tok.empty() && *first == '+') {
        ++first;
    }
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v)) {
        throw FormatError(context + ": cannot parse '" + std::string(tok) + "' as a real number");
    }
    return v;
}

long long parse_int(std::string_view tok, const std::string& context)
{
    long long v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
        throw FormatError(context + ": cannot parse '" + std::string(tok) + "' as an integer");
    }
    return v;
}

// Reads one header line "<key> <value...>" and returns the value tokens.
std::vector<std::string> header_line(std::istream& in, const std::string& key, const std::string& format)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError(format + ": missing '" + key + "' header line");
    }
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != key) {
        throw FormatError(format + ": expected header '" + key + "', found '" + line + "'");
    }
    std::vector<std::string> vals{std::istream_iterator<std::string>(ls), std::istream_iterator<std::string>()};
    return vals;
}

std::string single_value(const std::vector<std::string>& vals, const std::string& key, const std::string& format)
{
    if (vals.size() != 1) {
        throw FormatError(format + ": header '" + key + "' takes exactly one value");
    }
    return vals.front();
}

void expect_blank(std::istream& in, const std::string& format)
{
    std::string line;
    if (!std::getline(in, line) || line.find_first_not_of(" \t\r") != std::string::npos) {
        throw FormatError(format + ": expected a blank line after the header");
    }
}

int read_dim(std::istream& in, const std::string& format)
{
    const long long q = parse_int(single_value(header_line(in, "dim", format), "dim", format), format + " dim");
    if (q <= 0 || q > 4096) {
        throw FormatError(format + ": dim " + std::to_string(q) + " out of range");
    }
    return static_cast<int>(q);
}

Eigen::VectorXd read_values(std::istream& in, Eigen::Index expected, const std::string& format)
{
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(expected));
    std::string tok;
    while (in >> tok) {
        vals.push_back(parse_double(tok, format));
    }
    if (static_cast<Eigen::Index>(vals.size()) != expected) {
        throw FormatError(format + ": expected " + std::to_string(expected) + " values, found " +
                          std::to_string(vals.size()));
    }
    return Eigen::Map<const Eigen::VectorXd>(vals.data(), expected);
}

void write_block(std::ostream& out, const Eigen::VectorXd& v, int per_line, bool shortest, int significant = 9)
{
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out << (shortest ? detail::format_double(v[i]) : detail::format_general(v[i], significant));
        out << ((i + 1) % per_line == 0 || i + 1 == v.size() ? '\n' : ' ');
    }
}

} // namespace

// ---- VOXL ----

VoxelGrid read_voxl(std::istream& in)
{
    const std::string fmt = "voxl";
    if (single_value(header_line(in, "voxl", fmt), "voxl", fmt) != "1") {
        throw FormatError("voxl: unsupported version");
    }
    const int q = read_dim(in, fmt);
    const std::string kind = single_value(header_line(in, "data", fmt), "data", fmt);
    if (kind != "float" && kind != "binary") {
        throw FormatError("voxl: data must be 'float' or 'binary', got '" + kind + "'");
    }
    expect_blank(in, fmt);
    const Eigen::Index n = static_cast<Eigen::Index>(q) * q * q;
    Eigen::VectorXd vals = read_values(in, n, fmt);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v = vals[i];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw FormatError("voxl: value " + detail::format_double(v) + " at index " + std::to_string(i) +
                              " outside [0,1]");
        }
        if (kind == "binary" && v != 0.0 && v != 1.0) {
            throw FormatError("voxl: non-binary value at index " + std::to_string(i) + " in a binary grid");
        }
    }
    return VoxelGrid(q, std::move(vals));
}

VoxelGrid read_voxl(const fs::path& path)
{
    auto in = open_in(path);
    try {
        return read_voxl(in);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_voxl(std::ostream& out, const VoxelGrid& grid)
{
    const bool binary = grid.is_binary();
    out << "voxl 1\ndim " << grid.q() << "\ndata " << (binary ? "binary" : "float") << "\n\n";
    write_block(out, grid.values(), grid.q(), false, 9);
}

void write_voxl(const fs::path& path, const VoxelGrid& grid)
{
    auto out = open_out(path);
    write_voxl(out, grid);
}

// ---- PGM ----

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in)
{
    std::string tok;
    for (;;) {
        const int c = in.get();
        if (c == EOF) {
            break;
        }
        if (c == '#') {
            std::string rest;
            std::getline(in, rest);
            if (!tok.empty()) {
                break;
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) {
                break;
            }
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    if (tok.empty()) {
        throw FormatError("pgm: truncated header");
    }
    return tok;
}

} // namespace

Silhouette read_pgm(std::istream& in)
{
    const std::string magic = pgm_token(in);
    if (magic != "P2" && magic != "P5") {
        throw FormatError("pgm: unsupported magic '" + magic + "'");
    }
    const long long w = parse_int(pgm_token(in), "pgm width");
    const long long h = parse_int(pgm_token(in), "pgm height");
    const long long maxval = parse_int(pgm_token(in), "pgm maxval");
    if (w <= 0 || h <= 0) {
        throw FormatError("pgm: nonpositive size");
    }
    if (w != h) {
        throw FormatError("pgm: silhouettes are square, got " + std::to_string(w) + "x" + std::to_string(h));
    }
    if (maxval < 1 || maxval > 255) {
        throw FormatError("pgm: maxval " + std::to_string(maxval) + " not in [1,255]");
    }
    const int q = static_cast<int>(w);
    const Eigen::Index n = static_cast<Eigen::Index>(q) * q;
    Eigen::VectorXd vals(n);
    if (magic == "P5") {
        std::vector<char> buf(static_cast<std::size_t>(n));
        if (!in.read(buf.data(), n)) {
            throw FormatError("pgm: expected " + std::to_string(n) + " raster bytes");
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            vals[i] = static_cast<unsigned char>(buf[static_cast<std::size_t>(i)]);
        }
    } else {
        std::string tok;
        Eigen::Index i = 0;
        while (in >> tok) {
            if (i == n) {
                throw FormatError("pgm: more than " + std::to_string(n) + " pixel values");
            }
            vals[i++] = static_cast<double>(parse_int(tok, "pgm pixel"));
        }
        if (i != n) {
            throw FormatError("pgm: expected " + std::to_string(n) + " pixel values, found " + std::to_string(i));
        }
    }
    if ((vals.array() > static_cast<double>(maxval)).any() || (vals.array() < 0.0).any()) {
        throw FormatError("pgm: pixel value outside [0, maxval]");
    }
    return Silhouette(q, vals / static_cast<double>(maxval));
}

Silhouette read_pgm(const fs::path& path)
{
    auto in = open_in(path, std::ios::in | std::ios::binary);
    try {
        return read_pgm(in);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_pgm(std::ostream& out, const Silhouette& sil, PgmEncoding encoding)
{
    const int q = sil.q();
    out << (encoding == PgmEncoding::raw ? "P5" : "P2") << '\n' << q << ' ' << q << "\n255\n";
    for (Eigen::Index i = 0; i < sil.size(); ++i) {
        const int px = static_cast<int>(std::lround(255.0 * sil.values()[i]));
        if (encoding == PgmEncoding::raw) {
            out.put(static_cast<char>(static_cast<unsigned char>(px)));
        } else {
            out << px << ((i + 1) % q == 0 ? '\n' : ' ');
        }
    }
}

void write_pgm(const fs::path& path, const Silhouette& sil, PgmEncoding encoding)
{
    auto out = open_out(path, std::ios::out | std::ios::binary);
    write_pgm(out, sil, encoding);
}

// ---- VOXB ----

StyleBasis read_basis(std::istream& in)
{
    const std::string fmt = "voxb";
    if (single_value(header_line(in, "voxb", fmt), "voxb", fmt) != "1") {
        throw FormatError("voxb: unsupported version");
    }
    StyleBasis b;
    b.q = read_dim(in, fmt);
    const long long m = parse_int(single_value(header_line(in, "m", fmt), "m", fmt), "voxb m");
    const Eigen::Index n = static_cast<Eigen::Index>(b.q) * b.q * b.q;
    if (m < 0 || m > n) {
        throw FormatError("voxb: m " + std::to_string(m) + " out of range");
    }

    b.singular_values = Eigen::VectorXd::Zero(m);
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("voxb: truncated header");
    }
    if (line.rfind("sv", 0) == 0) {
        std::istringstream ls(line.substr(2));
        std::vector<std::string> toks{std::istream_iterator<std::string>(ls), std::istream_iterator<std::string>()};
        if (static_cast<long long>(toks.size()) != m) {
            throw FormatError("voxb: 'sv' line has " + std::to_string(toks.size()) + " values, expected " +
                              std::to_string(m));
        }
        for (std::size_t i = 0; i < toks.size(); ++i) {
            b.singular_values[static_cast<Eigen::Index>(i)] = parse_double(toks[i], "voxb sv");
        }
        expect_blank(in, fmt);
    } else if (line.find_first_not_of(" \t\r") != std::string::npos) {
        throw FormatError("voxb: expected a blank line after the header");
    }

    const Eigen::VectorXd all = read_values(in, n * (m + 1), fmt);
    b.mu = all.head(n);
    b.basis = Eigen::Map<const Eigen::MatrixXd>(all.data() + n, n, m);
    return b;
}

StyleBasis read_basis(const fs::path& path)
{
    auto in = open_in(path);
    try {
        return read_basis(in);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_basis(std::ostream& out, const StyleBasis& basis)
{
    out << "voxb 1\ndim " << basis.q << "\nm " << basis.m() << '\n';
    if (basis.m() > 0) {
        out << "sv";
        for (Eigen::Index i = 0; i < basis.singular_values.size(); ++i) {
            out << ' ' << detail::format_double(basis.singular_values[i]);
        }
        out << '\n';
    }
    out << '\n';
    write_block(out, basis.mu, basis.q, true);
    for (int c = 0; c < basis.m(); ++c) {
        write_block(out, basis.basis.col(c), basis.q, true);
    }
}

void write_basis(const fs::path& path, const StyleBasis& basis)
{
    auto out = open_out(path);
    write_basis(out, basis);
}

// ---- manifest ----

namespace {

fs::path resolve(const fs::path& base, const std::string& p)
{
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

std::vector<double> json_reals(const nlohmann::json& j, const std::string& key, int line_no)
{
    if (!j.is_array()) {
        throw FormatError("manifest line " + std::to_string(line_no) + ": '" + key + "' must be an array");
    }
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) {
            throw FormatError("manifest line " + std::to_string(line_no) + ": '" + key + "' must hold numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace

std::vector<ManifestEntry> read_manifest(std::istream& in, const fs::path& base_dir)
{
    std::vector<ManifestEntry> entries;
    std::set<std::string> ids;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const std::string where = "manifest line " + std::to_string(line_no);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw FormatError(where + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("silhouette_path") ||
            !j["silhouette_path"].is_string()) {
            throw FormatError(where + ": entries need string fields 'id' and 'silhouette_path'");
        }
        ManifestEntry e;
        e.id = j["id"].get<std::string>();
        if (!ids.insert(e.id).second) {
            throw FormatError(where + ": duplicate id '" + e.id + "'");
        }
        e.silhouette_path = resolve(base_dir, j["silhouette_path"].get<std::string>());
        if (!fs::exists(e.silhouette_path)) {
            throw FormatError(where + ": missing file " + e.silhouette_path.string());
        }
        if (j.contains("gt_grid_path")) {
            if (!j["gt_grid_path"].is_string()) {
                throw FormatError(where + ": 'gt_grid_path' must be a string");
            }
            e.gt_grid_path = resolve(base_dir, j["gt_grid_path"].get<std::string>());
            if (!fs::exists(*e.gt_grid_path)) {
                throw FormatError(where + ": missing file " + e.gt_grid_path->string());
            }
        }
        if (j.contains("gt_pose")) {
            const auto p = json_reals(j["gt_pose"], "gt_pose", line_no);
            if (p.size() != 5) {
                throw FormatError(where + ": 'gt_pose' needs 5 numbers");
            }
            e.gt_pose = PoseParams::from_vector(Vector5d(p[0], p[1], p[2], p[3], p[4]));
        }
        if (j.contains("gt_style")) {
            const auto s = json_reals(j["gt_style"], "gt_style", line_no);
            e.gt_style = Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<ManifestEntry> read_manifest(const fs::path& path)
{
    auto in = open_in(path);
    return read_manifest(in, path.parent_path());
}

// ---- fit config ----

FitConfig read_fit_config(std::istream& in)
{
    FitConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw FormatError("config line " + std::to_string(line_no) + ": expected key=value");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const std::string ctx = "config key '" + key + "'";
        if (key == "restarts") {
            cfg.restarts = static_cast<int>(parse_int(val, ctx));
        } else if (key == "iterations") {
            cfg.iterations = static_cast<int>(parse_int(val, ctx));
        } else if (key == "step_size") {
            cfg.step_size = parse_double(val, ctx);
        } else if (key == "beta1") {
            cfg.beta1 = parse_double(val, ctx);
        } else if (key == "beta2") {
            cfg.beta2 = parse_double(val, ctx);
        } else if (key == "adam_epsilon") {
            cfg.adam_epsilon = parse_double(val, ctx);
        } else if (key == "seed") {
            const long long s = parse_int(val, ctx);
            if (s < 0) {
                throw FormatError(ctx + ": seed must be nonnegative");
            }
            cfg.seed = static_cast<std::uint64_t>(s);
        } else if (key == "loss_tolerance") {
            cfg.loss_tolerance = parse_double(val, ctx);
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(parse_int(val, ctx));
        } else {
            throw FormatError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
    return cfg;
}

FitConfig read_fit_config(const fs::path& path)
{
    auto in = open_in(path);
    return read_fit_config(in);
}

// ---- fit report ----

namespace {

std::string join(const Eigen::VectorXd& v)
{
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i > 0) {
            s += ',';
        }
        s += detail::format_double(v[i]);
    }
    return s;
}

} // namespace

std::vector<double> parse_real_list(const std::string& text)
{
    std::vector<double> out;
    if (text.empty()) {
        return out;
    }
    std::size_t pos = 0;
    for (;;) {
        const auto comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        const auto b = tok.find_first_not_of(' ');
        const auto e = tok.find_last_not_of(' ');
        tok = b == std::string::npos ? std::string() : tok.substr(b, e - b + 1);
        out.push_back(parse_double(tok, "list"));
        if (comma == std::string::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

void write_fit_report(std::ostream& out, const FitReport& r)
{
    out << "reproj-fit 1\n"
        << "pose=" << join(r.pose.to_vector()) << '\n'
        << "style=" << join(r.style) << '\n'
        << "final_loss=" << detail::format_double(r.final_loss) << '\n'
        << "restart_index=" << r.restart_index << '\n'
        << "iterations_run=" << r.iterations_run << '\n'
        << "silhouette=" << r.silhouette_path.generic_string() << '\n'
        << "grid=" << r.grid_path.generic_string() << '\n';
}

void write_fit_report(const fs::path& path, const FitReport& report)
{
    auto out = open_out(path);
    write_fit_report(out, report);
}

FitReport read_fit_report(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != "reproj-fit 1") {
        throw FormatError("fit report: missing 'reproj-fit 1' header");
    }
    FitReport r;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw FormatError("fit report: expected key=value, got '" + line + "'");
        }
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        seen.insert(key);
        if (key == "pose") {
            const auto p = parse_real_list(val);
            if (p.size() != 5) {
                throw FormatError("fit report: pose needs 5 values");
            }
            r.pose = PoseParams::from_vector(Vector5d(p[0], p[1], p[2], p[3], p[4]));
        } else if (key == "style") {
            const auto s = parse_real_list(val);
            r.style = Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
        } else if (key == "final_loss") {
            r.final_loss = parse_double(val, "fit report final_loss");
        } else if (key == "restart_index") {
            r.restart_index = static_cast<int>(parse_int(val, "fit report restart_index"));
        } else if (key == "iterations_run") {
            r.iterations_run = static_cast<int>(parse_int(val, "fit report iterations_run"));
        } else if (key == "silhouette") {
            r.silhouette_path = val;
        } else if (key == "grid") {
            r.grid_path = val;
        } else {
            throw FormatError("fit report: unknown key '" + key + "'");
        }
    }
    for (const char* k : {"pose", "style", "final_loss", "silhouette", "grid"}) {
        if (!seen.count(k)) {
            throw FormatError(std::string("fit report: missing key '") + k + "'");
        }
    }
    return r;
}

FitReport read_fit_report(const fs::path& path)
{
    auto in = open_in(path);
    return read_fit_report(in);
}

} // namespace reproj::io
