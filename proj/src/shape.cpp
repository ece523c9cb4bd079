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
#include "reproj/shape.hpp"

#include "reproj/detail/trilinear.hpp"

#include "Eigen/SVD"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace reproj {

VoxelGrid::VoxelGrid(int q) : q_(q)
{
    if (q <= 0) {
        throw std::invalid_argument("VoxelGrid: side length must be positive, got " + std::to_string(q));
    }
    values_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(q) * q * q);
}

VoxelGrid::VoxelGrid(int q, Eigen::VectorXd values) : q_(q), values_(std::move(values))
{
    if (q <= 0) {
        throw std::invalid_argument("VoxelGrid: side length must be positive, got " + std::to_string(q));
    }
    const Eigen::Index expected = static_cast<Eigen::Index>(q) * q * q;
    if (values_.size() != expected) {
        throw std::invalid_argument("VoxelGrid: expected " + std::to_string(expected) + " values, got " +
                                    std::to_string(values_.size()));
    }
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= 0.0 && values_[i] <= 1.0)) {
            throw std::invalid_argument("VoxelGrid: value " + std::to_string(values_[i]) + " at index " +
                                        std::to_string(i) + " is outside [0,1]");
        }
    }
}

bool VoxelGrid::is_binary() const
{
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

double sigmoid(double x) noexcept
{
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double clamped_logit(double v) noexcept
{
    const double c = std::clamp(v, kLogitClamp, 1.0 - kLogitClamp);
    return std::log(c / (1.0 - c));
}

namespace {

Eigen::VectorXd logits(const VoxelGrid& g)
{
    return g.values().unaryExpr([](double v) { return clamped_logit(v); });
}

} // namespace

StyleBasis fit_basis(std::span<const VoxelGrid> shapes, int m)
{
    if (shapes.empty()) {
        throw std::invalid_argument("fit_basis: need at least one shape");
    }
    const int q = shapes.front().q();
    const Eigen::Index n_vox = shapes.front().size();
    for (const auto& s : shapes) {
        if (s.q() != q) {
            throw std::invalid_argument("fit_basis: grid side " + std::to_string(s.q()) + " does not match " +
                                        std::to_string(q));
        }
    }
    const auto count = static_cast<Eigen::Index>(shapes.size());
    if (m < 0 || m > std::min(count, n_vox)) {
        throw std::invalid_argument("fit_basis: m=" + std::to_string(m) + " outside [0, " +
                                    std::to_string(std::min(count, n_vox)) + "]");
    }

    Eigen::MatrixXd data(n_vox, count);
    for (Eigen::Index j = 0; j < count; ++j) {
        data.col(j) = logits(shapes[j]);
    }
    StyleBasis out;
    out.q = q;
    out.mu = data.rowwise().mean();
    data.colwise() -= out.mu;

    if (m == 0) {
        out.basis.resize(n_vox, 0);
        out.singular_values.resize(0);
        return out;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(data, Eigen::ComputeThinU);
    out.basis = svd.matrixU().leftCols(m);
    out.singular_values = svd.singularValues().head(m);
    for (int c = 0; c < m; ++c) {
        Eigen::Index arg = 0;
        out.basis.col(c).cwiseAbs().maxCoeff(&arg);
        if (out.basis(arg, c) < 0.0) {
            out.basis.col(c) *= -1.0;
        }
    }
    return out;
}

VoxelGrid generate(const StyleBasis& basis, const StyleVector& s)
{
    if (s.size() != basis.m()) {
        throw std::invalid_argument("generate: style has " + std::to_string(s.size()) + " entries, basis has " +
                                    std::to_string(basis.m()));
    }
    Eigen::VectorXd lin = basis.mu;
    if (basis.m() > 0) {
        lin.noalias() += basis.basis * s;
    }
    return VoxelGrid(basis.q, lin.unaryExpr([](double x) { return sigmoid(x); }));
}

StyleVector encode(const StyleBasis& basis, const VoxelGrid& grid)
{
    if (grid.q() != basis.q) {
        throw std::invalid_argument("encode: grid side " + std::to_string(grid.q()) + " does not match basis side " +
                                    std::to_string(basis.q));
    }
    return basis.basis.transpose() * (logits(grid) - basis.mu);
}

VoxelGrid rescale(const VoxelGrid& shape, double scale)
{
    if (!(scale > 0.0 && scale <= 1.0)) {
        throw std::invalid_argument("rescale: scale " + std::to_string(scale) + " outside (0, 1]");
    }
    const int q = shape.q();
    const double c = shape.center();
    VoxelGrid out(q);
    for (int z = 0; z < q; ++z) {
        for (int y = 0; y < q; ++y) {
            for (int x = 0; x < q; ++x) {
                const Eigen::Vector3d pos = Eigen::Vector3d(x - c, y - c, z - c) / scale + Eigen::Vector3d::Constant(c);
                const double v = detail::trilinear_sample(shape.values(), q, pos);
                out(x, y, z) = v >= 0.5 ? 1.0 : 0.0;
            }
        }
    }
    return out;
}

std::vector<VoxelGrid> augment_scales(std::span<const VoxelGrid> shapes, std::span<const double> scales,
                                      std::uint64_t rng_seed)
{
    for (double s : scales) {
        if (!(s > 0.0 && s <= 1.0)) {
            throw std::invalid_argument("augment_scales: scale " + std::to_string(s) + " outside (0, 1]");
        }
    }
    std::vector<VoxelGrid> out;
    out.reserve(shapes.size() * scales.size());
    for (const auto& shape : shapes) {
        for (double s : scales) {
            out.push_back(s == 1.0 ? shape : rescale(shape, s));
        }
    }
    // Fisher-Yates with an explicit bounded draw: std::shuffle and the
    // standard distributions are not reproducible across library vendors.
    std::mt19937_64 rng(rng_seed);
    for (std::size_t i = out.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(out[i - 1], out[j]);
    }
    return out;
}

} // namespace reproj
